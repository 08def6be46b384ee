use super::AttackError;
use crate::bfv::{
    decrypt_raw, round_scaled, witness_noise, BfvParams, Ciphertext, EncryptionWitness, Plaintext,
    PublicKey, SecretKey,
};
use crate::ring::reduce_centered;

/// Recovers the evaluator's multiplier `r` and input `m_b` from
/// `c_ab = r * (m_b - c_a)`, given the randomness Alice used for `c_a`.
///
/// Without flooding, `[c0 + c1*s]_q = r*delta*(m_b - m_a) - r*n` exactly,
/// where `n = e1 + e2*s - e*u` is fully known to Alice. Every non-constant
/// coefficient is then `-r * n_j`, which pins down `r`; the constant
/// coefficient then pins down `m_b`. The whole predicted decryption is
/// compared against the observed one, so any unexplained noise (flooding)
/// surfaces as [`AttackError::FloodedOrMalformed`].
pub fn circuit_privacy_recover(
    sk: &SecretKey,
    pk: &PublicKey,
    witness: &EncryptionWitness,
    m_a: &Plaintext,
    c_ab: &Ciphertext,
    params: &BfvParams,
) -> Result<(Plaintext, Plaintext), AttackError> {
    let m_a = scalar(m_a)?;
    let q = params.modulus();
    let t = params.plain_modulus();
    let noise = witness_noise(sk, pk, witness)?;
    let raw = decrypt_raw(sk, c_ab, params)?;
    let n = noise.coeffs();
    let raw = raw.coeffs();

    let mut usable = (1..n.len()).filter(|&j| n[j] != 0);
    let first = usable
        .next()
        .ok_or(AttackError::InsufficientNoiseStructure)?;
    let r = exact_quotient(raw[first], n[first])?;
    if let Some(second) = usable.next() {
        let r2 = exact_quotient(raw[second], n[second])?;
        if r2 != r {
            return Err(AttackError::FloodedOrMalformed(format!(
                "indices {first} and {second} disagree on r ({r} vs {r2})"
            )));
        }
    }
    if r == 0 || reduce_centered(r as i128, t) != r {
        return Err(AttackError::FloodedOrMalformed(format!(
            "multiplier {r} is not a nonzero residue mod {t}"
        )));
    }

    for (j, (&rj, &nj)) in raw.iter().zip(n).enumerate().skip(1) {
        if reduce_centered(-(r as i128) * nj as i128, q) != rj {
            return Err(AttackError::FloodedOrMalformed(format!(
                "coefficient {j} carries unexplained noise"
            )));
        }
    }

    let delta = params.delta() as i128;
    let scaled_ma = reduce_centered(delta * m_a as i128, q) as i128;
    let predict_constant = |m_b: i64| {
        let inner = reduce_centered(
            reduce_centered(delta * m_b as i128, q) as i128 - scaled_ma - n[0] as i128,
            q,
        );
        reduce_centered(r as i128 * inner as i128, q)
    };

    // raw_0 + r*n_0 = r*delta*(m_b - m_a) mod q; rounding by t/q recovers
    // r*(m_b - m_a) mod t.
    let masked = reduce_centered(raw[0] as i128 + r as i128 * n[0] as i128, q);
    let product = reduce_centered(round_scaled(masked, t, q), t);
    let matches: Vec<i64> = solve_linear_mod(r, product, t)
        .into_iter()
        .map(|diff| reduce_centered(m_a as i128 + diff, t))
        .filter(|&m_b| predict_constant(m_b) == raw[0])
        .collect();
    match matches.as_slice() {
        [m_b] => Ok((
            Plaintext::constant(r, params),
            Plaintext::constant(*m_b, params),
        )),
        [] => Err(AttackError::FloodedOrMalformed(
            "constant coefficient has no consistent m_b".into(),
        )),
        many => Err(AttackError::Ambiguous(many.len())),
    }
}

fn scalar(m: &Plaintext) -> Result<i64, AttackError> {
    if m.coeffs()[1..].iter().any(|&c| c != 0) {
        return Err(AttackError::NotScalar);
    }
    Ok(m.coeffs()[0])
}

fn exact_quotient(raw: i64, n: i64) -> Result<i64, AttackError> {
    let num = -(raw as i128);
    let den = n as i128;
    if num % den != 0 {
        return Err(AttackError::FloodedOrMalformed(format!(
            "{raw} is not a multiple of the known noise {n}"
        )));
    }
    i64::try_from(num / den)
        .map_err(|_| AttackError::FloodedOrMalformed("quotient overflow".into()))
}

/// All `k` in `[0, t)` with `a * k = b (mod t)`.
fn solve_linear_mod(a: i64, b: i64, t: u64) -> Vec<i128> {
    let t = t as i128;
    let a = (a as i128).rem_euclid(t);
    let b = (b as i128).rem_euclid(t);
    let (g, inv, _) = ext_gcd(a, t);
    if b % g != 0 {
        return Vec::new();
    }
    let step = t / g;
    let k0 = ((b / g) * inv).rem_euclid(step);
    (0..g).map(|j| k0 + j * step).collect()
}

// Returns (g, x, y) with a*x + b*y = g.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfv::{
        add, encrypt, encrypt_zero_flood, keygen, mul_plain, sub_from_plain, ParamSet,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bob(c_a: &Ciphertext, m_b: i64, r: i64, params: &BfvParams) -> Ciphertext {
        let diff = sub_from_plain(&Plaintext::constant(m_b, params), c_a, params).unwrap();
        mul_plain(&diff, &Plaintext::constant(r, params), params).unwrap()
    }

    #[test]
    fn linear_congruence_solver() {
        assert_eq!(solve_linear_mod(3, 1, 7), vec![5]);
        assert_eq!(solve_linear_mod(2, 4, 8), vec![2, 6]);
        assert!(solve_linear_mod(2, 3, 8).is_empty());
        for a in 1..83 {
            for b in 0..83 {
                let ks = solve_linear_mod(a, b, 83);
                assert_eq!(ks.len(), 1);
                assert_eq!((a as i128 * ks[0]) % 83, b as i128);
            }
        }
    }

    #[test]
    fn recovers_r_and_m_b_exactly() {
        let params = ParamSet::Psi83.params();
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..10 {
            let (sk, pk) = keygen(&params, &mut rng);
            let m_a = rng.random_range(-41..=41);
            let m_b = rng.random_range(-41..=41);
            let r = loop {
                let r = rng.random_range(-41..=41);
                if r != 0 {
                    break r;
                }
            };
            let (c_a, w) =
                encrypt(&pk, &Plaintext::constant(m_a, &params), &params, &mut rng).unwrap();
            let c_ab = bob(&c_a, m_b, r, &params);
            let (gr, gm) = circuit_privacy_recover(
                &sk,
                &pk,
                &w,
                &Plaintext::constant(m_a, &params),
                &c_ab,
                &params,
            )
            .unwrap();
            assert_eq!(gr, Plaintext::constant(r, &params));
            assert_eq!(gm, Plaintext::constant(m_b, &params));
        }
    }

    #[test]
    fn equal_inputs_special_case() {
        let params = ParamSet::Psi83.params();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (sk, pk) = keygen(&params, &mut rng);
        let ma = Plaintext::constant(17, &params);
        let (c_a, w) = encrypt(&pk, &ma, &params, &mut rng).unwrap();
        let c_ab = bob(&c_a, 17, -5, &params);
        let (r, m_b) = circuit_privacy_recover(&sk, &pk, &w, &ma, &c_ab, &params).unwrap();
        assert_eq!(r, Plaintext::constant(-5, &params));
        assert_eq!(m_b, ma);
    }

    #[test]
    fn flooding_defeats_recovery() {
        let params = ParamSet::Psi83.params();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (sk, pk) = keygen(&params, &mut rng);
        let ma = Plaintext::constant(3, &params);
        let (c_a, w) = encrypt(&pk, &ma, &params, &mut rng).unwrap();
        let c_ab = bob(&c_a, 9, 11, &params);
        let flooded = add(
            &c_ab,
            &encrypt_zero_flood(&pk, &params, 1 << 30, &mut rng).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            circuit_privacy_recover(&sk, &pk, &w, &ma, &flooded, &params),
            Err(AttackError::FloodedOrMalformed(_))
        ));
        // the equality check itself is unaffected
        let d = crate::bfv::decrypt(&sk, &flooded, &params).unwrap();
        assert_eq!(d, Plaintext::constant(66, &params));
    }

    #[test]
    fn noiseless_witness_has_no_structure() {
        let params = BfvParams::new(16, 1 << 54, 83, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (sk, pk) = keygen(&params, &mut rng);
        let ma = Plaintext::constant(1, &params);
        let (c_a, mut w) = encrypt(&pk, &ma, &params, &mut rng).unwrap();
        // sigma = 0 gives e = e1 = e2 = 0; also force u = 0 so n vanishes
        w.u = params.ring().zero();
        let c_ab = bob(&c_a, 2, 3, &params);
        assert_eq!(
            circuit_privacy_recover(&sk, &pk, &w, &ma, &c_ab, &params),
            Err(AttackError::InsufficientNoiseStructure)
        );
    }

    #[test]
    fn composite_t_can_be_ambiguous() {
        // t = 256 with even r: r*(m_b - m_a) mod 256 loses a bit
        let params = ParamSet::Cca1024.params();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (sk, pk) = keygen(&params, &mut rng);
        let ma = Plaintext::constant(5, &params);
        let (c_a, w) = encrypt(&pk, &ma, &params, &mut rng).unwrap();
        let c_ab = bob(&c_a, 9, 2, &params);
        let got = circuit_privacy_recover(&sk, &pk, &w, &ma, &c_ab, &params);
        assert_eq!(got, Err(AttackError::Ambiguous(2)));
        // odd r is invertible mod 256
        let c_ab = bob(&c_a, 9, 3, &params);
        let (r, m_b) = circuit_privacy_recover(&sk, &pk, &w, &ma, &c_ab, &params).unwrap();
        assert_eq!(r, Plaintext::constant(3, &params));
        assert_eq!(m_b, Plaintext::constant(9, &params));
    }

    #[test]
    fn non_scalar_input_rejected() {
        let params = ParamSet::Psi83.params();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (sk, pk) = keygen(&params, &mut rng);
        let ma = Plaintext::from_coeffs(&[1, 1], &params).unwrap();
        let (c_a, w) = encrypt(&pk, &ma, &params, &mut rng).unwrap();
        assert_eq!(
            circuit_privacy_recover(&sk, &pk, &w, &ma, &c_a, &params),
            Err(AttackError::NotScalar)
        );
    }
}
