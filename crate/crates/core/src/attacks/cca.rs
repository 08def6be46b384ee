use super::{AttackError, DecryptionOracle};
use crate::bfv::{BfvParams, Ciphertext, SecretKey};

/// Recovers a binary secret key with a single decryption query.
///
/// The forged ciphertext `(0, delta)` decrypts to `round(delta * s * t / q)`,
/// which is `s` itself whenever `delta * t` is close to `q`.
pub fn cca_one_query<O: DecryptionOracle + ?Sized>(
    oracle: &mut O,
    params: &BfvParams,
) -> Result<SecretKey, AttackError> {
    let ring = params.ring();
    let forged = Ciphertext {
        c0: ring.zero(),
        c1: ring.constant(params.delta() as i128),
    };
    let m = oracle.decrypt(&forged)?;
    let t = params.plain_modulus() as i64;
    let bits = m
        .coeffs()
        .iter()
        .enumerate()
        .map(|(index, &c)| match c.rem_euclid(t) {
            b @ (0 | 1) => Ok(b),
            _ => Err(AttackError::NonBinaryRecovery { index, value: c }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SecretKey::new(ring.polynomial(bits)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{honest_decryptor, CountingOracle, OracleError};
    use crate::bfv::{keygen, BfvParams, ParamSet, Plaintext};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_key_with_one_query() {
        let params = ParamSet::Cca1024.params();
        for seed in 0..5 {
            let (sk, _) = keygen(&params, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut oracle = honest_decryptor(&sk, &params);
            let got = cca_one_query(&mut oracle, &params).unwrap();
            assert_eq!(got, sk);
            assert_eq!(oracle.calls(), 1);
        }
    }

    #[test]
    fn binary_plaintext_modulus() {
        let params = BfvParams::new(1024, 1 << 54, 2, 3.2).unwrap();
        let (sk, _) = keygen(&params, &mut ChaCha8Rng::seed_from_u64(1));
        let mut oracle = honest_decryptor(&sk, &params);
        assert_eq!(cca_one_query(&mut oracle, &params).unwrap(), sk);
    }

    #[test]
    fn dishonest_oracle_is_detected() {
        let params = ParamSet::Cca1024.params();
        let p2 = params;
        let mut liar = CountingOracle::new(move |_: &Ciphertext| {
            Ok::<_, OracleError>(Plaintext::constant(7, &p2))
        });
        assert_eq!(
            cca_one_query(&mut liar, &params),
            Err(AttackError::NonBinaryRecovery { index: 0, value: 7 })
        );
    }
}
