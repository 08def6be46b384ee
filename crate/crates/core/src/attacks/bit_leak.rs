use super::{AttackError, ZeroCheckOracle};
use crate::bfv::{
    decrypt_raw, public_key_error, round_to_plaintext, BfvParams, Ciphertext, PublicKey, SecretKey,
};

/// Margin added on top of `delta / 4` so the probe survives keygen noise.
pub const PROBE_SLACK: u64 = 20;

/// `M = floor(delta / 4) + 20`
pub fn probe_multiplier(params: &BfvParams) -> u64 {
    params.delta() / 4 + PROBE_SLACK
}

/// `(pk0 + M*x^i, pk1 + M)`.
///
/// Decrypts through `-e + M*x^i + M*s`: every coefficient sits near 0 or
/// `delta/4` except coefficient `i`, which crosses `delta/2` exactly when
/// `s_i = 1`. The decryption is therefore zero iff `s_i = 0`.
pub fn bit_leak_probe(
    pk: &PublicKey,
    index: usize,
    params: &BfvParams,
) -> Result<Ciphertext, AttackError> {
    let ring = params.ring();
    let m = probe_multiplier(params) as i128;
    Ok(Ciphertext {
        c0: pk.pk0.add(&ring.monomial(index, m)?)?,
        c1: pk.pk1.add(&ring.constant(m))?,
    })
}

/// One zero-check per key coefficient; bit `i` is the negation of the
/// oracle's answer on probe `i`.
pub fn bit_leak_attack<O: ZeroCheckOracle + ?Sized>(
    oracle: &mut O,
    pk: &PublicKey,
    params: &BfvParams,
) -> Result<SecretKey, AttackError> {
    let bits = (0..params.degree())
        .map(|i| {
            let probe = bit_leak_probe(pk, i, params)?;
            Ok(i64::from(!oracle.is_zero(&probe)?))
        })
        .collect::<Result<Vec<_>, AttackError>>()?;
    Ok(SecretKey::new(params.ring().polynomial(bits)?)?)
}

/// How far each coefficient of a decrypted probe sits from the rounding
/// boundary at `1/2`.
///
/// Slacks are kept in exact integer units of `1/(2q)`: a coefficient `c`
/// expected to round to 0 has slack `q - 2|c|t`, one expected to round to
/// 1 has slack `2|c|t - q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeMargin {
    pub index: usize,
    pub key_bit: bool,
    pub others_round_to_zero: bool,
    pub target_rounds_to_key_bit: bool,
    pub min_slack: i128,
    /// `||e||_inf` of the key's public-key error.
    pub observed_noise: u64,
}

impl ProbeMargin {
    /// `(20 - observed_noise) * t / q` in the same `1/(2q)` units.
    pub fn required_slack(&self, params: &BfvParams) -> i128 {
        2 * (PROBE_SLACK as i128 - self.observed_noise as i128) * params.plain_modulus() as i128
    }

    /// Slack as a fraction of `t/q`, for display.
    pub fn slack_in_t_over_q(&self, params: &BfvParams) -> f64 {
        self.min_slack as f64 / (2.0 * params.plain_modulus() as f64)
    }

    pub fn holds(&self, params: &BfvParams) -> bool {
        let required = self.required_slack(params);
        self.others_round_to_zero
            && self.target_rounds_to_key_bit
            && required > 0
            && self.min_slack >= required
    }
}

pub fn probe_margin(
    sk: &SecretKey,
    pk: &PublicKey,
    index: usize,
    params: &BfvParams,
) -> Result<ProbeMargin, AttackError> {
    let probe = bit_leak_probe(pk, index, params)?;
    let raw = decrypt_raw(sk, &probe, params)?;
    let decrypted = round_to_plaintext(&raw, params);
    let key_bit = sk.poly().coeff(index) == 1;
    let q = params.modulus() as i128;
    let t = params.plain_modulus() as i128;

    let mut min_slack = i128::MAX;
    for (j, &c) in raw.coeffs().iter().enumerate() {
        let scaled = 2 * c.unsigned_abs() as i128 * t;
        let slack = if j == index && key_bit {
            if c > 0 {
                scaled - q
            } else {
                -scaled - q
            }
        } else {
            q - scaled
        };
        min_slack = min_slack.min(slack);
    }

    let target = decrypted.coeffs()[index];
    let others_round_to_zero = decrypted
        .coeffs()
        .iter()
        .enumerate()
        .all(|(j, &c)| j == index || c == 0);
    Ok(ProbeMargin {
        index,
        key_bit,
        others_round_to_zero,
        target_rounds_to_key_bit: target == i64::from(key_bit),
        min_slack,
        observed_noise: public_key_error(sk, pk)?.inf_norm(),
    })
}
