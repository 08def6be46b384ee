use rand::Rng;
use serde::Serialize;

use super::AttackError;
use crate::bfv::{add, decrypt, encrypt, keygen, BfvParams};
use crate::encoders::{integer_decode, integer_encode};
use crate::ring::Polynomial;

/// One run of the three-party sum: A and B encrypt their encoded amounts,
/// B adds the ciphertexts, C decrypts and decodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MillionaireRun {
    pub m1: i64,
    pub m2: i64,
    pub m3: i64,
    /// Coefficients of `decrypt(c_12)` up to the last nonzero one.
    pub decrypted_sum: Vec<i64>,
    pub decrypted_sum_text: String,
    pub decoded_sum: i128,
    pub total: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncoderLeakTranscript {
    pub runs: Vec<MillionaireRun>,
    /// The decrypted polynomials differ while their decodings agree.
    pub leaked: bool,
}

pub const OPERAND_PAIRS: [(i64, i64); 2] = [(1, 3), (2, 2)];
pub const THIRD_PARTY_AMOUNT: i64 = 4;

pub fn encoder_leak_demo<R: Rng + ?Sized>(
    params: &BfvParams,
    rng: &mut R,
) -> Result<EncoderLeakTranscript, AttackError> {
    let runs = OPERAND_PAIRS
        .iter()
        .map(|&(m1, m2)| millionaires(m1, m2, THIRD_PARTY_AMOUNT, params, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let leaked = runs
        .windows(2)
        .all(|w| w[0].decrypted_sum != w[1].decrypted_sum && w[0].decoded_sum == w[1].decoded_sum);
    Ok(EncoderLeakTranscript { runs, leaked })
}

fn millionaires<R: Rng + ?Sized>(
    m1: i64,
    m2: i64,
    m3: i64,
    params: &BfvParams,
    rng: &mut R,
) -> Result<MillionaireRun, AttackError> {
    let (sk, pk) = keygen(params, rng);
    let (c1, _) = encrypt(&pk, &integer_encode(m1, params)?, params, rng)?;
    let (c2, _) = encrypt(&pk, &integer_encode(m2, params)?, params, rng)?;
    let c12 = add(&c1, &c2)?;
    let sum = decrypt(&sk, &c12, params)?;
    let decoded_sum = integer_decode(&sum)?;
    let len = sum
        .coeffs()
        .iter()
        .rposition(|&c| c != 0)
        .map_or(0, |i| i + 1);
    Ok(MillionaireRun {
        m1,
        m2,
        m3,
        decrypted_sum: sum.coeffs()[..len].to_vec(),
        decrypted_sum_text: format_poly(sum.poly()),
        decoded_sum,
        total: decoded_sum + m3 as i128,
    })
}

/// Human-readable form such as `x + 2`, `2x` or `-x^3 + 1`.
pub fn format_poly(p: &Polynomial) -> String {
    let mut out = String::new();
    for (i, &c) in p.coeffs().iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else { "+" };
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mag = c.unsigned_abs();
        match (i, mag) {
            (0, m) => out.push_str(&m.to_string()),
            (1, 1) => out.push('x'),
            (1, m) => out.push_str(&format!("{m}x")),
            (i, 1) => out.push_str(&format!("x^{i}")),
            (i, m) => out.push_str(&format!("{m}x^{i}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
