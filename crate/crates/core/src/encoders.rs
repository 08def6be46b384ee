//! Base-2 integer encoder in the style of SEAL's `IntegerEncoder`.
//!
//! `n` maps to the polynomial whose coefficient `i` is bit `i` of `|n|`,
//! negated for negative `n`. Decoding evaluates at `x = 2`. The map from
//! polynomials back to integers is many-to-one: `x + 2` and `2x` both
//! decode to 4.

use crate::bfv::{BfvParams, Plaintext};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("{value} needs {bits} bits but the ring only has {degree} coefficients")]
    Overflow {
        value: i64,
        bits: u32,
        degree: usize,
    },
    #[error("decoded value does not fit in 128 bits")]
    DecodeOverflow,
}

pub fn integer_encode(n: i64, params: &BfvParams) -> Result<Plaintext, EncodingError> {
    let magnitude = n.unsigned_abs();
    let bits = u64::BITS - magnitude.leading_zeros();
    if bits as usize > params.degree() {
        return Err(EncodingError::Overflow {
            value: n,
            bits,
            degree: params.degree(),
        });
    }
    let sign = if n < 0 { -1 } else { 1 };
    let coeffs: Vec<i64> = (0..bits)
        .map(|i| sign * ((magnitude >> i) & 1) as i64)
        .collect();
    Ok(Plaintext::from_coeffs(&coeffs, params).expect("bits <= degree"))
}

/// Evaluates the centered coefficients at `x = 2`.
pub fn integer_decode(p: &Plaintext) -> Result<i128, EncodingError> {
    let mut acc: i128 = 0;
    for &c in p.coeffs().iter().rev() {
        acc = acc
            .checked_mul(2)
            .and_then(|a| a.checked_add(c as i128))
            .ok_or(EncodingError::DecodeOverflow)?;
    }
    Ok(acc)
}
