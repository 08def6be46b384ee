use std::fmt;

use super::{reduce_centered, RingError};

/// An element of `Z_m[x]/(x^d + 1)`, coefficients lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<i64>,
    modulus: u64,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nonzero = self.coeffs.iter().filter(|c| **c != 0).count();
        if self.coeffs.len() <= 16 {
            write!(f, "Polynomial(mod {}, {:?})", self.modulus, self.coeffs)
        } else {
            write!(
                f,
                "Polynomial(mod {}, d={}, {} nonzero, head {:?})",
                self.modulus,
                self.coeffs.len(),
                nonzero,
                &self.coeffs[..8]
            )
        }
    }
}

impl Polynomial {
    pub(crate) fn from_raw_parts(coeffs: Vec<i64>, modulus: u64) -> Self {
        debug_assert!(coeffs
            .iter()
            .all(|&c| reduce_centered(c as i128, modulus) == c));
        Self { coeffs, modulus }
    }

    pub fn zero(degree: usize, modulus: u64) -> Self {
        Self {
            coeffs: vec![0; degree],
            modulus,
        }
    }

    /// Wraps already-centered coefficients, rejecting anything outside
    /// `[-m/2, m/2)`.
    pub fn from_centered(coeffs: Vec<i64>, modulus: u64) -> Result<Self, RingError> {
        if modulus < 2 {
            return Err(RingError::InvalidModulus(modulus));
        }
        if let Some(&value) = coeffs
            .iter()
            .find(|&&c| reduce_centered(c as i128, modulus) != c)
        {
            return Err(RingError::NotCentered { value, modulus });
        }
        Ok(Self { coeffs, modulus })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn inf_norm(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn l1_norm(&self) -> u128 {
        self.coeffs.iter().map(|c| c.unsigned_abs() as u128).sum()
    }

    /// Re-reads the same integer coefficients modulo `modulus`.
    pub fn reduce_mod(&self, modulus: u64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| reduce_centered(c as i128, modulus))
            .collect();
        Self { coeffs, modulus }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), RingError> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(RingError::DegreeMismatch {
                left: self.coeffs.len(),
                right: other.coeffs.len(),
            });
        }
        if self.modulus != other.modulus {
            return Err(RingError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i128, i128) -> i128) -> Result<Self, RingError> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| reduce_centered(f(a as i128, b as i128), self.modulus))
            .collect();
        Ok(Self::from_raw_parts(coeffs, self.modulus))
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| reduce_centered(-(c as i128), self.modulus))
            .collect();
        Self::from_raw_parts(coeffs, self.modulus)
    }

    pub fn scalar_mul(&self, k: i128) -> Self {
        let k = reduce_centered(k, self.modulus) as i128;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| reduce_centered(c as i128 * k, self.modulus))
            .collect();
        Self::from_raw_parts(coeffs, self.modulus)
    }

    /// Negacyclic product: schoolbook convolution with `x^d = -1`.
    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_compatible(other)?;
        let coeffs = if self.modulus.is_power_of_two() {
            negacyclic_pow2(&self.coeffs, &other.coeffs, self.modulus)
        } else {
            negacyclic_wide(&self.coeffs, &other.coeffs, self.modulus)
        };
        Ok(Self::from_raw_parts(coeffs, self.modulus))
    }

    /// Hex digits per coefficient in [`Self::to_hex`].
    pub fn hex_width(modulus: u64) -> usize {
        let bits = (64 - (modulus - 1).leading_zeros()).max(1) as usize;
        bits.div_ceil(4)
    }

    /// Fixed-width two's-complement hex, one field per coefficient.
    pub fn to_hex(&self) -> String {
        let width = Self::hex_width(self.modulus);
        let mask = (1u128 << (4 * width)) - 1;
        let mut out = String::with_capacity(width * self.coeffs.len());
        for &c in &self.coeffs {
            let v = (c as i128 as u128) & mask;
            out.push_str(&format!("{v:0width$x}"));
        }
        out
    }

    pub fn from_hex(hex: &str, degree: usize, modulus: u64) -> Result<Self, RingError> {
        if modulus < 2 {
            return Err(RingError::InvalidModulus(modulus));
        }
        let width = Self::hex_width(modulus);
        if !hex.is_ascii() || hex.len() != width * degree {
            return Err(RingError::Hex(format!(
                "expected {} hex digits, got {}",
                width * degree,
                hex.len()
            )));
        }
        let bits = 4 * width as u32;
        let coeffs = (0..degree)
            .map(|i| {
                let field = &hex[i * width..(i + 1) * width];
                let raw = u128::from_str_radix(field, 16)
                    .map_err(|e| RingError::Hex(format!("{field:?}: {e}")))?;
                let value = if raw >> (bits - 1) == 1 {
                    raw as i128 - (1i128 << bits)
                } else {
                    raw as i128
                };
                i64::try_from(value).map_err(|_| RingError::Hex(format!("{field:?} overflows")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_centered(coeffs, modulus)
    }
}

// Exact modulo 2^64, hence modulo any power-of-two q.
fn negacyclic_pow2(a: &[i64], b: &[i64], q: u64) -> Vec<i64> {
    let d = a.len();
    let mut acc = vec![0u64; d];
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0 {
            continue;
        }
        let bj = bj as u64;
        let (wrapped, direct) = acc.split_at_mut(j);
        for (x, &ai) in direct.iter_mut().zip(&a[..d - j]) {
            *x = x.wrapping_add((ai as u64).wrapping_mul(bj));
        }
        for (x, &ai) in wrapped.iter_mut().zip(&a[d - j..]) {
            *x = x.wrapping_sub((ai as u64).wrapping_mul(bj));
        }
    }
    let mask = q - 1;
    acc.into_iter()
        .map(|x| reduce_centered((x & mask) as i128, q))
        .collect()
}

fn negacyclic_wide(a: &[i64], b: &[i64], q: u64) -> Vec<i64> {
    let d = a.len();
    let qbits = 64 - (q - 1).leading_zeros();
    let dbits = usize::BITS - d.leading_zeros();
    // |a_i * b_j| <= 2^(2*qbits - 2); d of those must stay inside i128.
    let direct = 2 * qbits + dbits <= 126;
    let qi = q as i128;
    let mut acc = vec![0i128; d];
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0 {
            continue;
        }
        let bj = bj as i128;
        let term = |ai: i64| {
            let p = ai as i128 * bj;
            if direct {
                p
            } else {
                p % qi
            }
        };
        let (wrapped, direct_part) = acc.split_at_mut(j);
        for (x, &ai) in direct_part.iter_mut().zip(&a[..d - j]) {
            *x += term(ai);
        }
        for (x, &ai) in wrapped.iter_mut().zip(&a[d - j..]) {
            *x -= term(ai);
        }
    }
    acc.into_iter().map(|x| reduce_centered(x, q)).collect()
}
