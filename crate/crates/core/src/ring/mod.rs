//! Exact arithmetic in `Z_m[x]/(x^d + 1)` over centered residues.
//!
//! Every coefficient is kept in the half-open interval `[-m/2, m/2)`. The
//! same [`Polynomial`] type carries ciphertext components (modulus `q`) and
//! plaintexts (modulus `t`); binary operations refuse to mix the two.

mod poly;
mod sample;

pub use poly::Polynomial;
pub use sample::{
    sample_binary, sample_bounded_uniform, sample_gaussian, sample_uniform, GaussianSampler,
};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum RingError {
    #[error("ring degree {0} is not a power of two >= 2")]
    InvalidDegree(usize),
    #[error("modulus {0} must be at least 2")]
    InvalidModulus(u64),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("coefficient index {index} out of range for degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },
    #[error("coefficient {value} is not a centered residue mod {modulus}")]
    NotCentered { value: i64, modulus: u64 },
    #[error("expected {expected} coefficients, got {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("malformed hex polynomial: {0}")]
    Hex(String),
    #[error("invalid noise width {0}")]
    InvalidSigma(f64),
}

/// Reduces `x` into the centered interval `[-m/2, m/2)`.
///
/// Total for every `m >= 2`; the result always fits in an `i64`.
pub fn reduce_centered(x: i128, m: u64) -> i64 {
    debug_assert!(m >= 2);
    let m = m as i128;
    let r = x.rem_euclid(m);
    if 2 * r >= m {
        (r - m) as i64
    } else {
        r as i64
    }
}

/// Degree and coefficient modulus of `Z_q[x]/(x^d + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingParams {
    degree: usize,
    modulus: u64,
}

impl RingParams {
    pub fn new(degree: usize, modulus: u64) -> Result<Self, RingError> {
        if degree < 2 || !degree.is_power_of_two() {
            return Err(RingError::InvalidDegree(degree));
        }
        if modulus < 2 {
            return Err(RingError::InvalidModulus(modulus));
        }
        Ok(Self { degree, modulus })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same degree, different coefficient modulus (e.g. `q` to `t`).
    pub fn with_modulus(&self, modulus: u64) -> Result<Self, RingError> {
        Self::new(self.degree, modulus)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.degree, self.modulus)
    }

    /// `c * x^index`, with `c` reduced into the centered range.
    pub fn monomial(&self, index: usize, c: i128) -> Result<Polynomial, RingError> {
        if index >= self.degree {
            return Err(RingError::IndexOutOfRange {
                index,
                degree: self.degree,
            });
        }
        let mut coeffs = vec![0i64; self.degree];
        coeffs[index] = reduce_centered(c, self.modulus);
        Ok(Polynomial::from_raw_parts(coeffs, self.modulus))
    }

    pub fn constant(&self, c: i128) -> Polynomial {
        self.monomial(0, c).expect("degree >= 2")
    }

    /// Builds a polynomial from arbitrary integers, reducing each one.
    /// Shorter inputs are zero-padded.
    pub fn polynomial<I>(&self, coeffs: I) -> Result<Polynomial, RingError>
    where
        I: IntoIterator,
        I::Item: Into<i128>,
    {
        let mut out = vec![0i64; self.degree];
        for (n, c) in coeffs.into_iter().enumerate() {
            if n >= self.degree {
                return Err(RingError::WrongLength {
                    expected: self.degree,
                    actual: n + 1,
                });
            }
            out[n] = reduce_centered(c.into(), self.modulus);
        }
        Ok(Polynomial::from_raw_parts(out, self.modulus))
    }
}
