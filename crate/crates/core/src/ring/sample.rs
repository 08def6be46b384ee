use rand::Rng;

use super::{reduce_centered, Polynomial, RingError, RingParams};

/// Uniform over `Z_q` per coefficient.
pub fn sample_uniform<R: Rng + ?Sized>(params: &RingParams, rng: &mut R) -> Polynomial {
    let q = params.modulus();
    let coeffs = (0..params.degree())
        .map(|_| reduce_centered(rng.random_range(0..q) as i128, q))
        .collect();
    Polynomial::from_raw_parts(coeffs, q)
}

/// Coefficients drawn independently from `{0, 1}`.
pub fn sample_binary<R: Rng + ?Sized>(params: &RingParams, rng: &mut R) -> Polynomial {
    let q = params.modulus();
    let coeffs = (0..params.degree())
        .map(|_| reduce_centered(rng.random_range(0..=1i64) as i128, q))
        .collect();
    Polynomial::from_raw_parts(coeffs, q)
}

/// Coefficients uniform in `[-bound, bound]`.
pub fn sample_bounded_uniform<R: Rng + ?Sized>(
    params: &RingParams,
    bound: u64,
    rng: &mut R,
) -> Polynomial {
    let q = params.modulus();
    let bound = bound as i128;
    let coeffs = (0..params.degree())
        .map(|_| reduce_centered(rng.random_range(-bound..=bound), q))
        .collect();
    Polynomial::from_raw_parts(coeffs, q)
}

pub fn sample_gaussian<R: Rng + ?Sized>(
    params: &RingParams,
    sigma: f64,
    rng: &mut R,
) -> Result<Polynomial, RingError> {
    let sampler = GaussianSampler::new(sigma)?;
    Ok(sampler.sample_poly(params, rng))
}

/// Cumulative-table sampler for the discrete Gaussian on `Z`, centered at
/// zero and cut at `floor(6 * sigma)`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    sigma: f64,
    bound: i64,
    cdf: Vec<f64>,
}

impl GaussianSampler {
    pub const TAIL_CUT: f64 = 6.0;

    pub fn new(sigma: f64) -> Result<Self, RingError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(RingError::InvalidSigma(sigma));
        }
        let bound = (Self::TAIL_CUT * sigma).floor() as i64;
        let mut cdf = Vec::with_capacity(2 * bound as usize + 1);
        let mut total = 0.0;
        for x in -bound..=bound {
            total += if sigma == 0.0 {
                1.0
            } else {
                (-((x * x) as f64) / (2.0 * sigma * sigma)).exp()
            };
            cdf.push(total);
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Self { sigma, bound, cdf })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Largest magnitude this sampler can return.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1) as i64 - self.bound
    }

    pub fn sample_poly<R: Rng + ?Sized>(&self, params: &RingParams, rng: &mut R) -> Polynomial {
        let q = params.modulus();
        let coeffs = (0..params.degree())
            .map(|_| reduce_centered(self.sample(rng) as i128, q))
            .collect();
        Polynomial::from_raw_parts(coeffs, q)
    }
}
