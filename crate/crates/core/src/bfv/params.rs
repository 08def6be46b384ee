use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BfvError;
use crate::ring::RingParams;

pub const DEFAULT_SIGMA: f64 = 3.2;
pub const DEFAULT_RELIN_BASE: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfvParams {
    ring: RingParams,
    plain_modulus: u64,
    sigma: f64,
    delta: u64,
    /// Decomposition base `T` for relinearization keys. Parsed and kept for
    /// completeness; nothing in this crate relinearizes.
    relin_base: u64,
}

impl BfvParams {
    pub fn new(degree: usize, q: u64, t: u64, sigma: f64) -> Result<Self, BfvError> {
        Self::with_relin_base(degree, q, t, sigma, DEFAULT_RELIN_BASE)
    }

    pub fn with_relin_base(
        degree: usize,
        q: u64,
        t: u64,
        sigma: f64,
        relin_base: u64,
    ) -> Result<Self, BfvError> {
        let ring = RingParams::new(degree, q)?;
        if t <= 1 || t >= q {
            return Err(BfvError::InvalidPlainModulus { t, q });
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(BfvError::InvalidSigma(sigma));
        }
        if relin_base < 2 {
            return Err(BfvError::InvalidRelinBase(relin_base));
        }
        Ok(Self {
            ring,
            plain_modulus: t,
            sigma,
            delta: q / t,
            relin_base,
        })
    }

    pub fn ring(&self) -> RingParams {
        self.ring
    }

    pub fn plain_ring(&self) -> RingParams {
        self.ring
            .with_modulus(self.plain_modulus)
            .expect("t >= 2 checked at construction")
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus()
    }

    pub fn plain_modulus(&self) -> u64 {
        self.plain_modulus
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `floor(q / t)`
    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn relin_base(&self) -> u64 {
        self.relin_base
    }

    /// `l = floor(log_T(q))`, the relinearization digit count.
    pub fn relin_levels(&self) -> u32 {
        let q = self.modulus() as u128;
        let base = self.relin_base as u128;
        let mut levels = 0;
        let mut power = base;
        while power <= q {
            levels += 1;
            match power.checked_mul(base) {
                Some(p) => power = p,
                None => break,
            }
        }
        levels
    }

    /// Largest magnitude the Gaussian error sampler can produce.
    pub fn noise_bound(&self) -> u64 {
        (6.0 * self.sigma).floor() as u64
    }
}

/// Serializable description of a parameter set, as stored in reports and
/// transcripts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub d: usize,
    pub q: u64,
    pub t: u64,
    pub sigma: f64,
}

impl ParamSummary {
    pub fn new(params: &BfvParams, name: Option<&str>) -> Self {
        Self {
            name: name.map(str::to_string),
            d: params.degree(),
            q: params.modulus(),
            t: params.plain_modulus(),
            sigma: params.sigma(),
        }
    }

    pub fn to_params(&self) -> Result<BfvParams, BfvError> {
        BfvParams::new(self.d, self.q, self.t, self.sigma)
    }
}

/// The three parameter sets the attacks were demonstrated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamSet {
    /// `q = 2^54, d = 1024, t = 256`: one-query key recovery.
    #[serde(rename = "cca-1024")]
    Cca1024,
    /// `q = 2^54, d = 2048, t = 256`: one-bit oracle key recovery.
    #[serde(rename = "bitleak-2048")]
    Bitleak2048,
    /// `q = 2^54, d = 2048, t = 83`: private equality test.
    #[serde(rename = "psi-83")]
    Psi83,
}

impl ParamSet {
    pub const ALL: [ParamSet; 3] = [ParamSet::Cca1024, ParamSet::Bitleak2048, ParamSet::Psi83];

    pub fn name(self) -> &'static str {
        match self {
            ParamSet::Cca1024 => "cca-1024",
            ParamSet::Bitleak2048 => "bitleak-2048",
            ParamSet::Psi83 => "psi-83",
        }
    }

    pub fn params(self) -> BfvParams {
        let (d, t) = match self {
            ParamSet::Cca1024 => (1024, 256),
            ParamSet::Bitleak2048 => (2048, 256),
            ParamSet::Psi83 => (2048, 83),
        };
        BfvParams::new(d, 1 << 54, t, DEFAULT_SIGMA).expect("valid built-in parameters")
    }

    pub fn summary(self) -> ParamSummary {
        ParamSummary::new(&self.params(), Some(self.name()))
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamSet {
    type Err = BfvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamSet::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| BfvError::UnknownParamSet(s.to_string()))
    }
}
