//! Textbook BFV over `R_q = Z_q[x]/(x^d + 1)`.
//!
//! Keys: `s` binary, `pk = ([-(a*s + e)]_q, a)`. Encryption draws a binary
//! `u` and two independent Gaussian errors, and hands the randomness back to
//! the caller as an [`EncryptionWitness`]. Decryption computes
//! `tmp = [c0 + c1*s]_q` and rounds `tmp * t / q` half away from zero.
//!
//! Decryption never rejects a ciphertext: the attacks in this crate rely on
//! the decryptor happily processing anything it is handed.

pub mod codec;
mod params;

pub use params::{BfvParams, ParamSet, ParamSummary, DEFAULT_RELIN_BASE, DEFAULT_SIGMA};

use crate::ring::{
    sample_binary, sample_bounded_uniform, sample_uniform, GaussianSampler, Polynomial, RingError,
};
use rand::Rng;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum BfvError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("plaintext modulus {t} must satisfy 1 < t < q = {q}")]
    InvalidPlainModulus { t: u64, q: u64 },
    #[error("noise width {0} must be finite and non-negative")]
    InvalidSigma(f64),
    #[error("relinearization base {0} must be at least 2")]
    InvalidRelinBase(u64),
    #[error("unknown parameter set {0:?}")]
    UnknownParamSet(String),
    #[error("secret key coefficients must be 0 or 1")]
    NotBinary,
    #[error("plaintext has modulus {found}, expected t = {expected}")]
    PlaintextModulus { expected: u64, found: u64 },
    #[error("flood bound {bound} is not below delta/2 (delta = {delta})")]
    FloodTooLarge { bound: u64, delta: u64 },
}

/// Binary secret polynomial, stored modulo `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    s: Polynomial,
}

impl SecretKey {
    pub fn new(s: Polynomial) -> Result<Self, BfvError> {
        if s.coeffs().iter().any(|&c| c != 0 && c != 1) {
            return Err(BfvError::NotBinary);
        }
        Ok(Self { s })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.s
    }

    /// Key bits as booleans, lowest index first.
    pub fn bits(&self) -> Vec<bool> {
        self.s.coeffs().iter().map(|&c| c == 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub pk0: Polynomial,
    pub pk1: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaintext {
    m: Polynomial,
}

impl Plaintext {
    pub fn new(m: Polynomial, params: &BfvParams) -> Result<Self, BfvError> {
        if m.modulus() != params.plain_modulus() {
            return Err(BfvError::PlaintextModulus {
                expected: params.plain_modulus(),
                found: m.modulus(),
            });
        }
        if m.degree() != params.degree() {
            return Err(RingError::DegreeMismatch {
                left: params.degree(),
                right: m.degree(),
            }
            .into());
        }
        Ok(Self { m })
    }

    /// Reduces each value mod `t`; missing high coefficients are zero.
    pub fn from_coeffs(coeffs: &[i64], params: &BfvParams) -> Result<Self, BfvError> {
        let m = params.plain_ring().polynomial(coeffs.iter().copied())?;
        Ok(Self { m })
    }

    pub fn constant(c: i64, params: &BfvParams) -> Self {
        Self {
            m: params.plain_ring().constant(c as i128),
        }
    }

    pub fn zero(params: &BfvParams) -> Self {
        Self {
            m: params.plain_ring().zero(),
        }
    }

    pub fn random<R: Rng + ?Sized>(params: &BfvParams, rng: &mut R) -> Self {
        Self {
            m: sample_uniform(&params.plain_ring(), rng),
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.m
    }

    pub fn coeffs(&self) -> &[i64] {
        self.m.coeffs()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self, BfvError> {
        Ok(Self {
            m: self.m.add(&other.m)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, BfvError> {
        Ok(Self {
            m: self.m.sub(&other.m)?,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, BfvError> {
        Ok(Self {
            m: self.m.mul(&other.m)?,
        })
    }

    /// The centered coefficients read as integers mod `q`.
    fn lift(&self, params: &BfvParams) -> Polynomial {
        self.m.reduce_mod(params.modulus())
    }

    /// `[delta * m]_q`
    fn scaled(&self, params: &BfvParams) -> Polynomial {
        self.lift(params).scalar_mul(params.delta() as i128)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub c0: Polynomial,
    pub c1: Polynomial,
}

impl Ciphertext {
    /// `(delta * m, 0)`: a noiseless, keyless embedding of `m`.
    pub fn trivial(m: &Plaintext, params: &BfvParams) -> Self {
        Self {
            c0: m.scaled(params),
            c1: params.ring().zero(),
        }
    }
}

/// The randomness behind one encryption: `c0 = pk0*u + e1 + delta*m`,
/// `c1 = pk1*u + e2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptionWitness {
    pub u: Polynomial,
    pub e1: Polynomial,
    pub e2: Polynomial,
}

pub fn keygen<R: Rng + ?Sized>(params: &BfvParams, rng: &mut R) -> (SecretKey, PublicKey) {
    let ring = params.ring();
    let s = sample_binary(&ring, rng);
    let a = sample_uniform(&ring, rng);
    let e = params.gaussian().sample_poly(&ring, rng);
    let pk0 = a
        .mul(&s)
        .and_then(|as_| as_.add(&e))
        .expect("same ring")
        .neg();
    (SecretKey { s }, PublicKey { pk0, pk1: a })
}

/// The keygen error `e`, recovered as `-(pk0 + pk1*s)`.
pub fn public_key_error(sk: &SecretKey, pk: &PublicKey) -> Result<Polynomial, BfvError> {
    Ok(pk.pk0.add(&pk.pk1.mul(&sk.s)?)?.neg())
}

pub fn encrypt<R: Rng + ?Sized>(
    pk: &PublicKey,
    m: &Plaintext,
    params: &BfvParams,
    rng: &mut R,
) -> Result<(Ciphertext, EncryptionWitness), BfvError> {
    check_plaintext(m, params)?;
    let ring = params.ring();
    let gaussian = params.gaussian();
    let u = sample_binary(&ring, rng);
    let e1 = gaussian.sample_poly(&ring, rng);
    let e2 = gaussian.sample_poly(&ring, rng);
    let ct = encrypt_with(pk, m, &u, &e1, &e2, params)?;
    Ok((ct, EncryptionWitness { u, e1, e2 }))
}

fn encrypt_with(
    pk: &PublicKey,
    m: &Plaintext,
    u: &Polynomial,
    e1: &Polynomial,
    e2: &Polynomial,
    params: &BfvParams,
) -> Result<Ciphertext, BfvError> {
    let c0 = pk.pk0.mul(u)?.add(e1)?.add(&m.scaled(params))?;
    let c1 = pk.pk1.mul(u)?.add(e2)?;
    Ok(Ciphertext { c0, c1 })
}

/// `[c0 + c1*s]_q`, before any rounding.
pub fn decrypt_raw(
    sk: &SecretKey,
    ct: &Ciphertext,
    _params: &BfvParams,
) -> Result<Polynomial, BfvError> {
    Ok(ct.c0.add(&ct.c1.mul(&sk.s)?)?)
}

pub fn decrypt(sk: &SecretKey, ct: &Ciphertext, params: &BfvParams) -> Result<Plaintext, BfvError> {
    let raw = decrypt_raw(sk, ct, params)?;
    Ok(round_to_plaintext(&raw, params))
}

/// `[round(raw * t / q)]_t` coefficient-wise.
pub fn round_to_plaintext(raw: &Polynomial, params: &BfvParams) -> Plaintext {
    let t = params.plain_modulus();
    let q = params.modulus();
    let m = params
        .plain_ring()
        .polynomial(raw.coeffs().iter().map(|&c| round_scaled(c, t, q)))
        .expect("degree matches");
    Plaintext { m }
}

/// `round(x * t / q)`, ties away from zero, computed exactly.
pub fn round_scaled(x: i64, t: u64, q: u64) -> i128 {
    let num = x.unsigned_abs() as u128 * t as u128;
    let q = q as u128;
    let mut r = num / q;
    if 2 * (num % q) >= q {
        r += 1;
    }
    let r = r as i128;
    if x < 0 {
        -r
    } else {
        r
    }
}

pub fn add(a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext, BfvError> {
    Ok(Ciphertext {
        c0: a.c0.add(&b.c0)?,
        c1: a.c1.add(&b.c1)?,
    })
}

/// `(c0 + delta*m, c1)`; adds no noise.
pub fn add_plain(
    ct: &Ciphertext,
    m: &Plaintext,
    params: &BfvParams,
) -> Result<Ciphertext, BfvError> {
    check_plaintext(m, params)?;
    Ok(Ciphertext {
        c0: ct.c0.add(&m.scaled(params))?,
        c1: ct.c1.clone(),
    })
}

/// `(delta*m - c0, -c1)`, an encryption of `m - m_ct`.
pub fn sub_from_plain(
    m: &Plaintext,
    ct: &Ciphertext,
    params: &BfvParams,
) -> Result<Ciphertext, BfvError> {
    check_plaintext(m, params)?;
    Ok(Ciphertext {
        c0: m.scaled(params).sub(&ct.c0)?,
        c1: ct.c1.neg(),
    })
}

/// `(r*c0, r*c1)`. Noise grows by up to a factor `||r||_1`.
pub fn mul_plain(
    ct: &Ciphertext,
    r: &Plaintext,
    params: &BfvParams,
) -> Result<Ciphertext, BfvError> {
    check_plaintext(r, params)?;
    let r = r.lift(params);
    Ok(Ciphertext {
        c0: ct.c0.mul(&r)?,
        c1: ct.c1.mul(&r)?,
    })
}

/// A fresh encryption of zero whose `c0` error additionally carries
/// uniform noise from `[-flood_bound, flood_bound]`.
///
/// With `flood_bound == 0` no extra randomness is drawn, so the output is
/// exactly `encrypt(pk, 0)` for the same generator state.
pub fn encrypt_zero_flood<R: Rng + ?Sized>(
    pk: &PublicKey,
    params: &BfvParams,
    flood_bound: u64,
    rng: &mut R,
) -> Result<Ciphertext, BfvError> {
    if 2 * flood_bound as u128 >= params.delta() as u128 {
        return Err(BfvError::FloodTooLarge {
            bound: flood_bound,
            delta: params.delta(),
        });
    }
    let (mut ct, _) = encrypt(pk, &Plaintext::zero(params), params, rng)?;
    if flood_bound > 0 {
        let flood = sample_bounded_uniform(&params.ring(), flood_bound, rng);
        ct.c0 = ct.c0.add(&flood)?;
    }
    Ok(ct)
}

/// `||[decrypt_raw(ct) - delta*expected]_q||_inf`.
pub fn noise_norm(
    sk: &SecretKey,
    ct: &Ciphertext,
    expected: &Plaintext,
    params: &BfvParams,
) -> Result<u64, BfvError> {
    check_plaintext(expected, params)?;
    let raw = decrypt_raw(sk, ct, params)?;
    Ok(raw.sub(&expected.scaled(params))?.inf_norm())
}

/// The noise `e1 + e2*s - e*u` a fresh encryption made with `witness`
/// carries, where `e` is the keygen error.
pub fn witness_noise(
    sk: &SecretKey,
    pk: &PublicKey,
    witness: &EncryptionWitness,
) -> Result<Polynomial, BfvError> {
    let e = public_key_error(sk, pk)?;
    Ok(witness
        .e1
        .add(&witness.e2.mul(&sk.s)?)?
        .sub(&e.mul(&witness.u)?)?)
}

fn check_plaintext(m: &Plaintext, params: &BfvParams) -> Result<(), BfvError> {
    if m.m.modulus() != params.plain_modulus() {
        return Err(BfvError::PlaintextModulus {
            expected: params.plain_modulus(),
            found: m.m.modulus(),
        });
    }
    if m.m.degree() != params.degree() {
        return Err(RingError::DegreeMismatch {
            left: params.degree(),
            right: m.m.degree(),
        }
        .into());
    }
    Ok(())
}

impl BfvParams {
    pub(crate) fn gaussian(&self) -> GaussianSampler {
        GaussianSampler::new(self.sigma()).expect("sigma validated at construction")
    }
}
