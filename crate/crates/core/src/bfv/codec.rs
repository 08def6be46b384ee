//! JSON envelopes for keys, plaintexts, ciphertexts and witnesses.
//!
//! ```json
//! {"scheme":"bfv-toy","kind":"ciphertext","d":1024,"q":18014398509481984,
//!  "t":256,"sigma":3.2,"payload":[[...c0...],[...c1...]]}
//! ```
//!
//! Coefficients are signed decimals, lowest degree first.

use serde::{Deserialize, Serialize};

use super::{BfvError, BfvParams, Ciphertext, EncryptionWitness, Plaintext, PublicKey, SecretKey};
use crate::ring::{Polynomial, RingError};

pub const SCHEME: &str = "bfv-toy";

#[derive(thiserror::Error, Debug)]
pub enum CodecError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported scheme {0:?}")]
    Scheme(String),
    #[error("expected a {expected} envelope, found {found}")]
    Kind { expected: Kind, found: Kind },
    #[error("envelope parameters (d={d}, q={q}, t={t}) do not match the expected ones")]
    ParamMismatch { d: usize, q: u64, t: u64 },
    #[error("payload must hold {expected} polynomials, found {found}")]
    PayloadArity { expected: usize, found: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Bfv(#[from] BfvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    SecretKey,
    PublicKey,
    Plaintext,
    Ciphertext,
    Witness,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::SecretKey => "secret_key",
            Kind::PublicKey => "public_key",
            Kind::Plaintext => "plaintext",
            Kind::Ciphertext => "ciphertext",
            Kind::Witness => "witness",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub scheme: String,
    pub kind: Kind,
    pub d: usize,
    pub q: u64,
    pub t: u64,
    pub sigma: f64,
    pub payload: Vec<Vec<i64>>,
}

impl Envelope {
    fn new(kind: Kind, params: &BfvParams, polys: &[&Polynomial]) -> Self {
        Self {
            scheme: SCHEME.to_string(),
            kind,
            d: params.degree(),
            q: params.modulus(),
            t: params.plain_modulus(),
            sigma: params.sigma(),
            payload: polys.iter().map(|p| p.coeffs().to_vec()).collect(),
        }
    }

    pub fn secret_key(sk: &SecretKey, params: &BfvParams) -> Self {
        Self::new(Kind::SecretKey, params, &[sk.poly()])
    }

    pub fn public_key(pk: &PublicKey, params: &BfvParams) -> Self {
        Self::new(Kind::PublicKey, params, &[&pk.pk0, &pk.pk1])
    }

    pub fn plaintext(m: &Plaintext, params: &BfvParams) -> Self {
        Self::new(Kind::Plaintext, params, &[m.poly()])
    }

    pub fn ciphertext(ct: &Ciphertext, params: &BfvParams) -> Self {
        Self::new(Kind::Ciphertext, params, &[&ct.c0, &ct.c1])
    }

    pub fn witness(w: &EncryptionWitness, params: &BfvParams) -> Self {
        Self::new(Kind::Witness, params, &[&w.u, &w.e1, &w.e2])
    }

    /// Parameters described by the envelope itself (default `T`).
    pub fn params(&self) -> Result<BfvParams, CodecError> {
        self.check_scheme()?;
        Ok(BfvParams::new(self.d, self.q, self.t, self.sigma)?)
    }

    fn check_scheme(&self) -> Result<(), CodecError> {
        if self.scheme != SCHEME {
            return Err(CodecError::Scheme(self.scheme.clone()));
        }
        Ok(())
    }

    fn polys(
        &self,
        kind: Kind,
        arity: usize,
        params: &BfvParams,
    ) -> Result<Vec<Polynomial>, CodecError> {
        self.check_scheme()?;
        if self.kind != kind {
            return Err(CodecError::Kind {
                expected: kind,
                found: self.kind,
            });
        }
        if self.d != params.degree()
            || self.q != params.modulus()
            || self.t != params.plain_modulus()
        {
            return Err(CodecError::ParamMismatch {
                d: self.d,
                q: self.q,
                t: self.t,
            });
        }
        if self.payload.len() != arity {
            return Err(CodecError::PayloadArity {
                expected: arity,
                found: self.payload.len(),
            });
        }
        let modulus = if kind == Kind::Plaintext {
            self.t
        } else {
            self.q
        };
        self.payload
            .iter()
            .map(|coeffs| {
                if coeffs.len() != self.d {
                    return Err(RingError::WrongLength {
                        expected: self.d,
                        actual: coeffs.len(),
                    }
                    .into());
                }
                Ok(Polynomial::from_centered(coeffs.clone(), modulus)?)
            })
            .collect()
    }

    pub fn to_secret_key(&self, params: &BfvParams) -> Result<SecretKey, CodecError> {
        let [s] = take(self.polys(Kind::SecretKey, 1, params)?);
        Ok(SecretKey::new(s)?)
    }

    pub fn to_public_key(&self, params: &BfvParams) -> Result<PublicKey, CodecError> {
        let [pk0, pk1] = take(self.polys(Kind::PublicKey, 2, params)?);
        Ok(PublicKey { pk0, pk1 })
    }

    pub fn to_plaintext(&self, params: &BfvParams) -> Result<Plaintext, CodecError> {
        let [m] = take(self.polys(Kind::Plaintext, 1, params)?);
        Ok(Plaintext::new(m, params)?)
    }

    pub fn to_ciphertext(&self, params: &BfvParams) -> Result<Ciphertext, CodecError> {
        let [c0, c1] = take(self.polys(Kind::Ciphertext, 2, params)?);
        Ok(Ciphertext { c0, c1 })
    }

    pub fn to_witness(&self, params: &BfvParams) -> Result<EncryptionWitness, CodecError> {
        let [u, e1, e2] = take(self.polys(Kind::Witness, 3, params)?);
        Ok(EncryptionWitness { u, e1, e2 })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("envelope is always serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, CodecError> {
        Ok(serde_json::from_str(s)?)
    }
}

fn take<const N: usize>(v: Vec<Polynomial>) -> [Polynomial; N] {
    v.try_into().expect("arity checked")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfv::{encrypt, keygen};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> BfvParams {
        BfvParams::new(16, 1 << 30, 16, 3.2).unwrap()
    }

    #[test]
    fn keys_and_ciphertexts_roundtrip_through_json() {
        let params = small();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (sk, pk) = keygen(&params, &mut rng);
        let m = Plaintext::from_coeffs(&[1, -2, 7], &params).unwrap();
        let (ct, w) = encrypt(&pk, &m, &params, &mut rng).unwrap();

        let env = Envelope::from_json(&Envelope::secret_key(&sk, &params).to_json()).unwrap();
        assert_eq!(env.to_secret_key(&params).unwrap(), sk);
        let env = Envelope::from_json(&Envelope::public_key(&pk, &params).to_json()).unwrap();
        assert_eq!(env.to_public_key(&params).unwrap(), pk);
        let env = Envelope::from_json(&Envelope::ciphertext(&ct, &params).to_json()).unwrap();
        assert_eq!(env.to_ciphertext(&params).unwrap(), ct);
        let env = Envelope::from_json(&Envelope::plaintext(&m, &params).to_json()).unwrap();
        assert_eq!(env.to_plaintext(&params).unwrap(), m);
        let env = Envelope::from_json(&Envelope::witness(&w, &params).to_json()).unwrap();
        assert_eq!(env.to_witness(&params).unwrap(), w);
        assert_eq!(env.params().unwrap(), params);
    }

    #[test]
    fn json_shape_is_stable() {
        let params = BfvParams::new(2, 1 << 54, 256, 3.2).unwrap();
        let m = Plaintext::from_coeffs(&[1, -1], &params).unwrap();
        assert_eq!(
            Envelope::plaintext(&m, &params).to_json(),
            r#"{"scheme":"bfv-toy","kind":"plaintext","d":2,"q":18014398509481984,"t":256,"sigma":3.2,"payload":[[1,-1]]}"#
        );
    }

    #[test]
    fn rejects_wrong_kind_params_and_shape() {
        let params = small();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (sk, pk) = keygen(&params, &mut rng);
        let env = Envelope::public_key(&pk, &params);
        assert!(matches!(
            env.to_ciphertext(&params),
            Err(CodecError::Kind { .. })
        ));
        let other = BfvParams::new(16, 1 << 30, 17, 3.2).unwrap();
        assert!(matches!(
            env.to_public_key(&other),
            Err(CodecError::ParamMismatch { .. })
        ));
        let mut bad = Envelope::secret_key(&sk, &params);
        bad.payload[0][0] = 2;
        assert!(matches!(
            bad.to_secret_key(&params),
            Err(CodecError::Bfv(_))
        ));
        let mut bad = Envelope::secret_key(&sk, &params);
        bad.payload[0].pop();
        assert!(matches!(
            bad.to_secret_key(&params),
            Err(CodecError::Ring(_))
        ));
        let mut bad = Envelope::secret_key(&sk, &params);
        bad.scheme = "ckks".into();
        assert!(matches!(
            bad.to_secret_key(&params),
            Err(CodecError::Scheme(_))
        ));
        assert!(Envelope::from_json("{not json").is_err());
    }
}
