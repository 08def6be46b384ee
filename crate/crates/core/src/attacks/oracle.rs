use crate::bfv::{decrypt, BfvError, BfvParams, Ciphertext, Plaintext, SecretKey};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
#[error("{0}")]
pub struct OracleError(pub String);

impl From<BfvError> for OracleError {
    fn from(e: BfvError) -> Self {
        OracleError(e.to_string())
    }
}

/// Returns the full decryption of any ciphertext it is shown.
pub trait DecryptionOracle {
    fn decrypt(&mut self, ct: &Ciphertext) -> Result<Plaintext, OracleError>;
    fn calls(&self) -> u64;
}

/// Reveals a single bit per query: whether the ciphertext decrypts to zero.
pub trait ZeroCheckOracle {
    fn is_zero(&mut self, ct: &Ciphertext) -> Result<bool, OracleError>;
    fn calls(&self) -> u64;
}

/// Wraps a closure and counts invocations.
pub struct CountingOracle<F> {
    f: F,
    calls: u64,
}

impl<F> CountingOracle<F> {
    pub fn new(f: F) -> Self {
        Self { f, calls: 0 }
    }
}

impl<F> DecryptionOracle for CountingOracle<F>
where
    F: FnMut(&Ciphertext) -> Result<Plaintext, OracleError>,
{
    fn decrypt(&mut self, ct: &Ciphertext) -> Result<Plaintext, OracleError> {
        self.calls += 1;
        (self.f)(ct)
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

impl<F> ZeroCheckOracle for CountingOracle<F>
where
    F: FnMut(&Ciphertext) -> Result<bool, OracleError>,
{
    fn is_zero(&mut self, ct: &Ciphertext) -> Result<bool, OracleError> {
        self.calls += 1;
        (self.f)(ct)
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

pub fn honest_decryptor<'a>(
    sk: &'a SecretKey,
    params: &'a BfvParams,
) -> CountingOracle<impl FnMut(&Ciphertext) -> Result<Plaintext, OracleError> + 'a> {
    CountingOracle::new(move |ct: &Ciphertext| Ok(decrypt(sk, ct, params)?))
}

pub fn honest_zero_check<'a>(
    sk: &'a SecretKey,
    params: &'a BfvParams,
) -> CountingOracle<impl FnMut(&Ciphertext) -> Result<bool, OracleError> + 'a> {
    CountingOracle::new(move |ct: &Ciphertext| Ok(decrypt(sk, ct, params)?.is_zero()))
}
