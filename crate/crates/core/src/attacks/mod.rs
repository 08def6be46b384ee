//! Key- and data-recovery attacks against the toy BFV scheme.
//!
//! Each attack talks to the victim only through an oracle trait, so the
//! same code runs against an in-process key holder or against a live
//! protocol session (see [`crate::psi::SessionOracle`]).

mod bit_leak;
mod cca;
mod circuit;
mod encoder_leak;
mod oracle;

pub use bit_leak::{bit_leak_attack, bit_leak_probe, probe_margin, probe_multiplier, ProbeMargin};
pub use cca::cca_one_query;
pub use circuit::circuit_privacy_recover;
pub use encoder_leak::{encoder_leak_demo, format_poly, EncoderLeakTranscript, MillionaireRun};
pub use oracle::{
    honest_decryptor, honest_zero_check, CountingOracle, DecryptionOracle, OracleError,
    ZeroCheckOracle,
};

use crate::bfv::BfvError;
use crate::encoders::EncodingError;
use crate::ring::RingError;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum AttackError {
    #[error("oracle failed: {0}")]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bfv(#[from] BfvError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("recovered coefficient {value} at index {index} is not a key bit")]
    NonBinaryRecovery { index: usize, value: i64 },
    #[error("insufficient-noise-structure: no nonzero non-constant noise coefficient")]
    InsufficientNoiseStructure,
    #[error("flooded-or-malformed: {0}")]
    FloodedOrMalformed(String),
    #[error("ambiguous recovery: {0} candidate values for m_b")]
    Ambiguous(usize),
    #[error("operand must be a constant polynomial")]
    NotScalar,
}

impl From<RingError> for AttackError {
    fn from(e: RingError) -> Self {
        AttackError::Bfv(e.into())
    }
}
