//! Single-element private equality test built from BFV.
//!
//! 1. Alice sends her public key.
//! 2. Alice sends `c_a = Enc(m_a)`.
//! 3. Bob answers `c_ab = r * (m_b - c_a)` for a random nonzero `r`.
//! 4. Alice decrypts; zero means `m_a == m_b`. Her verdict is emitted as a
//!    `result` frame, which is what a curious Bob gets to observe.
//!
//! Both parties are explicit state machines that only exchange encoded
//! frames, so every hop goes through [`WireMessage::encode`] and
//! [`WireMessage::decode`].

mod session;
mod wire;

pub use session::{
    replay_frames, run_session, AliceInputs, Audit, BobInputs, SessionOracle, Transcript,
};
pub use wire::{MessageKind, Payload, ResultBody, SessionId, WireMessage};

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::{bit_leak_probe, AttackError};
use crate::bfv::codec::{CodecError, Envelope};
use crate::bfv::{
    add, decrypt, encrypt, encrypt_zero_flood, keygen, mul_plain, sub_from_plain, BfvError,
    BfvParams, Ciphertext, EncryptionWitness, Plaintext, PublicKey, SecretKey,
};

#[derive(thiserror::Error, Debug)]
pub enum ProtocolError {
    #[error("malformed frame: {0}")]
    Frame(String),
    #[error("expected a {expected} message, got {found}")]
    UnexpectedMessage {
        expected: MessageKind,
        found: MessageKind,
    },
    #[error("message for session {found} arrived in session {expected}")]
    SessionMismatch {
        expected: SessionId,
        found: SessionId,
    },
    #[error("session {0} was already used")]
    ReplayedSession(SessionId),
    #[error("{party} cannot {action} in its current phase")]
    WrongPhase {
        party: &'static str,
        action: &'static str,
    },
    #[error("the evaluator's multiplier r must be nonzero")]
    ZeroMultiplier,
    #[error("transcript has {0} frames, expected 4")]
    FrameCount(usize),
    #[error("transcript is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Bfv(#[from] BfvError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Equal,
    NotEqual,
}

impl Outcome {
    pub fn from_equal(equal: bool) -> Self {
        if equal {
            Outcome::Equal
        } else {
            Outcome::NotEqual
        }
    }

    pub fn is_equal(self) -> bool {
        self == Outcome::Equal
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Equal => "EQUAL",
            Outcome::NotEqual => "NOT-EQUAL",
        })
    }
}

/// How Bob answers the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum BobStrategy {
    Honest,
    /// Honest evaluation plus a flooded encryption of zero.
    Flooding {
        bound: u64,
    },
    /// Ignores the query and returns the key-bit probe for `index`.
    MaliciousBitProbe {
        index: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliceMode {
    Honest,
    /// Keeps the encryption randomness of her query.
    RetainWitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlicePhase {
    Init,
    Sent,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BobPhase {
    AwaitingKey,
    AwaitingQuery,
    Responded,
    Done,
}

/// Session ids Bob has already accepted.
#[derive(Debug, Default, Clone)]
pub struct SessionRegistry {
    seen: BTreeSet<SessionId>,
}

impl SessionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, id: SessionId) -> Result<(), ProtocolError> {
        if !self.seen.insert(id) {
            return Err(ProtocolError::ReplayedSession(id));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

fn expect_kind(msg: &WireMessage, expected: MessageKind) -> Result<(), ProtocolError> {
    if msg.kind() != expected {
        return Err(ProtocolError::UnexpectedMessage {
            expected,
            found: msg.kind(),
        });
    }
    Ok(())
}

fn expect_session(msg: &WireMessage, expected: SessionId) -> Result<(), ProtocolError> {
    if msg.session_id != expected {
        return Err(ProtocolError::SessionMismatch {
            expected,
            found: msg.session_id,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct AliceState {
    params: BfvParams,
    sk: SecretKey,
    pk: PublicKey,
    m_a: Plaintext,
    mode: AliceMode,
    witness: Option<EncryptionWitness>,
    phase: AlicePhase,
    session_id: SessionId,
    outcome: Option<Outcome>,
}

/// Fresh key pair and session; returns the `pub_key` frame.
pub fn alice_init<R: Rng + ?Sized>(
    params: &BfvParams,
    m_a: Plaintext,
    mode: AliceMode,
    rng: &mut R,
) -> (AliceState, Vec<u8>) {
    let (sk, pk) = keygen(params, rng);
    AliceState::with_keys(params, sk, pk, m_a, mode, rng)
}

pub fn alice_query<R: Rng + ?Sized>(
    state: &mut AliceState,
    rng: &mut R,
) -> Result<Vec<u8>, ProtocolError> {
    if state.phase != AlicePhase::Init {
        return Err(ProtocolError::WrongPhase {
            party: "alice",
            action: "send a query",
        });
    }
    let (c_a, witness) = encrypt(&state.pk, &state.m_a, &state.params, rng)?;
    if state.mode == AliceMode::RetainWitness {
        state.witness = Some(witness);
    }
    state.phase = AlicePhase::Sent;
    Ok(WireMessage {
        session_id: state.session_id,
        payload: Payload::Query(Envelope::ciphertext(&c_a, &state.params)),
    }
    .encode())
}

/// Decrypts Bob's response and emits the `result` frame.
pub fn alice_finish(
    state: &mut AliceState,
    response: &[u8],
) -> Result<(Outcome, Vec<u8>), ProtocolError> {
    let msg = WireMessage::decode(response)?;
    expect_session(&msg, state.session_id)?;
    expect_kind(&msg, MessageKind::Response)?;
    if state.phase != AlicePhase::Sent {
        return Err(ProtocolError::WrongPhase {
            party: "alice",
            action: "accept a response",
        });
    }
    let Payload::Response(env) = &msg.payload else {
        unreachable!("kind checked")
    };
    let c_ab = env.to_ciphertext(&state.params)?;
    let outcome = Outcome::from_equal(decrypt(&state.sk, &c_ab, &state.params)?.is_zero());
    state.phase = AlicePhase::Done;
    state.outcome = Some(outcome);
    let frame = WireMessage {
        session_id: state.session_id,
        payload: Payload::Result(ResultBody {
            equal: outcome.is_equal(),
        }),
    }
    .encode();
    Ok((outcome, frame))
}

impl AliceState {
    /// Reuses a long-lived key pair for a new session.
    pub fn with_keys<R: Rng + ?Sized>(
        params: &BfvParams,
        sk: SecretKey,
        pk: PublicKey,
        m_a: Plaintext,
        mode: AliceMode,
        rng: &mut R,
    ) -> (Self, Vec<u8>) {
        let session_id = SessionId(rng.random());
        let frame = WireMessage {
            session_id,
            payload: Payload::PubKey(Envelope::public_key(&pk, params)),
        }
        .encode();
        let state = Self {
            params: *params,
            sk,
            pk,
            m_a,
            mode,
            witness: None,
            phase: AlicePhase::Init,
            session_id,
            outcome: None,
        };
        (state, frame)
    }

    pub fn phase(&self) -> AlicePhase {
        self.phase
    }

    pub fn session_id(&self) -> SessionId {
        self.session_id
    }

    pub fn secret_key(&self) -> &SecretKey {
        &self.sk
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.pk
    }

    pub fn input(&self) -> &Plaintext {
        &self.m_a
    }

    pub fn witness(&self) -> Option<&EncryptionWitness> {
        self.witness.as_ref()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }
}

#[derive(Debug, Clone)]
pub struct BobState {
    params: BfvParams,
    m_b: Plaintext,
    r: Plaintext,
    strategy: BobStrategy,
    phase: BobPhase,
    session_id: Option<SessionId>,
    pk: Option<PublicKey>,
    observed: Option<Outcome>,
}

impl BobState {
    pub fn new(
        params: &BfvParams,
        m_b: Plaintext,
        r: Plaintext,
        strategy: BobStrategy,
    ) -> Result<Self, ProtocolError> {
        if r.is_zero() && !matches!(strategy, BobStrategy::MaliciousBitProbe { .. }) {
            return Err(ProtocolError::ZeroMultiplier);
        }
        Ok(Self {
            params: *params,
            m_b,
            r,
            strategy,
            phase: BobPhase::AwaitingKey,
            session_id: None,
            pk: None,
            observed: None,
        })
    }

    pub fn accept_pubkey(
        &mut self,
        frame: &[u8],
        registry: &mut SessionRegistry,
    ) -> Result<(), ProtocolError> {
        let msg = WireMessage::decode(frame)?;
        expect_kind(&msg, MessageKind::PubKey)?;
        if self.phase != BobPhase::AwaitingKey {
            return Err(ProtocolError::WrongPhase {
                party: "bob",
                action: "accept a public key",
            });
        }
        let Payload::PubKey(env) = &msg.payload else {
            unreachable!("kind checked")
        };
        let pk = env.to_public_key(&self.params)?;
        registry.register(msg.session_id)?;
        self.pk = Some(pk);
        self.session_id = Some(msg.session_id);
        self.phase = BobPhase::AwaitingQuery;
        Ok(())
    }

    /// Reads Alice's `result` frame, i.e. the one bit that leaks back.
    pub fn observe_result(&mut self, frame: &[u8]) -> Result<Outcome, ProtocolError> {
        let msg = WireMessage::decode(frame)?;
        if let Some(id) = self.session_id {
            expect_session(&msg, id)?;
        }
        expect_kind(&msg, self.expected_kind())?;
        if self.phase != BobPhase::Responded {
            return Err(ProtocolError::WrongPhase {
                party: "bob",
                action: "observe a result",
            });
        }
        let Payload::Result(body) = msg.payload else {
            unreachable!("kind checked")
        };
        let outcome = Outcome::from_equal(body.equal);
        self.observed = Some(outcome);
        self.phase = BobPhase::Done;
        Ok(outcome)
    }

    fn expected_kind(&self) -> MessageKind {
        match self.phase {
            BobPhase::AwaitingKey => MessageKind::PubKey,
            BobPhase::AwaitingQuery => MessageKind::Query,
            BobPhase::Responded | BobPhase::Done => MessageKind::Result,
        }
    }

    pub fn phase(&self) -> BobPhase {
        self.phase
    }

    pub fn strategy(&self) -> BobStrategy {
        self.strategy
    }

    pub fn input(&self) -> &Plaintext {
        &self.m_b
    }

    pub fn multiplier(&self) -> &Plaintext {
        &self.r
    }

    pub fn observed(&self) -> Option<Outcome> {
        self.observed
    }
}

/// Evaluates `r * (m_b - c_a)` (or the strategy's variant of it) and
/// returns the `response` frame.
pub fn bob_respond<R: Rng + ?Sized>(
    state: &mut BobState,
    query: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>, ProtocolError> {
    let msg = WireMessage::decode(query)?;
    if let Some(id) = state.session_id {
        expect_session(&msg, id)?;
    }
    expect_kind(&msg, state.expected_kind())?;
    if state.phase != BobPhase::AwaitingQuery {
        return Err(ProtocolError::WrongPhase {
            party: "bob",
            action: "respond",
        });
    }
    let Payload::Query(env) = &msg.payload else {
        unreachable!("kind checked")
    };
    let params = state.params;
    let c_a = env.to_ciphertext(&params)?;
    let pk = state.pk.as_ref().expect("set with the public key");
    let c_ab = match state.strategy {
        BobStrategy::Honest => evaluate(&c_a, state, &params)?,
        BobStrategy::Flooding { bound } => {
            let zero = encrypt_zero_flood(pk, &params, bound, rng)?;
            add(&evaluate(&c_a, state, &params)?, &zero)?
        }
        BobStrategy::MaliciousBitProbe { index } => bit_leak_probe(pk, index, &params)?,
    };
    state.phase = BobPhase::Responded;
    Ok(WireMessage {
        session_id: msg.session_id,
        payload: Payload::Response(Envelope::ciphertext(&c_ab, &params)),
    }
    .encode())
}

fn evaluate(c_a: &Ciphertext, bob: &BobState, params: &BfvParams) -> Result<Ciphertext, BfvError> {
    mul_plain(&sub_from_plain(&bob.m_b, c_a, params)?, &bob.r, params)
}

#[cfg(test)]
mod tests;
