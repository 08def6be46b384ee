use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    alice_finish, alice_query, bob_respond, expect_kind, expect_session, AliceMode, AliceState,
    BobState, BobStrategy, MessageKind, Outcome, Payload, ProtocolError, SessionRegistry,
    WireMessage,
};
use crate::attacks::{OracleError, ZeroCheckOracle};
use crate::bfv::codec::Envelope;
use crate::bfv::{
    decrypt, BfvParams, Ciphertext, EncryptionWitness, ParamSummary, Plaintext, PublicKey,
    SecretKey,
};
use crate::ring::reduce_centered;

#[derive(Debug, Clone)]
pub struct AliceInputs {
    pub m_a: i64,
    /// Long-lived key pair; a fresh one is generated when absent.
    pub keys: Option<(SecretKey, PublicKey)>,
    pub mode: AliceMode,
}

#[derive(Debug, Clone)]
pub struct BobInputs {
    pub m_b: i64,
    /// Drawn uniformly from the nonzero residues mod t when absent.
    pub r: Option<i64>,
}

/// Ground truth kept next to the frames so a transcript can be re-checked
/// and attacked offline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub secret_key: Envelope,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Envelope>,
    pub m_a: i64,
    pub m_b: i64,
    pub r: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: ParamSummary,
    pub strategy: BobStrategy,
    pub frames: Vec<WireMessage>,
    pub outcome: Outcome,
    pub audit: Audit,
}

/// Runs one session end to end, passing every message through its byte
/// encoding.
pub fn run_session<R: Rng + ?Sized>(
    params: &BfvParams,
    alice: AliceInputs,
    bob: BobInputs,
    strategy: BobStrategy,
    registry: &mut SessionRegistry,
    rng: &mut R,
) -> Result<Transcript, ProtocolError> {
    let t = params.plain_modulus();
    let m_a = Plaintext::constant(alice.m_a, params);
    let (mut a, pk_frame) = match alice.keys {
        Some((sk, pk)) => AliceState::with_keys(params, sk, pk, m_a, alice.mode, rng),
        None => super::alice_init(params, m_a, alice.mode, rng),
    };
    let r = match bob.r {
        Some(r) => r,
        None => reduce_centered(rng.random_range(1..t) as i128, t),
    };
    let mut b = BobState::new(
        params,
        Plaintext::constant(bob.m_b, params),
        Plaintext::constant(r, params),
        strategy,
    )?;

    b.accept_pubkey(&pk_frame, registry)?;
    let query = alice_query(&mut a, rng)?;
    let response = bob_respond(&mut b, &query, rng)?;
    let (outcome, result) = alice_finish(&mut a, &response)?;
    b.observe_result(&result)?;

    let frames = [&pk_frame, &query, &response, &result]
        .into_iter()
        .map(|f| WireMessage::decode(f))
        .collect::<Result<Vec<_>, _>>()?;
    let audit = Audit {
        secret_key: Envelope::secret_key(a.secret_key(), params),
        witness: a.witness().map(|w| Envelope::witness(w, params)),
        m_a: a.input().coeffs()[0],
        m_b: b.input().coeffs()[0],
        r,
    };
    Ok(Transcript {
        params: ParamSummary::new(params, None),
        strategy,
        frames,
        outcome,
        audit,
    })
}

/// Checks frame order, session binding and that the `result` frame matches
/// the decryption of the response under `sk`.
pub fn replay_frames(
    frames: &[WireMessage],
    params: &BfvParams,
    sk: &SecretKey,
) -> Result<Outcome, ProtocolError> {
    const ORDER: [MessageKind; 4] = [
        MessageKind::PubKey,
        MessageKind::Query,
        MessageKind::Response,
        MessageKind::Result,
    ];
    if frames.len() != ORDER.len() {
        return Err(ProtocolError::FrameCount(frames.len()));
    }
    let session = frames[0].session_id;
    for (msg, kind) in frames.iter().zip(ORDER) {
        expect_session(msg, session)?;
        expect_kind(msg, kind)?;
    }
    let (Payload::PubKey(pk), Payload::Query(query), Payload::Response(resp), Payload::Result(res)) = (
        &frames[0].payload,
        &frames[1].payload,
        &frames[2].payload,
        &frames[3].payload,
    ) else {
        unreachable!("kinds checked")
    };
    pk.to_public_key(params)?;
    query.to_ciphertext(params)?;
    let response = resp.to_ciphertext(params)?;
    let outcome = Outcome::from_equal(decrypt(sk, &response, params)?.is_zero());
    if outcome.is_equal() != res.equal {
        return Err(ProtocolError::Inconsistent(format!(
            "result frame says equal={}, response decrypts to {outcome}",
            res.equal
        )));
    }
    Ok(outcome)
}

impl Transcript {
    pub fn bfv_params(&self) -> Result<BfvParams, ProtocolError> {
        Ok(self.params.to_params()?)
    }

    pub fn secret_key(&self) -> Result<SecretKey, ProtocolError> {
        Ok(self.audit.secret_key.to_secret_key(&self.bfv_params()?)?)
    }

    pub fn witness(&self) -> Result<Option<EncryptionWitness>, ProtocolError> {
        let params = self.bfv_params()?;
        Ok(self
            .audit
            .witness
            .as_ref()
            .map(|w| w.to_witness(&params))
            .transpose()?)
    }

    pub fn public_key(&self) -> Result<PublicKey, ProtocolError> {
        match self.frames.first().map(|f| &f.payload) {
            Some(Payload::PubKey(env)) => Ok(env.to_public_key(&self.bfv_params()?)?),
            _ => Err(ProtocolError::Inconsistent("no public key frame".into())),
        }
    }

    pub fn query(&self) -> Result<Ciphertext, ProtocolError> {
        match self.frames.get(1).map(|f| &f.payload) {
            Some(Payload::Query(env)) => Ok(env.to_ciphertext(&self.bfv_params()?)?),
            _ => Err(ProtocolError::Inconsistent("no query frame".into())),
        }
    }

    pub fn response(&self) -> Result<Ciphertext, ProtocolError> {
        match self.frames.get(2).map(|f| &f.payload) {
            Some(Payload::Response(env)) => Ok(env.to_ciphertext(&self.bfv_params()?)?),
            _ => Err(ProtocolError::Inconsistent("no response frame".into())),
        }
    }

    /// Re-verifies the frames and the recorded outcome. For strategies that
    /// evaluate the real circuit the outcome must also agree with the
    /// recorded inputs.
    pub fn replay(&self) -> Result<Outcome, ProtocolError> {
        let params = self.bfv_params()?;
        let outcome = replay_frames(&self.frames, &params, &self.secret_key()?)?;
        if outcome != self.outcome {
            return Err(ProtocolError::Inconsistent(format!(
                "recorded outcome {} but frames give {outcome}",
                self.outcome
            )));
        }
        if !matches!(self.strategy, BobStrategy::MaliciousBitProbe { .. }) {
            let t = params.plain_modulus();
            let same = reduce_centered(self.audit.m_a as i128 - self.audit.m_b as i128, t) == 0;
            if same != outcome.is_equal() {
                return Err(ProtocolError::Inconsistent(format!(
                    "inputs {} and {} disagree with outcome {outcome}",
                    self.audit.m_a, self.audit.m_b
                )));
            }
        }
        Ok(outcome)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, ProtocolError> {
        serde_json::from_str(s).map_err(|e| ProtocolError::Frame(e.to_string()))
    }
}

/// A zero-check oracle backed by live protocol sessions: Alice reuses one
/// key pair, a malicious Bob answers session `i` with the probe for key bit
/// `i`, and the oracle reports what Bob learns from Alice's `result` frame.
///
/// Each call must present exactly the probe Bob sends in that session.
pub struct SessionOracle<R> {
    params: BfvParams,
    sk: SecretKey,
    pk: PublicKey,
    registry: SessionRegistry,
    rng: R,
    next_index: usize,
    calls: u64,
}

impl<R: Rng> SessionOracle<R> {
    pub fn new(params: &BfvParams, sk: SecretKey, pk: PublicKey, rng: R) -> Self {
        Self {
            params: *params,
            sk,
            pk,
            registry: SessionRegistry::new(),
            rng,
            next_index: 0,
            calls: 0,
        }
    }

    pub fn sessions(&self) -> usize {
        self.registry.len()
    }
}

impl<R: Rng> ZeroCheckOracle for SessionOracle<R> {
    fn is_zero(&mut self, ct: &Ciphertext) -> Result<bool, OracleError> {
        self.calls += 1;
        let index = self.next_index;
        self.next_index += 1;
        let alice = AliceInputs {
            m_a: 0,
            keys: Some((self.sk.clone(), self.pk.clone())),
            mode: AliceMode::Honest,
        };
        let bob = BobInputs { m_b: 0, r: None };
        let transcript = run_session(
            &self.params,
            alice,
            bob,
            BobStrategy::MaliciousBitProbe { index },
            &mut self.registry,
            &mut self.rng,
        )
        .map_err(|e| OracleError(e.to_string()))?;
        let sent = transcript
            .response()
            .map_err(|e| OracleError(e.to_string()))?;
        if &sent != ct {
            return Err(OracleError(format!(
                "session {index} carried a different ciphertext than requested"
            )));
        }
        Ok(transcript.outcome.is_equal())
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}
