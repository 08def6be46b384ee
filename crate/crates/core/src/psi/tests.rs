use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::attacks::{bit_leak_attack, ZeroCheckOracle};

fn small() -> BfvParams {
    BfvParams::new(64, 1 << 54, 83, 3.2).unwrap()
}

fn honest(m_a: i64, m_b: i64) -> (AliceInputs, BobInputs) {
    (
        AliceInputs {
            m_a,
            keys: None,
            mode: AliceMode::Honest,
        },
        BobInputs { m_b, r: None },
    )
}

fn session(m_a: i64, m_b: i64, strategy: BobStrategy, seed: u64) -> Transcript {
    let (a, b) = honest(m_a, m_b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_session(
        &small(),
        a,
        b,
        strategy,
        &mut SessionRegistry::new(),
        &mut rng,
    )
    .unwrap()
}

#[test]
fn honest_sessions_are_correct() {
    for seed in 0..20 {
        let m = seed as i64 - 10;
        assert_eq!(
            session(m, m, BobStrategy::Honest, seed).outcome,
            Outcome::Equal
        );
        assert_eq!(
            session(m, m + 1, BobStrategy::Honest, seed).outcome,
            Outcome::NotEqual
        );
        // congruent mod t
        assert_eq!(
            session(m, m + 83, BobStrategy::Honest, seed).outcome,
            Outcome::Equal
        );
    }
}

#[test]
fn flooding_keeps_correctness() {
    let flood = BobStrategy::Flooding { bound: 1 << 30 };
    for seed in 0..20 {
        assert_eq!(session(5, 5, flood, seed).outcome, Outcome::Equal);
        assert_eq!(session(5, -5, flood, seed).outcome, Outcome::NotEqual);
    }
}

#[test]
fn malicious_probe_reveals_key_bit() {
    let params = small();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (sk, pk) = crate::bfv::keygen(&params, &mut rng);
    let mut registry = SessionRegistry::new();
    for index in 0..params.degree() {
        let alice = AliceInputs {
            m_a: 1,
            keys: Some((sk.clone(), pk.clone())),
            mode: AliceMode::Honest,
        };
        let bob = BobInputs { m_b: 1, r: None };
        let strategy = BobStrategy::MaliciousBitProbe { index };
        let t = run_session(&params, alice, bob, strategy, &mut registry, &mut rng).unwrap();
        assert_eq!(t.outcome.is_equal(), !sk.bits()[index]);
        assert_eq!(t.replay().unwrap(), t.outcome);
    }
    assert_eq!(registry.len(), params.degree());
}

#[test]
fn session_oracle_drives_the_bit_leak() {
    let params = small();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (sk, pk) = crate::bfv::keygen(&params, &mut rng);
    let mut oracle = SessionOracle::new(&params, sk.clone(), pk.clone(), rng);
    let got = bit_leak_attack(&mut oracle, &pk, &params).unwrap();
    assert_eq!(&got, &sk);
    assert_eq!(oracle.calls(), 64);
    assert_eq!(oracle.sessions(), 64);
}

#[test]
fn session_oracle_refuses_foreign_ciphertexts() {
    let params = small();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (sk, pk) = crate::bfv::keygen(&params, &mut rng);
    let mut oracle = SessionOracle::new(&params, sk, pk.clone(), rng);
    let wrong = crate::attacks::bit_leak_probe(&pk, 5, &params).unwrap();
    assert!(oracle.is_zero(&wrong).is_err());
}

#[test]
fn transcript_roundtrips_and_replays() {
    let t = session(7, 7, BobStrategy::Honest, 3);
    let back = Transcript::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.replay().unwrap(), Outcome::Equal);
    assert!(back.witness().unwrap().is_none());
}

#[test]
fn tampered_transcripts_fail_replay() {
    let t = session(7, 8, BobStrategy::Honest, 4);

    let mut flipped = t.clone();
    flipped.frames[3].payload = Payload::Result(ResultBody { equal: true });
    assert!(matches!(
        flipped.replay(),
        Err(ProtocolError::Inconsistent(_))
    ));

    let mut lied = t.clone();
    lied.outcome = Outcome::Equal;
    assert!(matches!(lied.replay(), Err(ProtocolError::Inconsistent(_))));

    let mut inputs = t.clone();
    inputs.audit.m_b = 7;
    assert!(matches!(
        inputs.replay(),
        Err(ProtocolError::Inconsistent(_))
    ));

    let mut moved = t.clone();
    moved.frames[2].session_id = SessionId(moved.frames[2].session_id.0 ^ 1);
    assert!(matches!(
        moved.replay(),
        Err(ProtocolError::SessionMismatch { .. })
    ));

    let mut short = t.clone();
    short.frames.pop();
    assert!(matches!(short.replay(), Err(ProtocolError::FrameCount(3))));
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn every_reordering_is_rejected() {
    let t = session(1, 2, BobStrategy::Honest, 5);
    let params = small();
    let sk = t.secret_key().unwrap();
    let perms = permutations(4);
    assert_eq!(perms.len(), 24);
    for p in perms {
        let frames: Vec<_> = p.iter().map(|&i| t.frames[i].clone()).collect();
        let got = replay_frames(&frames, &params, &sk);
        if p == [0, 1, 2, 3] {
            assert_eq!(got.unwrap(), Outcome::NotEqual);
        } else {
            assert!(
                matches!(got, Err(ProtocolError::UnexpectedMessage { .. })),
                "order {p:?} accepted"
            );
        }
    }
}

#[test]
fn live_state_machines_reject_out_of_order_messages() {
    let params = small();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut registry = SessionRegistry::new();
    let (mut alice, pk_frame) = alice_init(
        &params,
        Plaintext::constant(3, &params),
        AliceMode::Honest,
        &mut rng,
    );
    let mut bob = BobState::new(
        &params,
        Plaintext::constant(3, &params),
        Plaintext::constant(2, &params),
        BobStrategy::Honest,
    )
    .unwrap();

    // no response before the key arrives
    assert!(matches!(
        bob_respond(&mut bob, &pk_frame, &mut rng),
        Err(ProtocolError::WrongPhase { .. })
    ));
    bob.accept_pubkey(&pk_frame, &mut registry).unwrap();
    assert!(matches!(
        bob.accept_pubkey(&pk_frame, &mut registry),
        Err(ProtocolError::WrongPhase { .. })
    ));
    assert!(matches!(
        bob_respond(&mut bob, &pk_frame, &mut rng),
        Err(ProtocolError::UnexpectedMessage {
            expected: MessageKind::Query,
            found: MessageKind::PubKey
        })
    ));

    let query = alice_query(&mut alice, &mut rng).unwrap();
    assert_eq!(alice.phase(), AlicePhase::Sent);
    assert!(matches!(
        alice_query(&mut alice, &mut rng),
        Err(ProtocolError::WrongPhase { .. })
    ));
    assert!(matches!(
        alice_finish(&mut alice, &query),
        Err(ProtocolError::UnexpectedMessage { .. })
    ));

    let response = bob_respond(&mut bob, &query, &mut rng).unwrap();
    assert!(bob_respond(&mut bob, &query, &mut rng).is_err());
    let (outcome, result) = alice_finish(&mut alice, &response).unwrap();
    assert_eq!(outcome, Outcome::Equal);
    assert_eq!(alice.phase(), AlicePhase::Done);
    assert!(alice_finish(&mut alice, &response).is_err());
    assert_eq!(bob.observe_result(&result).unwrap(), Outcome::Equal);
    assert_eq!(bob.phase(), BobPhase::Done);
}

#[test]
fn replayed_session_is_rejected() {
    let params = small();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut registry = SessionRegistry::new();
    let (_, pk_frame) = alice_init(
        &params,
        Plaintext::zero(&params),
        AliceMode::Honest,
        &mut rng,
    );
    let bob = || {
        BobState::new(
            &params,
            Plaintext::zero(&params),
            Plaintext::constant(1, &params),
            BobStrategy::Honest,
        )
        .unwrap()
    };
    bob().accept_pubkey(&pk_frame, &mut registry).unwrap();
    assert!(matches!(
        bob().accept_pubkey(&pk_frame, &mut registry),
        Err(ProtocolError::ReplayedSession(_))
    ));
}

#[test]
fn cross_session_frames_are_rejected() {
    let params = small();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut registry = SessionRegistry::new();
    let m = || Plaintext::constant(1, &params);
    let (mut a1, pk1) = alice_init(&params, m(), AliceMode::Honest, &mut rng);
    let (mut a2, _) = alice_init(&params, m(), AliceMode::Honest, &mut rng);
    let mut b = BobState::new(&params, m(), m(), BobStrategy::Honest).unwrap();
    b.accept_pubkey(&pk1, &mut registry).unwrap();
    let _ = alice_query(&mut a1, &mut rng).unwrap();
    let q2 = alice_query(&mut a2, &mut rng).unwrap();
    assert!(matches!(
        bob_respond(&mut b, &q2, &mut rng),
        Err(ProtocolError::SessionMismatch { .. })
    ));
}

#[test]
fn zero_multiplier_rejected() {
    let params = small();
    let z = Plaintext::zero(&params);
    assert!(matches!(
        BobState::new(&params, z.clone(), z.clone(), BobStrategy::Honest),
        Err(ProtocolError::ZeroMultiplier)
    ));
    assert!(BobState::new(
        &params,
        z.clone(),
        z,
        BobStrategy::MaliciousBitProbe { index: 0 }
    )
    .is_ok());
}

#[test]
fn strategy_serialization() {
    let s = serde_json::to_string(&BobStrategy::Flooding { bound: 8 }).unwrap();
    assert_eq!(s, r#"{"type":"flooding","bound":8}"#);
    let s = serde_json::to_string(&BobStrategy::MaliciousBitProbe { index: 3 }).unwrap();
    assert_eq!(s, r#"{"type":"malicious-bit-probe","index":3}"#);
    assert_eq!(Outcome::NotEqual.to_string(), "NOT-EQUAL");
}
