use std::net::TcpStream;
use std::path::PathBuf;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use tbids_core::codec::{self, ObjectKind};
use tbids_core::{EpochConfig, IdentityVector, SchemeKind, TbidsParams, VerifyingKey};
use tbids_harness::auth::{PresharedKey, PushAuthenticator};
use tbids_harness::client::{self, ClientConfig, Outcome, RejectKind};
use tbids_harness::clock::ManualClock;
use tbids_harness::edge::{EdgeConfig, EdgeServer, Received};
use tbids_harness::keyserver::{init_state, Keyserver, KeyserverConfig, KeyserverError};
use tbids_harness::messages::{pk_fingerprint, Hello, SignedResponse};
use tbids_harness::store::{lock_state, LockError};
use tbids_harness::wire::{read_frame, write_frame, Frame, MessageType, RejectReason};

const T0: u64 = 1_000_000;
const LEN: u64 = 60;

struct World {
    _dir: tempfile::TempDir,
    state: PathBuf,
    params: Arc<TbidsParams>,
    clock: ManualClock,
    edge: EdgeServer,
    edge_cfg: EdgeConfig,
    keyserver: Keyserver,
    client: ClientConfig,
    auth: Arc<PresharedKey>,
    rng: ChaCha20Rng,
}

fn at(epoch: u64) -> u64 {
    T0 + epoch * LEN + LEN / 2
}

fn world(seed: u64) -> World {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let params = Arc::new(TbidsParams::setup(16, 1, &mut rng).unwrap());
    let epochs = EpochConfig::new(T0, LEN, 1).unwrap();
    let identity = IdentityVector::single(b"edge.example".to_vec()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state");
    let pk = init_state(&state, &params, &mut rng).unwrap();
    let clock = ManualClock::new(at(0));
    let auth = Arc::new(PresharedKey::new([3; 32]));
    let edge_cfg = EdgeConfig {
        params: params.clone(),
        epochs,
        pk_ref: pk_fingerprint(&pk),
        clock: Arc::new(clock.clone()),
        auth: auth.clone(),
    };
    let edge = EdgeServer::spawn("127.0.0.1:0", edge_cfg.clone()).unwrap();
    let keyserver = Keyserver::new(
        KeyserverConfig {
            params: params.clone(),
            epochs,
            identity: identity.clone(),
            edge: edge.addr(),
            auth: auth.clone(),
            push_attempts: 2,
            backoff: Duration::from_millis(2),
            timeout: Duration::from_secs(2),
        },
        &state,
    );
    let client = ClientConfig {
        params: TbidsParams::clone(&params),
        vk: VerifyingKey { scheme: SchemeKind::ForwardSecure, pk },
        epochs,
        expected: identity,
        timeout: Duration::from_secs(5),
    };
    World { _dir: dir, state, params, clock, edge, edge_cfg, keyserver, client, auth, rng }
}

impl World {
    fn tick(&mut self, epoch: u64) {
        self.clock.set(at(epoch));
        self.keyserver.step(at(epoch), &mut self.rng, None).unwrap();
    }

    fn connect(&mut self, client_epoch: u64) -> Outcome {
        client::connect(self.edge.addr(), &self.client, at(client_epoch), &mut self.rng)
    }

    /// One raw handshake; returns the client nonce and the response.
    fn capture(&mut self) -> ([u8; 32], SignedResponse) {
        let nonce = [9u8; 32];
        let mut s = TcpStream::connect(self.edge.addr()).unwrap();
        let hello = Hello { client_nonce: nonce, server_name: self.client.expected.clone() };
        write_frame(&mut s, &Frame::new(MessageType::Hello, hello.encode())).unwrap();
        let frame = read_frame(&mut s).unwrap();
        assert_eq!(frame.kind, MessageType::SignedResponse);
        (nonce, SignedResponse::decode(&frame.payload).unwrap())
    }
}

#[test]
fn honest_round_trip_accepts() {
    let mut w = world(1);
    w.tick(0);
    assert_eq!(w.connect(0), Outcome::Accept { epoch: 0 });
}

#[test]
fn ticks_deliver_keys_ahead_of_time() {
    let mut w = world(2);
    let mut last = 0;
    for e in 1..=3 {
        w.tick(e);
        assert_eq!(w.edge.held_epochs(&w.client.expected), vec![e, e + 1]);
        let persisted = w.keyserver.load_state().unwrap().current_epoch();
        assert!(persisted > last);
        last = persisted;
        assert_eq!(w.connect(e), Outcome::Accept { epoch: e });
    }
}

#[test]
fn expired_keys_are_not_used() {
    let mut w = world(3);
    w.tick(0);
    w.clock.set(at(2));
    assert_eq!(w.connect(2), Outcome::Reject(RejectKind::Edge(RejectReason::NoValidKey)));
}

#[test]
fn replayed_old_epoch_signature_rejected() {
    let mut w = world(4);
    w.tick(2);
    w.edge.set_stale(true);
    w.clock.set(at(4));
    // the edge still signs with its epoch-2 key; the client is at epoch 4
    assert_eq!(w.connect(4), Outcome::Reject(RejectKind::BadSignature));
    assert_eq!(w.connect(3), Outcome::Accept { epoch: 2 });
}

#[test]
fn client_decision_is_pure_and_time_bound() {
    let mut w = world(5);
    w.tick(6);
    let (nonce, resp) = w.capture();
    let judge = |epoch: u64| client::evaluate(&w.client, nonce, &resp, at(epoch));
    assert_eq!(judge(6), judge(6));
    assert_eq!(judge(6), Outcome::Accept { epoch: 6 });
    assert_eq!(judge(5), Outcome::Accept { epoch: 6 });
    assert_eq!(judge(7), Outcome::Accept { epoch: 6 });
    // one window past the epoch
    assert_eq!(judge(8), Outcome::Reject(RejectKind::BadSignature));
    assert_eq!(judge(4), Outcome::Reject(RejectKind::BadSignature));
    let mut other_nonce = nonce;
    other_nonce[0] ^= 1;
    assert_eq!(
        client::evaluate(&w.client, other_nonce, &resp, at(6)),
        Outcome::Reject(RejectKind::BadSignature)
    );
    let mut wrong_pk = resp.clone();
    wrong_pk.pk_ref[0] ^= 1;
    assert_eq!(
        client::evaluate(&w.client, nonce, &wrong_pk, at(6)),
        Outcome::Reject(RejectKind::PublicKeyMismatch)
    );
    let mut wrong_id = resp.clone();
    wrong_id.identity = IdentityVector::single(b"evil.example".to_vec()).unwrap();
    assert_eq!(
        client::evaluate(&w.client, nonce, &wrong_id, at(6)),
        Outcome::Reject(RejectKind::IdentityMismatch)
    );
}

#[test]
fn fifty_concurrent_clients_verify() {
    let mut w = world(6);
    w.tick(1);
    let addr = w.edge.addr();
    let handles: Vec<_> = (0..50u64)
        .map(|i| {
            let cfg = w.client.clone();
            thread::spawn(move || {
                let mut rng = ChaCha20Rng::seed_from_u64(100 + i);
                client::connect(addr, &cfg, at(1), &mut rng)
            })
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), Outcome::Accept { epoch: 1 });
    }
}

#[test]
fn edge_only_ever_sees_delegated_keys() {
    let mut w = world(7);
    for e in 0..4 {
        w.tick(e);
        w.connect(e);
    }
    let received = w.edge.received();
    assert!(received.contains(&Received::Push(ObjectKind::DelegatedEpochKey)));
    for r in &received {
        match r {
            Received::Push(kind) => assert_eq!(*kind, ObjectKind::DelegatedEpochKey),
            Received::Frame(t) => assert!(matches!(t, MessageType::PushKey | MessageType::Hello)),
        }
    }
}

fn push_raw(w: &World, payload: Vec<u8>) -> Frame {
    let mut s = TcpStream::connect(w.edge.addr()).unwrap();
    write_frame(&mut s, &Frame::new(MessageType::PushKey, payload)).unwrap();
    read_frame(&mut s).unwrap()
}

#[test]
fn edge_refuses_bad_pushes() {
    let w = world(8);
    let state = std::fs::read(&w.state).unwrap();
    // authenticated but not a delegated key
    let reply = push_raw(&w, w.auth.seal(&state));
    assert_eq!(reply, Frame::new(MessageType::Reject, vec![RejectReason::Malformed as u8]));
    // wrong key
    let reply = push_raw(&w, PresharedKey::new([4; 32]).seal(&state));
    assert_eq!(reply, Frame::new(MessageType::Reject, vec![RejectReason::Unauthenticated as u8]));
    assert!(w.edge.held_epochs(&w.client.expected).is_empty());
    assert!(w.edge.received().contains(&Received::Push(ObjectKind::FsState)));
}

#[test]
fn edge_outage_is_repaired_on_next_step() {
    let mut w = world(9);
    w.tick(0);
    let addr = w.edge.addr();
    let decoy = EdgeServer::spawn("127.0.0.1:0", w.edge_cfg.clone()).unwrap();
    let old = std::mem::replace(&mut w.edge, decoy);
    old.shutdown();
    // keyserver still points at the old address, now closed
    w.clock.set(at(1));
    let report = w.keyserver.step(at(1), &mut w.rng, None).unwrap();
    assert_eq!(report.push_failed, vec![1, 2]);
    assert_eq!(report.state_epoch, 3);
    let revived = EdgeServer::spawn(addr, w.edge_cfg.clone()).unwrap();
    let report = w.keyserver.step(at(1), &mut w.rng, None).unwrap();
    assert_eq!(report.pushed, vec![1, 2]);
    assert_eq!(revived.held_epochs(&w.client.expected), vec![1, 2]);
    assert_eq!(
        client::connect(addr, &w.client, at(1), &mut w.rng),
        Outcome::Accept { epoch: 1 }
    );
}

#[test]
fn keyserver_skips_past_epochs_after_downtime() {
    let mut w = world(10);
    w.tick(0);
    w.tick(9);
    assert_eq!(w.edge.held_epochs(&w.client.expected), vec![9, 10]);
    assert_eq!(w.keyserver.load_state().unwrap().current_epoch(), 11);
    assert_eq!(w.connect(9), Outcome::Accept { epoch: 9 });
}

#[test]
fn keyserver_respects_state_lock() {
    let mut w = world(11);
    let _held = lock_state(&w.state).unwrap();
    assert!(matches!(
        w.keyserver.step(at(0), &mut w.rng, None),
        Err(KeyserverError::Lock(LockError::Busy(_)))
    ));
}

#[test]
fn keyserver_runs_to_the_last_epoch() {
    let mut w = world(12);
    for e in 0..16 {
        w.tick(e);
    }
    assert_eq!(w.keyserver.load_state().unwrap().current_epoch(), 15);
    assert_eq!(w.edge.held_epochs(&w.client.expected), vec![15]);
    assert_eq!(w.connect(15), Outcome::Accept { epoch: 15 });
    // past the end: nothing left to derive, nothing breaks
    w.clock.set(at(16));
    let report = w.keyserver.step(at(16), &mut w.rng, None).unwrap();
    assert!(report.queued.is_empty());
    let state = codec::decode::<tbids_core::FsSecretKeyState>(&std::fs::read(&w.state).unwrap()).unwrap();
    assert!(state.is_exhausted());
    assert_eq!(state.epochs(), w.params.epochs());
}
