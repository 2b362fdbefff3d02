//! The edge signer: holds pushed per-epoch keys and answers HELLOs.
//!
//! Connections are served on their own threads against an immutable key
//! table snapshot; a push builds a new table and swaps it in.

use std::collections::{BTreeMap, HashMap};
use std::io;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use tbids_core::codec::{self, ObjectKind, Object};
use tbids_core::{DelegatedEpochKey, EpochConfig, IdentityVector, TbidsParams};

use crate::auth::PushAuthenticator;
use crate::clock::Clock;
use crate::messages::{encode_ack, Hello, SignedResponse};
use crate::transcript::HandshakeTranscript;
use crate::wire::{read_frame, reject, write_frame, Frame, MessageType, RejectReason, WireError};

pub const IO_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Clone)]
pub struct EdgeConfig {
    pub params: Arc<TbidsParams>,
    pub epochs: EpochConfig,
    /// Fingerprint of the public key the pushed keys belong to.
    pub pk_ref: [u8; 32],
    pub clock: Arc<dyn Clock>,
    pub auth: Arc<dyn PushAuthenticator>,
}

type KeyTable = HashMap<IdentityVector, BTreeMap<u64, DelegatedEpochKey>>;

/// What arrived on the wire, for audits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Received {
    Frame(MessageType),
    /// Envelope kind inside an authenticated push.
    Push(ObjectKind),
}

struct Shared {
    cfg: EdgeConfig,
    keys: RwLock<Arc<KeyTable>>,
    stale: AtomicBool,
    received: Mutex<Vec<Received>>,
    seeds: Mutex<ChaCha20Rng>,
}

impl Shared {
    fn snapshot(&self) -> Arc<KeyTable> {
        self.keys.read().expect("key table lock").clone()
    }

    fn current_epoch(&self) -> Option<u64> {
        self.cfg.epochs.epoch_at(self.cfg.clock.now()).ok()
    }

    fn conn_rng(&self) -> ChaCha20Rng {
        let mut seed = [0u8; 32];
        self.seeds.lock().expect("seed lock").fill_bytes(&mut seed);
        ChaCha20Rng::from_seed(seed)
    }

    fn record(&self, r: Received) {
        self.received.lock().expect("audit lock").push(r);
    }

    fn install(&self, key: DelegatedEpochKey) {
        let current = self.current_epoch();
        let keep_stale = self.stale.load(Ordering::SeqCst);
        let mut guard = self.keys.write().expect("key table lock");
        let mut table = KeyTable::clone(&guard);
        table.entry(key.identity().clone()).or_default().insert(key.epoch(), key);
        if let (Some(current), false) = (current, keep_stale) {
            for epochs in table.values_mut() {
                epochs.retain(|&e, _| e >= current);
            }
        }
        *guard = Arc::new(table);
    }

    fn handle_push(&self, payload: &[u8]) -> Frame {
        let Some(inner) = self.cfg.auth.open(payload) else {
            return reject(RejectReason::Unauthenticated);
        };
        let obj = match codec::decode_any(inner) {
            Ok(obj) => obj,
            Err(_) => return reject(RejectReason::Malformed),
        };
        self.record(Received::Push(obj.kind()));
        let Object::DelegatedEpochKey(key) = obj else {
            return reject(RejectReason::Malformed);
        };
        if self.cfg.params.check_epoch(key.epoch()).is_err() {
            return reject(RejectReason::Malformed);
        }
        let epoch = key.epoch();
        self.install(key);
        Frame::new(MessageType::PushAck, encode_ack(epoch))
    }

    fn handle_hello(&self, payload: &[u8], rng: &mut ChaCha20Rng) -> Frame {
        let Ok(hello) = Hello::decode(payload) else {
            return reject(RejectReason::Malformed);
        };
        let now = self.cfg.clock.now();
        let table = self.snapshot();
        let Some(held) = table.get(&hello.server_name) else {
            return reject(RejectReason::UnknownIdentity);
        };
        let key = if self.stale.load(Ordering::SeqCst) {
            // misbehaving edge: reuse the oldest key it still has
            held.values().next()
        } else {
            self.cfg.epochs.epoch_at(now).ok().and_then(|e| held.get(&e))
        };
        let Some(key) = key else {
            return reject(RejectReason::NoValidKey);
        };
        let mut server_nonce = [0u8; 32];
        rng.fill_bytes(&mut server_nonce);
        let transcript = HandshakeTranscript {
            client_nonce: hello.client_nonce,
            server_nonce,
            identity: hello.server_name.clone(),
            timestamp: now,
        };
        let signature = key.sign(&transcript.hash(), rng);
        let response = SignedResponse {
            server_nonce,
            timestamp: now,
            identity: hello.server_name,
            pk_ref: self.cfg.pk_ref,
            signature,
        };
        Frame::new(MessageType::SignedResponse, response.encode())
    }

    fn serve(&self, mut stream: TcpStream) -> Result<(), WireError> {
        stream.set_read_timeout(Some(IO_TIMEOUT))?;
        stream.set_write_timeout(Some(IO_TIMEOUT))?;
        let mut rng = self.conn_rng();
        loop {
            let frame = match read_frame(&mut stream) {
                Ok(f) => f,
                Err(WireError::Io(e)) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(()),
                Err(WireError::UnknownType(_)) => {
                    write_frame(&mut stream, &reject(RejectReason::Malformed))?;
                    return Ok(());
                }
                Err(e) => return Err(e),
            };
            self.record(Received::Frame(frame.kind));
            let reply = match frame.kind {
                MessageType::PushKey => self.handle_push(&frame.payload),
                MessageType::Hello => self.handle_hello(&frame.payload, &mut rng),
                _ => reject(RejectReason::Malformed),
            };
            write_frame(&mut stream, &reply)?;
        }
    }
}

/// A running edge. Dropping it stops the accept loop.
pub struct EdgeServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    stop: Arc<AtomicBool>,
    accept: Option<JoinHandle<()>>,
}

impl EdgeServer {
    pub fn spawn(addr: impl ToSocketAddrs, cfg: EdgeConfig) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            cfg,
            keys: RwLock::new(Arc::new(KeyTable::new())),
            stale: AtomicBool::new(false),
            received: Mutex::new(Vec::new()),
            seeds: Mutex::new(ChaCha20Rng::from_entropy()),
        });
        let stop = Arc::new(AtomicBool::new(false));
        let accept = {
            let shared = shared.clone();
            let stop = stop.clone();
            thread::spawn(move || {
                for conn in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = conn else { continue };
                    let shared = shared.clone();
                    thread::spawn(move || {
                        let _ = shared.serve(stream);
                    });
                }
            })
        };
        Ok(Self { addr, shared, stop, accept: Some(accept) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Misbehaving mode: keep expired keys and sign with the oldest one.
    pub fn set_stale(&self, on: bool) {
        self.shared.stale.store(on, Ordering::SeqCst);
    }

    /// Epochs held for `id`, ascending.
    pub fn held_epochs(&self, id: &IdentityVector) -> Vec<u64> {
        self.shared
            .snapshot()
            .get(id)
            .map(|m| m.keys().copied().collect())
            .unwrap_or_default()
    }

    pub fn received(&self) -> Vec<Received> {
        self.shared.received.lock().expect("audit lock").clone()
    }

    pub fn shutdown(mut self) {
        self.stop_accepting();
    }

    fn stop_accepting(&mut self) {
        let Some(handle) = self.accept.take() else { return };
        self.stop.store(true, Ordering::SeqCst);
        // wake the blocking accept
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
        let _ = handle.join();
    }
}

impl Drop for EdgeServer {
    fn drop(&mut self) {
        self.stop_accepting();
    }
}
