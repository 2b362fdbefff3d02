//! The origin keyserver. Each step derives keys for the current and next
//! epoch, queues them durably, evolves the forward-secure state, and pushes
//! everything still queued to the edge.
//!
//! Ordering per epoch: derive, write the outbox, then update and write the
//! state. A crash between the two leaves the key queued and the state one
//! epoch behind; the next step notices the queued key and only updates.

use std::fmt;
use std::io;
use std::net::{SocketAddr, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use rand_core::{CryptoRng, RngCore};
use tbids_core::codec;
use tbids_core::tbids::fs_gen;
use tbids_core::{
    DelegatedEpochKey, EpochConfig, Error as CoreError, FsSecretKeyState, IdentityVector,
    PublicKey, TbidsParams,
};
use thiserror::Error;

use crate::auth::PushAuthenticator;
use crate::clock::Clock;
use crate::messages::decode_ack;
use crate::store::{self, LockError};
use crate::wire::{read_frame, write_frame, Frame, MessageType, WireError};

#[derive(Clone)]
pub struct KeyserverConfig {
    pub params: Arc<TbidsParams>,
    pub epochs: EpochConfig,
    pub identity: IdentityVector,
    pub edge: SocketAddr,
    pub auth: Arc<dyn PushAuthenticator>,
    pub push_attempts: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

#[derive(Debug, Error)]
pub enum KeyserverError {
    #[error(transparent)]
    Lock(#[from] LockError),
    #[error("i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("state file {path}: {source}")]
    Decode { path: PathBuf, source: codec::DecodeError },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Simulated process death inside a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrashPoint {
    /// After a key is queued, before the state moves past its epoch.
    AfterQueue,
    /// After the state moves on, before anything is pushed.
    AfterUpdate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepReport {
    pub state_epoch: u64,
    pub queued: Vec<u64>,
    pub pushed: Vec<u64>,
    pub push_failed: Vec<u64>,
    pub crashed: bool,
}

impl fmt::Display for StepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[u64]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            }
        };
        write!(
            f,
            "state_epoch={} queued={} pushed={} push_failed={}",
            self.state_epoch,
            list(&self.queued),
            list(&self.pushed),
            list(&self.push_failed)
        )?;
        if self.crashed {
            f.write_str(" crashed=true")?;
        }
        Ok(())
    }
}

pub struct Keyserver {
    cfg: KeyserverConfig,
    state_path: PathBuf,
}

/// Generates a forward-secure master state at `path`. Refuses to overwrite.
pub fn init_state<R: RngCore + CryptoRng>(
    path: &Path,
    params: &TbidsParams,
    rng: &mut R,
) -> Result<PublicKey, KeyserverError> {
    let io_err = |source| KeyserverError::Io { path: path.to_path_buf(), source };
    if path.exists() {
        return Err(io_err(io::Error::new(io::ErrorKind::AlreadyExists, "state exists")));
    }
    let (pk, state) = fs_gen(params, rng);
    store::write_atomic(path, &codec::encode(&state)).map_err(io_err)?;
    Ok(pk)
}

impl Keyserver {
    pub fn new(cfg: KeyserverConfig, state_path: impl Into<PathBuf>) -> Self {
        Self { cfg, state_path: state_path.into() }
    }

    pub fn state_path(&self) -> &Path {
        &self.state_path
    }

    fn io_err(&self, path: &Path) -> impl Fn(io::Error) -> KeyserverError {
        let path = path.to_path_buf();
        move |source| KeyserverError::Io { path: path.clone(), source }
    }

    pub fn load_state(&self) -> Result<FsSecretKeyState, KeyserverError> {
        let bytes = std::fs::read(&self.state_path).map_err(self.io_err(&self.state_path))?;
        codec::decode_auto(&bytes)
            .map_err(|source| KeyserverError::Decode { path: self.state_path.clone(), source })
    }

    fn save_state(&self, state: &FsSecretKeyState) -> Result<(), KeyserverError> {
        store::write_atomic(&self.state_path, &codec::encode(state))
            .map_err(self.io_err(&self.state_path))
    }

    pub fn load_outbox(&self) -> Result<Vec<DelegatedEpochKey>, KeyserverError> {
        let path = store::outbox_path(&self.state_path);
        match std::fs::read(&path) {
            Ok(bytes) => store::decode_outbox(&bytes).map_err(self.io_err(&path)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(self.io_err(&path)(e)),
        }
    }

    fn save_outbox(&self, keys: &[DelegatedEpochKey]) -> Result<(), KeyserverError> {
        let path = store::outbox_path(&self.state_path);
        store::write_atomic(&path, &store::encode_outbox(keys)).map_err(self.io_err(&path))
    }

    /// One keyserver cycle at time `now`.
    pub fn step<R: RngCore + CryptoRng>(
        &self,
        now: u64,
        rng: &mut R,
        crash: Option<CrashPoint>,
    ) -> Result<StepReport, KeyserverError> {
        let _lock = store::lock_state(&self.state_path)?;
        let params = &*self.cfg.params;
        let now_epoch = self.cfg.epochs.epoch_at(now)?;
        let mut state = self.load_state()?;
        let mut outbox = self.load_outbox()?;
        let before = outbox.len();
        outbox.retain(|k| k.epoch() >= now_epoch);
        if outbox.len() != before {
            self.save_outbox(&outbox)?;
        }
        let mut report = StepReport::default();

        loop {
            let current = state.current_epoch();
            if current > now_epoch.saturating_add(1) {
                break;
            }
            if current >= now_epoch && !outbox.iter().any(|k| k.epoch() == current) {
                let key = state.delegate(params, current, &self.cfg.identity, rng)?;
                outbox.push(key);
                self.save_outbox(&outbox)?;
                report.queued.push(current);
                if crash == Some(CrashPoint::AfterQueue) {
                    report.state_epoch = current;
                    report.crashed = true;
                    return Ok(report);
                }
            }
            match state.update(params, rng) {
                Ok(()) => {}
                Err(CoreError::EpochsExhausted) => break,
                Err(e) => return Err(e.into()),
            }
            self.save_state(&state)?;
            if crash == Some(CrashPoint::AfterUpdate) {
                report.state_epoch = state.current_epoch();
                report.crashed = true;
                return Ok(report);
            }
        }
        report.state_epoch = state.current_epoch();

        outbox.sort_by_key(DelegatedEpochKey::epoch);
        for key in &outbox {
            if self.push_with_retry(key) {
                report.pushed.push(key.epoch());
            } else {
                report.push_failed.push(key.epoch());
            }
        }
        Ok(report)
    }

    fn push_with_retry(&self, key: &DelegatedEpochKey) -> bool {
        let payload = self.cfg.auth.seal(&codec::encode(key));
        let mut delay = self.cfg.backoff;
        for attempt in 0..self.cfg.push_attempts.max(1) {
            if attempt > 0 {
                thread::sleep(delay);
                delay = delay.saturating_mul(2);
            }
            if matches!(self.push_once(&payload), Ok(epoch) if epoch == key.epoch()) {
                return true;
            }
        }
        false
    }

    fn push_once(&self, payload: &[u8]) -> Result<u64, WireError> {
        let mut stream = TcpStream::connect_timeout(&self.cfg.edge, self.cfg.timeout)?;
        stream.set_read_timeout(Some(self.cfg.timeout))?;
        write_frame(&mut stream, &Frame::new(MessageType::PushKey, payload.to_vec()))?;
        let reply = read_frame(&mut stream)?;
        match reply.kind {
            MessageType::PushAck => decode_ack(&reply.payload),
            _ => Err(WireError::Malformed("push reply")),
        }
    }

    /// Steps every `poll` until `stop` is set. Step errors are passed to
    /// `on_step` and do not end the loop.
    pub fn run<C, R, F>(&self, clock: &C, rng: &mut R, stop: &AtomicBool, poll: Duration, mut on_step: F)
    where
        C: Clock + ?Sized,
        R: RngCore + CryptoRng,
        F: FnMut(Result<StepReport, KeyserverError>),
    {
        while !stop.load(Ordering::SeqCst) {
            on_step(self.step(clock.now(), rng, None));
            thread::sleep(poll);
        }
    }
}
