//! The verifying client. It reads the epoch off its own clock, never off
//! the wire.

use std::fmt;
use std::net::{SocketAddr, TcpStream};
use std::time::Duration;

use rand_core::{CryptoRng, RngCore};
use tbids_core::tbids::matched_epoch;
use tbids_core::{EpochConfig, IdentityVector, TbidsParams, VerifyingKey};

use crate::messages::{pk_fingerprint, Hello, SignedResponse};
use crate::transcript::HandshakeTranscript;
use crate::wire::{read_frame, write_frame, Frame, MessageType, RejectReason};

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub params: TbidsParams,
    pub vk: VerifyingKey,
    pub epochs: EpochConfig,
    pub expected: IdentityVector,
    pub timeout: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectKind {
    Edge(RejectReason),
    IdentityMismatch,
    PublicKeyMismatch,
    BadSignature,
    Malformed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The epoch whose key verified.
    Accept { epoch: u64 },
    Reject(RejectKind),
    NetworkError(String),
}

impl Outcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, Self::Accept { .. })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Accept { epoch } => write!(f, "result=accept epoch={epoch}"),
            Self::Reject(kind) => {
                let reason = match kind {
                    RejectKind::Edge(r) => return write!(f, "result=reject reason=edge-{}", r.as_str()),
                    RejectKind::IdentityMismatch => "identity-mismatch",
                    RejectKind::PublicKeyMismatch => "pk-mismatch",
                    RejectKind::BadSignature => "bad-signature",
                    RejectKind::Malformed => "malformed",
                };
                write!(f, "result=reject reason={reason}")
            }
            Self::NetworkError(_) => f.write_str("result=network-error"),
        }
    }
}

/// Decides a response. Depends only on the transcript fields, the
/// signature, the key, the client's clock reading and the window.
pub fn evaluate(
    cfg: &ClientConfig,
    client_nonce: [u8; 32],
    response: &SignedResponse,
    now: u64,
) -> Outcome {
    if response.identity != cfg.expected {
        return Outcome::Reject(RejectKind::IdentityMismatch);
    }
    if response.pk_ref != pk_fingerprint(&cfg.vk.pk) {
        return Outcome::Reject(RejectKind::PublicKeyMismatch);
    }
    let transcript = HandshakeTranscript {
        client_nonce,
        server_nonce: response.server_nonce,
        identity: response.identity.clone(),
        timestamp: response.timestamp,
    };
    match matched_epoch(
        &cfg.params,
        &cfg.vk,
        now,
        &cfg.expected,
        &transcript.hash(),
        &response.signature,
        &cfg.epochs,
    ) {
        Some(epoch) => Outcome::Accept { epoch },
        None => Outcome::Reject(RejectKind::BadSignature),
    }
}

/// One handshake against `addr`, judged at client time `now`.
pub fn connect<R: RngCore + CryptoRng>(
    addr: SocketAddr,
    cfg: &ClientConfig,
    now: u64,
    rng: &mut R,
) -> Outcome {
    let mut client_nonce = [0u8; 32];
    rng.fill_bytes(&mut client_nonce);
    let reply = (|| {
        let mut stream = TcpStream::connect_timeout(&addr, cfg.timeout)?;
        stream.set_read_timeout(Some(cfg.timeout))?;
        stream.set_write_timeout(Some(cfg.timeout))?;
        let hello = Hello { client_nonce, server_name: cfg.expected.clone() };
        write_frame(&mut stream, &Frame::new(MessageType::Hello, hello.encode()))?;
        read_frame(&mut stream)
    })();
    let frame = match reply {
        Ok(f) => f,
        Err(e) => return Outcome::NetworkError(e.to_string()),
    };
    match frame.kind {
        MessageType::SignedResponse => match SignedResponse::decode(&frame.payload) {
            Ok(resp) => evaluate(cfg, client_nonce, &resp, now),
            Err(_) => Outcome::Reject(RejectKind::Malformed),
        },
        MessageType::Reject => match frame.payload.first().copied().and_then(RejectReason::from_u8) {
            Some(r) => Outcome::Reject(RejectKind::Edge(r)),
            None => Outcome::Reject(RejectKind::Malformed),
        },
        _ => Outcome::Reject(RejectKind::Malformed),
    }
}
