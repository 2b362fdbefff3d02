//! HELLO and SIGNED_RESPONSE payloads.

use sha2::{Digest, Sha256};
use tbids_core::codec;
use tbids_core::{IdentityVector, PublicKey, TbidsSignature};

use crate::transcript::{encode_identity, read_identity};
use crate::wire::{Cursor, WireError};

/// SHA-256 of the public key envelope; names the key an edge signs under.
pub fn pk_fingerprint(pk: &PublicKey) -> [u8; 32] {
    Sha256::digest(codec::encode(pk)).into()
}

/// `client nonce [32] | requested identity`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hello {
    pub client_nonce: [u8; 32],
    pub server_name: IdentityVector,
}

impl Hello {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = self.client_nonce.to_vec();
        out.extend_from_slice(&encode_identity(&self.server_name));
        out
    }

    pub fn decode(payload: &[u8]) -> Result<Self, WireError> {
        let mut c = Cursor::new(payload, "hello");
        let client_nonce = c.array()?;
        let server_name = read_identity(&mut c)?;
        c.finish()?;
        Ok(Self { client_nonce, server_name })
    }
}

/// `server nonce [32] | timestamp u64 | identity | pk fingerprint [32] |
/// signature envelope`. The signature carries no epoch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedResponse {
    pub server_nonce: [u8; 32],
    pub timestamp: u64,
    pub identity: IdentityVector,
    pub pk_ref: [u8; 32],
    pub signature: TbidsSignature,
}

impl SignedResponse {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = self.server_nonce.to_vec();
        out.extend_from_slice(&self.timestamp.to_be_bytes());
        out.extend_from_slice(&encode_identity(&self.identity));
        out.extend_from_slice(&self.pk_ref);
        out.extend_from_slice(&codec::encode(&self.signature));
        out
    }

    pub fn decode(payload: &[u8]) -> Result<Self, WireError> {
        let mut c = Cursor::new(payload, "signed response");
        let server_nonce = c.array()?;
        let timestamp = c.u64()?;
        let identity = read_identity(&mut c)?;
        let pk_ref = c.array()?;
        let signature =
            codec::decode(c.rest()).map_err(|_| WireError::Malformed("signed response"))?;
        Ok(Self { server_nonce, timestamp, identity, pk_ref, signature })
    }
}

/// PUSH_ACK payload: the acknowledged epoch.
pub fn encode_ack(epoch: u64) -> Vec<u8> {
    epoch.to_be_bytes().to_vec()
}

pub fn decode_ack(payload: &[u8]) -> Result<u64, WireError> {
    let mut c = Cursor::new(payload, "push ack");
    let epoch = c.u64()?;
    c.finish()?;
    Ok(epoch)
}
