use sha2::{Digest, Sha256};
use tbids_core::IdentityVector;

use crate::wire::{Cursor, WireError};

pub const TRANSCRIPT_TAG: &[u8] = b"TBIDS-HS-V1";

/// The fields both sides sign over; the edge signs [`hash`](Self::hash).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandshakeTranscript {
    pub client_nonce: [u8; 32],
    pub server_nonce: [u8; 32],
    pub identity: IdentityVector,
    pub timestamp: u64,
}

impl HandshakeTranscript {
    pub fn hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(TRANSCRIPT_TAG);
        h.update(self.client_nonce);
        h.update(self.server_nonce);
        h.update(encode_identity(&self.identity));
        h.update(self.timestamp.to_be_bytes());
        h.finalize().into()
    }
}

/// `count u8 | (len u32 | bytes)*`
pub fn encode_identity(id: &IdentityVector) -> Vec<u8> {
    let mut out = vec![id.len() as u8];
    for level in id.levels() {
        out.extend_from_slice(&(level.len() as u32).to_be_bytes());
        out.extend_from_slice(level);
    }
    out
}

pub(crate) fn read_identity(c: &mut Cursor<'_>) -> Result<IdentityVector, WireError> {
    let count = c.u8()?;
    let mut levels = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let len = c.u32()? as usize;
        levels.push(c.take(len)?.to_vec());
    }
    IdentityVector::new(levels).map_err(|_| WireError::Malformed("identity"))
}
