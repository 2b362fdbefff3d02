//! Authentication of keyserver-to-edge pushes.
//!
//! Stands in for a mutually authenticated channel: the keyserver seals
//! each push with an HMAC under a key shared with the edge.

use hmac::{Hmac, Mac};
use sha2::Sha256;

const PUSH_TAG: &[u8] = b"TBIDS-PUSH-V1";
pub const MAC_LEN: usize = 32;

pub trait PushAuthenticator: Send + Sync {
    fn seal(&self, payload: &[u8]) -> Vec<u8>;
    /// Returns the inner payload if the seal checks out.
    fn open<'a>(&self, sealed: &'a [u8]) -> Option<&'a [u8]>;
}

#[derive(Clone)]
pub struct PresharedKey([u8; 32]);

impl PresharedKey {
    pub fn new(key: [u8; 32]) -> Self {
        Self(key)
    }

    fn mac(&self) -> Hmac<Sha256> {
        let mut mac = Hmac::<Sha256>::new_from_slice(&self.0).expect("hmac takes any key length");
        mac.update(PUSH_TAG);
        mac
    }
}

impl std::fmt::Debug for PresharedKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PresharedKey(..)")
    }
}

impl PushAuthenticator for PresharedKey {
    fn seal(&self, payload: &[u8]) -> Vec<u8> {
        let mut mac = self.mac();
        mac.update(payload);
        let mut out = mac.finalize().into_bytes().to_vec();
        out.extend_from_slice(payload);
        out
    }

    fn open<'a>(&self, sealed: &'a [u8]) -> Option<&'a [u8]> {
        if sealed.len() < MAC_LEN {
            return None;
        }
        let (tag, payload) = sealed.split_at(MAC_LEN);
        let mut mac = self.mac();
        mac.update(payload);
        mac.verify_slice(tag).ok()?;
        Some(payload)
    }
}
