//! Type-3 pairing group over BLS12-381.
//!
//! Everything above this module talks about `G1`, `G2` and `GT` through the
//! re-exports here. `GT` uses the additive notation of the underlying crate:
//! the group "product" is `+` and exponentiation is `* Scalar`.

use bls12_381::{multi_miller_loop, G2Prepared};
use ff::Field;
use rand_core::{CryptoRng, RngCore};
use sha2::{Digest, Sha512};

pub use bls12_381::{G1Affine, G1Projective, G2Affine, G2Projective, Gt, Scalar};

use crate::error::{Error, Result};

/// Wire identifier of the one supported curve.
pub const CURVE_BLS12_381: u8 = 0x01;

/// Compressed sizes in bytes.
pub const G1_COMPRESSED: usize = 48;
pub const G2_COMPRESSED: usize = 96;

/// The fixed bilinear group: order, generators and wire identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupContext {
    pub curve_id: u8,
    pub g: G1Affine,
    pub g_hat: G2Affine,
}

impl GroupContext {
    pub fn bls12_381() -> Self {
        Self {
            curve_id: CURVE_BLS12_381,
            g: G1Affine::generator(),
            g_hat: G2Affine::generator(),
        }
    }

    /// Group order as a big-endian hex string.
    pub fn order_hex() -> &'static str {
        <Scalar as ff::PrimeField>::MODULUS
    }
}

impl Default for GroupContext {
    fn default() -> Self {
        Self::bls12_381()
    }
}

/// Hashes `input` under `domain_tag` into `Z_p^*`.
///
/// The tag is length-prefixed so `(tag, input)` pairs never collide by
/// shifting bytes between the two. SHA-512 gives 512 bits, reduced mod p;
/// the (negligible) zero output maps to one.
pub fn hash_to_scalar(domain_tag: &[u8], input: &[u8]) -> Scalar {
    let mut hasher = Sha512::new();
    hasher.update((domain_tag.len() as u32).to_be_bytes());
    hasher.update(domain_tag);
    hasher.update(input);
    let digest: [u8; 64] = hasher.finalize().into();
    let s = Scalar::from_bytes_wide(&digest);
    if bool::from(s.is_zero()) {
        Scalar::ONE
    } else {
        s
    }
}

pub fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> Scalar {
    Scalar::random(rng)
}

pub fn pairing(a: &G1Affine, b: &G2Affine) -> Gt {
    bls12_381::pairing(a, b)
}

/// Product of pairings evaluated with one shared Miller loop and a single
/// final exponentiation.
pub fn multi_pairing(pairs: &[(G1Affine, G2Affine)]) -> Result<Gt> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairing);
    }
    let prepared: Vec<G2Prepared> = pairs.iter().map(|(_, b)| G2Prepared::from(*b)).collect();
    let terms: Vec<(&G1Affine, &G2Prepared)> =
        pairs.iter().zip(prepared.iter()).map(|((a, _), b)| (a, b)).collect();
    Ok(multi_miller_loop(&terms).final_exponentiation())
}
