//! Hierarchical identity-based signatures from the HIBE via the Naor
//! transform: a signature on `msg` under a key for `(I_1, .., I_l)` is the
//! HIBE key for `(I_1, .., I_l, msg)`.
//!
//! Parameters for signature depth `l` are HIBE parameters of depth `l + 1`;
//! the last level is reserved for the message.

use group::Group;
use rand_core::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::group::{multi_pairing, G1Affine, G1Projective, G2Affine, G2Projective, Gt};
use crate::hibe::{
    self, decrypt_parts, encrypt_exponents, message_exponent, IdentityVector, PublicKey,
    PublicParams,
};

/// A fully delegated key with no remaining levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HibsSignature {
    pub a0: G1Projective,
    pub a1: G2Projective,
}

/// `t = h_1^H(I_1) ... h_l^H(I_l) * g3` for a fixed signer identity, together
/// with the message-level generator `h_{l+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignerPrecomputation {
    pub t: G1Projective,
    pub message_generator: G1Projective,
}

pub fn setup<R: RngCore + CryptoRng>(signature_depth: usize, rng: &mut R) -> Result<PublicParams> {
    if signature_depth == 0 {
        return Err(Error::ZeroDepth);
    }
    PublicParams::setup(signature_depth + 1, rng)
}

/// Identity depth `l` of signing keys under `pp`.
pub fn signature_depth(pp: &PublicParams) -> usize {
    pp.max_depth() - 1
}

fn check_signing_depth(pp: &PublicParams, depth: usize) -> Result<()> {
    let expected = signature_depth(pp);
    if depth != expected {
        return Err(Error::WrongKeyDepth { expected, found: depth });
    }
    Ok(())
}

pub fn precompute(pp: &PublicParams, id: &IdentityVector) -> Result<SignerPrecomputation> {
    check_signing_depth(pp, id.len())?;
    Ok(SignerPrecomputation {
        t: pp.identity_point(&id.exponents()),
        message_generator: pp.h()[id.len()],
    })
}

/// Naor signing: one more delegation step, for the message level.
pub fn sign<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    key: &hibe::DelegatedKey,
    msg: &[u8],
    rng: &mut R,
) -> Result<HibsSignature> {
    check_signing_depth(pp, key.depth())?;
    let mut exponents = key.identity().exponents();
    exponents.push(message_exponent(key.depth() + 1, msg));
    let level_point = pp.identity_point(&exponents);
    let parts = hibe::extend(
        pp,
        key.a0(),
        key.a1(),
        key.b(),
        &exponents[key.depth()],
        &level_point,
        rng,
    );
    Ok(HibsSignature { a0: parts.a0, a1: parts.a1 })
}

/// `(a0 * b^H(m) * (t * h^H(m))^w, a1 * g^w)`; cost independent of depth.
///
/// `pre` is trusted: a precomputation for another identity yields a
/// signature that fails verification.
pub fn sign_with_precomputation<R: RngCore + CryptoRng>(
    key: &hibe::DelegatedKey,
    pre: &SignerPrecomputation,
    msg: &[u8],
    rng: &mut R,
) -> Result<HibsSignature> {
    if key.b().len() != 1 {
        return Err(Error::WrongKeyDepth {
            expected: key.depth() + key.b().len() - 1,
            found: key.depth(),
        });
    }
    let e = message_exponent(key.depth() + 1, msg);
    let level_point = pre.t + pre.message_generator * e;
    let mut w = crate::group::random_scalar(rng);
    let sig = HibsSignature {
        a0: key.a0() + key.b()[0] * e + level_point * w,
        a1: key.a1() + G2Projective::generator() * w,
    };
    zeroize::Zeroize::zeroize(&mut w);
    Ok(sig)
}

/// Pairing-product check against a precomputed signer point:
/// `e(t * h^H(m), a1) * e(g2, pk) * e(a0, g^)^-1 == 1`.
pub fn verify_with_precomputation(
    pp: &PublicParams,
    pk: &PublicKey,
    pre: &SignerPrecomputation,
    message_level: usize,
    msg: &[u8],
    sig: &HibsSignature,
) -> bool {
    let f = pre.t + pre.message_generator * message_exponent(message_level, msg);
    multi_pairing(&[
        (G1Affine::from(f), G2Affine::from(sig.a1)),
        (G1Affine::from(pp.g2()), G2Affine::from(pk.point())),
        (G1Affine::from(-sig.a0), G2Affine::generator()),
    ])
    .is_ok_and(|v| v == Gt::identity())
}

/// Deterministic verification; no randomness needed.
pub fn verify_deterministic(
    pp: &PublicParams,
    pk: &PublicKey,
    id: &IdentityVector,
    msg: &[u8],
    sig: &HibsSignature,
) -> bool {
    match precompute(pp, id) {
        Ok(pre) => verify_with_precomputation(pp, pk, &pre, id.len() + 1, msg, sig),
        Err(_) => false,
    }
}

/// Naor's original check: encrypt a random `GT` element to `(id, msg)` and
/// decrypt it with the signature. Kept as an independent oracle.
pub fn verify_probabilistic<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    pk: &PublicKey,
    id: &IdentityVector,
    msg: &[u8],
    sig: &HibsSignature,
    rng: &mut R,
) -> bool {
    if id.len() != signature_depth(pp) {
        return false;
    }
    let mut exponents = id.exponents();
    exponents.push(message_exponent(id.len() + 1, msg));
    let probe = Gt::random(&mut *rng);
    let ct = encrypt_exponents(pp, pk, &exponents, &probe, rng);
    decrypt_parts(&sig.a0, &sig.a1, &ct) == probe
}
