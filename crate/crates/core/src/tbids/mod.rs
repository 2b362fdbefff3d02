//! Time-bound identity-based signatures.
//!
//! Two schemes share one parameter set:
//!
//! * [`SchemeKind::Flat`] fuses `(epoch, identity)` into a single identity
//!   level of a depth-1 HIBS. Any epoch can be delegated at any time.
//! * [`SchemeKind::ForwardSecure`] spends one HIBS level per epoch bit,
//!   followed by the identity levels. The master state walks the epoch tree
//!   depth-first ([`dfeval`]) and can only delegate for its current epoch.
//!
//! Parameters are generated once for the deeper forward-secure hierarchy;
//! the flat scheme uses the first two level generators.

pub mod epoch;
mod forward;

use std::fmt;

use rand_core::{CryptoRng, RngCore};

pub use epoch::{binid, epoch_from_timestamp, EpochConfig, NodeLabel};
pub use forward::{dfeval, fs_gen, FsSecretKeyState, NodeSecret, StackEntry};

use crate::error::{Error, Result};
use crate::group::G1Projective;
use crate::hibe::{self, level_exponent, DelegatedKey, IdentityVector, MasterSecretKey, ParentKey, PublicKey, PublicParams};
use crate::hibs::{self, HibsSignature, SignerPrecomputation};

/// Upper bound on the epoch tree depth.
pub const MAX_EPOCH_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum SchemeKind {
    Flat = 1,
    ForwardSecure = 2,
}

impl SchemeKind {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(Self::Flat),
            2 => Some(Self::ForwardSecure),
            _ => None,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Flat => "flat",
            Self::ForwardSecure => "fs",
        })
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "flat" => Ok(Self::Flat),
            "fs" | "forward-secure" => Ok(Self::ForwardSecure),
            other => Err(format!("unknown scheme `{other}` (expected flat or fs)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TbidsParams {
    epoch_bits: u32,
    identity_levels: usize,
    hibe: PublicParams,
    flat: PublicParams,
    /// `h_i^H(i, "0")` and `h_i^H(i, "1")` for every epoch-bit level.
    bit_terms: Vec<[G1Projective; 2]>,
}

impl TbidsParams {
    /// `epochs` is rounded up to a power of two (at least 2).
    pub fn setup<R: RngCore + CryptoRng>(
        epochs: u64,
        identity_levels: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let epoch_bits = epoch_bits_for(epochs)?;
        let depth = forward_depth(epoch_bits, identity_levels)?;
        Self::from_hibe(epoch_bits, identity_levels, PublicParams::setup(depth, rng)?)
    }

    pub fn from_hibe(epoch_bits: u32, identity_levels: usize, hibe: PublicParams) -> Result<Self> {
        if !(1..=MAX_EPOCH_BITS).contains(&epoch_bits) {
            return Err(Error::InvalidParams(format!(
                "epoch bits {epoch_bits} outside 1..={MAX_EPOCH_BITS}"
            )));
        }
        let depth = forward_depth(epoch_bits, identity_levels)?;
        if hibe.max_depth() != depth {
            return Err(Error::InvalidParams(format!(
                "hierarchy depth {} does not match {epoch_bits} epoch bits + {identity_levels} identity levels + 1",
                hibe.max_depth()
            )));
        }
        let flat = hibe.truncated(2)?;
        let bit_terms = hibe.h()[..epoch_bits as usize]
            .iter()
            .enumerate()
            .map(|(i, h)| [h * level_exponent(i + 1, b"0"), h * level_exponent(i + 1, b"1")])
            .collect();
        Ok(Self { epoch_bits, identity_levels, hibe, flat, bit_terms })
    }

    pub fn epochs(&self) -> u64 {
        1u64 << self.epoch_bits
    }

    pub fn epoch_bits(&self) -> u32 {
        self.epoch_bits
    }

    pub fn identity_levels(&self) -> usize {
        self.identity_levels
    }

    /// Full-depth parameters, as serialized.
    pub fn hibe(&self) -> &PublicParams {
        &self.hibe
    }

    /// HIBS parameters used by `scheme`.
    pub fn hibs_params(&self, scheme: SchemeKind) -> &PublicParams {
        match scheme {
            SchemeKind::Flat => &self.flat,
            SchemeKind::ForwardSecure => &self.hibe,
        }
    }

    pub fn check_epoch(&self, epoch: u64) -> Result<()> {
        if epoch >= self.epochs() {
            return Err(Error::EpochOutOfRange { epoch, epochs: self.epochs() });
        }
        Ok(())
    }

    pub fn check_identity(&self, id: &IdentityVector) -> Result<()> {
        if id.len() != self.identity_levels {
            return Err(Error::WrongKeyDepth { expected: self.identity_levels, found: id.len() });
        }
        Ok(())
    }

    /// HIBS identity that `(epoch, id)` maps to under `scheme`.
    pub fn signer_identity(
        &self,
        scheme: SchemeKind,
        epoch: u64,
        id: &IdentityVector,
    ) -> Result<IdentityVector> {
        self.check_epoch(epoch)?;
        self.check_identity(id)?;
        signer_identity(scheme, self.epoch_bits, epoch, id)
    }

    /// Signer point and message generator for `(epoch, id)`. For the
    /// forward-secure scheme the epoch bits come from a table.
    pub fn signer_precomputation(
        &self,
        scheme: SchemeKind,
        epoch: u64,
        id: &IdentityVector,
    ) -> Result<SignerPrecomputation> {
        match scheme {
            SchemeKind::Flat => hibs::precompute(&self.flat, &self.signer_identity(scheme, epoch, id)?),
            SchemeKind::ForwardSecure => {
                self.check_epoch(epoch)?;
                self.check_identity(id)?;
                let bits = self.epoch_bits as usize;
                let h = self.hibe.h();
                let mut t = *self.hibe.g3();
                for (i, terms) in self.bit_terms.iter().enumerate() {
                    t += terms[((epoch >> (bits - 1 - i)) & 1) as usize];
                }
                for (j, level) in id.levels().iter().enumerate() {
                    t += h[bits + j] * level_exponent(bits + j + 1, level);
                }
                Ok(SignerPrecomputation { t, message_generator: h[bits + id.len()] })
            }
        }
    }
}

fn epoch_bits_for(epochs: u64) -> Result<u32> {
    if epochs < 2 {
        return Err(Error::InvalidParams("at least two epochs are required".into()));
    }
    let bits = u64::BITS - (epochs - 1).leading_zeros();
    if bits > MAX_EPOCH_BITS {
        return Err(Error::InvalidParams(format!("at most 2^{MAX_EPOCH_BITS} epochs")));
    }
    Ok(bits)
}

fn forward_depth(epoch_bits: u32, identity_levels: usize) -> Result<usize> {
    if identity_levels == 0 {
        return Err(Error::InvalidParams("at least one identity level is required".into()));
    }
    let depth = epoch_bits as usize + identity_levels + 1;
    if depth > u8::MAX as usize {
        return Err(Error::InvalidParams(format!("hierarchy depth {depth} exceeds 255")));
    }
    Ok(depth)
}

/// Injective encoding of `(epoch, id)` as one identity level: 8-byte
/// big-endian epoch, level count, then each level with a 4-byte length.
pub fn fused_identity_level(epoch: u64, id: &IdentityVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(9 + id.levels().iter().map(|l| 4 + l.len()).sum::<usize>());
    out.extend_from_slice(&epoch.to_be_bytes());
    out.push(id.len() as u8);
    for level in id.levels() {
        out.extend_from_slice(&(level.len() as u32).to_be_bytes());
        out.extend_from_slice(level);
    }
    out
}

pub(crate) fn signer_identity(
    scheme: SchemeKind,
    epoch_bits: u32,
    epoch: u64,
    id: &IdentityVector,
) -> Result<IdentityVector> {
    match scheme {
        SchemeKind::Flat => IdentityVector::single(fused_identity_level(epoch, id)),
        SchemeKind::ForwardSecure => {
            let mut levels = binid(epoch, epoch_bits)?;
            levels.extend(id.levels().iter().cloned());
            IdentityVector::new(levels)
        }
    }
}

/// Public key plus the scheme it verifies for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyingKey {
    pub scheme: SchemeKind,
    pub pk: PublicKey,
}

/// Signing key bound to one `(epoch, identity)` pair, as handed to an edge.
#[derive(Clone, PartialEq, Eq)]
pub struct DelegatedEpochKey {
    scheme: SchemeKind,
    epoch_bits: u32,
    epoch: u64,
    identity: IdentityVector,
    inner: DelegatedKey,
    precomp: SignerPrecomputation,
}

impl DelegatedEpochKey {
    pub(crate) fn from_delegation(
        params: &TbidsParams,
        scheme: SchemeKind,
        epoch: u64,
        identity: IdentityVector,
        inner: DelegatedKey,
    ) -> Result<Self> {
        let precomp = params.signer_precomputation(scheme, epoch, &identity)?;
        Ok(Self { scheme, epoch_bits: params.epoch_bits, epoch, identity, inner, precomp })
    }

    /// Reassembles a key read from the wire. The inner identity is rebuilt
    /// from `(scheme, epoch, identity)`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        scheme: SchemeKind,
        epoch_bits: u32,
        epoch: u64,
        identity: IdentityVector,
        a0: G1Projective,
        a1: crate::group::G2Projective,
        b: G1Projective,
        precomp: SignerPrecomputation,
    ) -> Result<Self> {
        if !(1..=MAX_EPOCH_BITS).contains(&epoch_bits) {
            return Err(Error::InvalidParams(format!("epoch bits {epoch_bits}")));
        }
        let inner_id = signer_identity(scheme, epoch_bits, epoch, &identity)?;
        let inner = DelegatedKey::from_raw(inner_id, a0, a1, vec![b]);
        Ok(Self { scheme, epoch_bits, epoch, identity, inner, precomp })
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn epoch_bits(&self) -> u32 {
        self.epoch_bits
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn identity(&self) -> &IdentityVector {
        &self.identity
    }

    pub fn inner(&self) -> &DelegatedKey {
        &self.inner
    }

    pub fn precomputation(&self) -> &SignerPrecomputation {
        &self.precomp
    }

    pub fn sign<R: RngCore + CryptoRng>(&self, msg: &[u8], rng: &mut R) -> TbidsSignature {
        sign(self, msg, rng)
    }
}

impl fmt::Debug for DelegatedEpochKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelegatedEpochKey")
            .field("scheme", &self.scheme)
            .field("epoch", &self.epoch)
            .field("identity", &self.identity)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TbidsSignature(pub HibsSignature);

/// Key generation for the flat scheme.
pub fn flat_keygen<R: RngCore + CryptoRng>(
    params: &TbidsParams,
    rng: &mut R,
) -> (PublicKey, MasterSecretKey) {
    let pair = hibe::gen(params.hibs_params(SchemeKind::Flat), rng);
    (pair.pk, pair.msk)
}

/// Flat-scheme delegation for any epoch in range.
pub fn flat_delegate<R: RngCore + CryptoRng>(
    params: &TbidsParams,
    msk: &MasterSecretKey,
    epoch: u64,
    id: &IdentityVector,
    rng: &mut R,
) -> Result<DelegatedEpochKey> {
    let target = params.signer_identity(SchemeKind::Flat, epoch, id)?;
    let pp = params.hibs_params(SchemeKind::Flat);
    let inner = hibe::delegate(pp, ParentKey::Master(msk), &target, rng)?;
    DelegatedEpochKey::from_delegation(params, SchemeKind::Flat, epoch, id.clone(), inner)
}

pub fn sign<R: RngCore + CryptoRng>(
    key: &DelegatedEpochKey,
    msg: &[u8],
    rng: &mut R,
) -> TbidsSignature {
    let sig = hibs::sign_with_precomputation(&key.inner, &key.precomp, msg, rng)
        .expect("delegated epoch keys always leave exactly the message level open");
    TbidsSignature(sig)
}

/// Windowless deterministic verification for one epoch.
pub fn verify(
    params: &TbidsParams,
    vk: &VerifyingKey,
    epoch: u64,
    id: &IdentityVector,
    msg: &[u8],
    sig: &TbidsSignature,
) -> bool {
    let Ok(pre) = params.signer_precomputation(vk.scheme, epoch, id) else {
        return false;
    };
    let pp = params.hibs_params(vk.scheme);
    hibs::verify_with_precomputation(pp, &vk.pk, &pre, pp.max_depth(), msg, &sig.0)
}

/// Verification against the verifier's own clock: the epoch containing
/// `ts` is tried first, then its neighbours out to `cfg.window`.
pub fn verify_with_window(
    params: &TbidsParams,
    vk: &VerifyingKey,
    ts: u64,
    id: &IdentityVector,
    msg: &[u8],
    sig: &TbidsSignature,
    cfg: &EpochConfig,
) -> bool {
    matched_epoch(params, vk, ts, id, msg, sig, cfg).is_some()
}

/// Like [`verify_with_window`], reporting which epoch matched.
pub fn matched_epoch(
    params: &TbidsParams,
    vk: &VerifyingKey,
    ts: u64,
    id: &IdentityVector,
    msg: &[u8],
    sig: &TbidsSignature,
    cfg: &EpochConfig,
) -> Option<u64> {
    let current = cfg.epoch_at(ts).ok()?;
    cfg.candidate_epochs(current, params.epochs())
        .into_iter()
        .find(|&e| verify(params, vk, e, id, msg, sig))
}

/// The Naor encrypt-then-decrypt check for a TBIDS signature.
pub fn verify_probabilistic<R: RngCore + CryptoRng>(
    params: &TbidsParams,
    vk: &VerifyingKey,
    epoch: u64,
    id: &IdentityVector,
    msg: &[u8],
    sig: &TbidsSignature,
    rng: &mut R,
) -> bool {
    let Ok(signer) = params.signer_identity(vk.scheme, epoch, id) else {
        return false;
    };
    hibs::verify_probabilistic(params.hibs_params(vk.scheme), &vk.pk, &signer, msg, &sig.0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn id(s: &str) -> IdentityVector {
        IdentityVector::single(s.as_bytes().to_vec()).unwrap()
    }

    #[test]
    fn epochs_round_up() {
        assert_eq!(epoch_bits_for(2).unwrap(), 1);
        assert_eq!(epoch_bits_for(5).unwrap(), 3);
        assert_eq!(epoch_bits_for(8).unwrap(), 3);
        assert_eq!(epoch_bits_for(1 << 20).unwrap(), 20);
        assert!(epoch_bits_for(1).is_err());
        assert!(epoch_bits_for((1 << 32) + 1).is_err());
    }

    #[test]
    fn params_depths() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let p = TbidsParams::setup(16, 2, &mut rng).unwrap();
        assert_eq!(p.epochs(), 16);
        assert_eq!(p.hibs_params(SchemeKind::ForwardSecure).max_depth(), 4 + 2 + 1);
        assert_eq!(p.hibs_params(SchemeKind::Flat).max_depth(), 2);
        assert!(TbidsParams::setup(16, 0, &mut rng).is_err());
    }

    #[test]
    fn flat_roundtrip_and_time_binding() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let params = TbidsParams::setup(8, 1, &mut rng).unwrap();
        let (pk, msk) = flat_keygen(&params, &mut rng);
        let vk = VerifyingKey { scheme: SchemeKind::Flat, pk };
        let key = flat_delegate(&params, &msk, 3, &id("example.com"), &mut rng).unwrap();
        let sig = key.sign(b"transcript", &mut rng);
        assert!(verify(&params, &vk, 3, &id("example.com"), b"transcript", &sig));
        assert!(!verify(&params, &vk, 4, &id("example.com"), b"transcript", &sig));
        assert!(!verify(&params, &vk, 2, &id("example.com"), b"transcript", &sig));
        assert!(!verify(&params, &vk, 3, &id("example.org"), b"transcript", &sig));
        assert!(!verify(&params, &vk, 99, &id("example.com"), b"transcript", &sig));
        assert!(matches!(
            flat_delegate(&params, &msk, 8, &id("x"), &mut rng),
            Err(Error::EpochOutOfRange { epoch: 8, epochs: 8 })
        ));
    }

    #[test]
    fn bit_table_matches_generic_precomputation() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let params = TbidsParams::setup(16, 2, &mut rng).unwrap();
        let two = IdentityVector::new([b"a".to_vec(), b"bc".to_vec()]).unwrap();
        for epoch in 0..16 {
            for scheme in [SchemeKind::Flat, SchemeKind::ForwardSecure] {
                let signer = params.signer_identity(scheme, epoch, &two).unwrap();
                assert_eq!(
                    params.signer_precomputation(scheme, epoch, &two).unwrap(),
                    hibs::precompute(params.hibs_params(scheme), &signer).unwrap()
                );
            }
        }
    }

    #[test]
    fn fused_encoding_is_unambiguous() {
        // naive concatenation would map both to "21a"
        let a = fused_identity_level(2, &id("1a"));
        let b = fused_identity_level(21, &id("a"));
        assert_ne!(a, b);
        let two = IdentityVector::new([b"a".to_vec(), b"b".to_vec()]).unwrap();
        assert_ne!(fused_identity_level(0, &two), fused_identity_level(0, &id("ab")));
    }

    #[test]
    fn window_accepts_neighbours_only() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let params = TbidsParams::setup(16, 1, &mut rng).unwrap();
        let (pk, msk) = flat_keygen(&params, &mut rng);
        let vk = VerifyingKey { scheme: SchemeKind::Flat, pk };
        let cfg = EpochConfig::new(1_000, 60, 1).unwrap();
        let key = flat_delegate(&params, &msk, 5, &id("a"), &mut rng).unwrap();
        let sig = key.sign(b"m", &mut rng);
        let at = |e: u64| cfg.epoch_start(e) + 30;
        assert_eq!(matched_epoch(&params, &vk, at(5), &id("a"), b"m", &sig, &cfg), Some(5));
        assert!(verify_with_window(&params, &vk, at(6), &id("a"), b"m", &sig, &cfg));
        assert!(verify_with_window(&params, &vk, at(4), &id("a"), b"m", &sig, &cfg));
        assert!(!verify_with_window(&params, &vk, at(7), &id("a"), b"m", &sig, &cfg));
        assert!(!verify_with_window(&params, &vk, 999, &id("a"), b"m", &sig, &cfg));
        let strict = EpochConfig { window: 0, ..cfg };
        assert!(!verify_with_window(&params, &vk, at(6), &id("a"), b"m", &sig, &strict));
    }
}
