//! Boneh-Boyen-Goh hierarchical identity-based encryption in the type-3
//! setting: key material in `G1`, randomness carriers in `G2`.
//!
//! A key for `(I_1, .., I_k)` is `(a0, a1, b_{k+1}, .., b_l)` with
//!
//! ```text
//! a0 = g2^alpha * (h_1^H(I_1) ... h_k^H(I_k) * g3)^r
//! a1 = g^r            (in G2)
//! b_j = h_j^r
//! ```
//!
//! Identity levels are byte strings hashed with their 1-based level index so
//! that equal bytes at different levels map to unrelated exponents.

use std::fmt;

use group::Group;
use rand_core::{CryptoRng, RngCore};
use zeroize::Zeroize;

use crate::error::{Error, Result};
use crate::group::{
    hash_to_scalar, pairing, random_scalar, G1Affine, G1Projective, G2Affine, G2Projective, Gt,
    Scalar,
};

pub const IDENTITY_TAG: &[u8] = b"TBIDS-v1/identity-level";
pub const MESSAGE_TAG: &[u8] = b"TBIDS-v1/message-level";

fn tagged_level(tag: &[u8], level: usize, bytes: &[u8]) -> Scalar {
    let mut buf = Vec::with_capacity(4 + bytes.len());
    buf.extend_from_slice(&(level as u32).to_be_bytes());
    buf.extend_from_slice(bytes);
    hash_to_scalar(tag, &buf)
}

/// Exponent `H(I)` of identity bytes placed at `level` (1-based).
pub fn level_exponent(level: usize, bytes: &[u8]) -> Scalar {
    tagged_level(IDENTITY_TAG, level, bytes)
}

/// Exponent of a signed message placed at `level` (1-based).
pub fn message_exponent(level: usize, msg: &[u8]) -> Scalar {
    tagged_level(MESSAGE_TAG, level, msg)
}

/// A hierarchical identity `(I_1, .., I_k)`, `k >= 1`, no empty level.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IdentityVector {
    levels: Vec<Vec<u8>>,
}

impl IdentityVector {
    pub fn new<I, L>(levels: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<Vec<u8>>,
    {
        let levels: Vec<Vec<u8>> = levels.into_iter().map(Into::into).collect();
        if levels.is_empty() || levels.iter().any(|l| l.is_empty()) {
            return Err(Error::InvalidIdentity);
        }
        Ok(Self { levels })
    }

    /// Single-level identity.
    pub fn single(level: impl Into<Vec<u8>>) -> Result<Self> {
        Self::new([level.into()])
    }

    pub fn levels(&self) -> &[Vec<u8>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn is_prefix_of(&self, other: &IdentityVector) -> bool {
        self.len() <= other.len() && other.levels[..self.len()] == self.levels[..]
    }

    pub fn prefix(&self, len: usize) -> Option<IdentityVector> {
        (1..=self.len()).contains(&len).then(|| IdentityVector {
            levels: self.levels[..len].to_vec(),
        })
    }

    pub fn concat(&self, tail: &IdentityVector) -> IdentityVector {
        let mut levels = self.levels.clone();
        levels.extend(tail.levels.iter().cloned());
        IdentityVector { levels }
    }

    pub fn exponents(&self) -> Vec<Scalar> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| level_exponent(i + 1, l))
            .collect()
    }
}

impl fmt::Debug for IdentityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.levels.iter().map(|l| String::from_utf8_lossy(l)))
            .finish()
    }
}

/// Shared parameters: `g2`, `g3` and one generator `h_i` per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicParams {
    g2: G1Projective,
    g3: G1Projective,
    h: Vec<G1Projective>,
}

impl PublicParams {
    pub fn setup<R: RngCore + CryptoRng>(max_depth: usize, rng: &mut R) -> Result<Self> {
        if max_depth == 0 {
            return Err(Error::ZeroDepth);
        }
        Ok(Self {
            g2: G1Projective::random(&mut *rng),
            g3: G1Projective::random(&mut *rng),
            h: (0..max_depth).map(|_| G1Projective::random(&mut *rng)).collect(),
        })
    }

    pub fn from_parts(g2: G1Projective, g3: G1Projective, h: Vec<G1Projective>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::ZeroDepth);
        }
        Ok(Self { g2, g3, h })
    }

    pub fn max_depth(&self) -> usize {
        self.h.len()
    }

    pub fn g2(&self) -> &G1Projective {
        &self.g2
    }

    pub fn g3(&self) -> &G1Projective {
        &self.g3
    }

    /// Level generators `h_1..h_l`, zero-indexed.
    pub fn h(&self) -> &[G1Projective] {
        &self.h
    }

    /// Parameters for a shallower hierarchy sharing `g2`, `g3` and a prefix
    /// of the level generators.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        if depth > self.max_depth() {
            return Err(Error::DepthExceeded { depth, max: self.max_depth() });
        }
        Ok(Self { g2: self.g2, g3: self.g3, h: self.h[..depth].to_vec() })
    }

    /// `h_1^e_1 ... h_k^e_k * g3`.
    pub fn identity_point(&self, exponents: &[Scalar]) -> G1Projective {
        assert!(exponents.len() <= self.max_depth(), "identity deeper than parameters");
        self.h
            .iter()
            .zip(exponents)
            .fold(self.g3, |acc, (h, e)| acc + h * e)
    }

    fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.max_depth() {
            Err(Error::DepthExceeded { depth, max: self.max_depth() })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PublicKey(pub(crate) G2Projective);

impl PublicKey {
    pub fn from_point(p: G2Projective) -> Self {
        Self(p)
    }

    pub fn point(&self) -> &G2Projective {
        &self.0
    }
}

/// `g2^alpha`. Overwritten on drop.
#[derive(Clone, PartialEq, Eq)]
pub struct MasterSecretKey(pub(crate) G1Projective);

impl MasterSecretKey {
    pub fn from_point(p: G1Projective) -> Self {
        Self(p)
    }

    pub fn point(&self) -> &G1Projective {
        &self.0
    }
}

impl Drop for MasterSecretKey {
    fn drop(&mut self) {
        self.0.zeroize();
    }
}

impl fmt::Debug for MasterSecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MasterSecretKey(..)")
    }
}

#[derive(Clone, Debug)]
pub struct MasterKeyPair {
    pub pk: PublicKey,
    pub msk: MasterSecretKey,
}

impl MasterKeyPair {
    /// `e(msk, g^) == e(g2, pk)`.
    pub fn is_consistent(&self, pp: &PublicParams) -> bool {
        pairing(&G1Affine::from(self.msk.0), &G2Affine::generator())
            == pairing(&G1Affine::from(pp.g2), &G2Affine::from(self.pk.0))
    }
}

pub fn gen<R: RngCore + CryptoRng>(pp: &PublicParams, rng: &mut R) -> MasterKeyPair {
    let mut alpha = random_scalar(rng);
    let pair = MasterKeyPair {
        pk: PublicKey(G2Projective::generator() * alpha),
        msk: MasterSecretKey(pp.g2 * alpha),
    };
    alpha.zeroize();
    pair
}

/// Secret key for an identity vector. Overwritten on drop.
#[derive(Clone, PartialEq, Eq)]
pub struct DelegatedKey {
    identity: IdentityVector,
    a0: G1Projective,
    a1: G2Projective,
    b: Vec<G1Projective>,
}

impl DelegatedKey {
    pub fn from_parts(
        pp: &PublicParams,
        identity: IdentityVector,
        a0: G1Projective,
        a1: G2Projective,
        b: Vec<G1Projective>,
    ) -> Result<Self> {
        pp.check_depth(identity.len())?;
        let expected = pp.max_depth() - identity.len();
        if b.len() != expected {
            return Err(Error::WrongKeyDepth { expected, found: b.len() });
        }
        Ok(Self { identity, a0, a1, b })
    }

    /// Assembles a key without a parameter-depth check.
    pub(crate) fn from_raw(
        identity: IdentityVector,
        a0: G1Projective,
        a1: G2Projective,
        b: Vec<G1Projective>,
    ) -> Self {
        Self { identity, a0, a1, b }
    }

    pub fn depth(&self) -> usize {
        self.identity.len()
    }

    pub fn identity(&self) -> &IdentityVector {
        &self.identity
    }

    pub fn a0(&self) -> &G1Projective {
        &self.a0
    }

    pub fn a1(&self) -> &G2Projective {
        &self.a1
    }

    /// `b_{k+1}..b_l`.
    pub fn b(&self) -> &[G1Projective] {
        &self.b
    }

    /// Checks the key against `pk` with pairings:
    /// `e(F, a1) * e(g2, pk) == e(a0, g^)` and `e(b_j, g^) == e(h_j, a1)`.
    pub fn is_consistent(&self, pp: &PublicParams, pk: &PublicKey) -> bool {
        if self.depth() > pp.max_depth() || self.b.len() != pp.max_depth() - self.depth() {
            return false;
        }
        let f = pp.identity_point(&self.identity.exponents());
        let gh = G2Affine::generator();
        let a1 = G2Affine::from(self.a1);
        let main = crate::group::multi_pairing(&[
            (G1Affine::from(f), a1),
            (G1Affine::from(pp.g2), G2Affine::from(pk.0)),
            (G1Affine::from(-self.a0), gh),
        ]);
        if main.map_or(true, |v| v != Gt::identity()) {
            return false;
        }
        self.b.iter().zip(&pp.h[self.depth()..]).all(|(b, h)| {
            crate::group::multi_pairing(&[(G1Affine::from(b), gh), (G1Affine::from(-h), a1)])
                .is_ok_and(|v| v == Gt::identity())
        })
    }
}

impl Drop for DelegatedKey {
    fn drop(&mut self) {
        self.a0.zeroize();
        self.a1.zeroize();
        self.b.zeroize();
    }
}

impl fmt::Debug for DelegatedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelegatedKey")
            .field("identity", &self.identity)
            .field("remaining_levels", &self.b.len())
            .finish_non_exhaustive()
    }
}

/// Either end of a delegation edge.
#[derive(Clone, Copy, Debug)]
pub enum ParentKey<'a> {
    Master(&'a MasterSecretKey),
    Delegated(&'a DelegatedKey),
}

/// Raw `(a0, a1, b)` triple, before it is attached to an identity.
pub(crate) struct KeyParts {
    pub a0: G1Projective,
    pub a1: G2Projective,
    pub b: Vec<G1Projective>,
}

/// Master branch: key for depth `k = exponents.len()` with fresh `v`.
pub(crate) fn extract<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    msk: &MasterSecretKey,
    exponents: &[Scalar],
    rng: &mut R,
) -> KeyParts {
    let mut v = random_scalar(rng);
    let parts = KeyParts {
        a0: msk.0 + pp.identity_point(exponents) * v,
        a1: G2Projective::generator() * v,
        b: pp.h[exponents.len()..].iter().map(|h| h * v).collect(),
    };
    v.zeroize();
    parts
}

/// Child branch: extends a key at depth `k - 1` by one level.
///
/// `b` is `b_k..b_l`, `exponent` is `H(I_k)` and `level_point` is
/// `h_1^H(I_1) ... h_k^H(I_k) * g3`.
pub(crate) fn extend<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    a0: &G1Projective,
    a1: &G2Projective,
    b: &[G1Projective],
    exponent: &Scalar,
    level_point: &G1Projective,
    rng: &mut R,
) -> KeyParts {
    debug_assert!(!b.is_empty());
    let level = pp.max_depth() - b.len() + 1;
    let mut w = random_scalar(rng);
    let parts = KeyParts {
        a0: a0 + b[0] * exponent + level_point * w,
        a1: a1 + G2Projective::generator() * w,
        b: b[1..]
            .iter()
            .zip(&pp.h[level..])
            .map(|(b, h)| b + h * w)
            .collect(),
    };
    w.zeroize();
    parts
}

/// Delegates `parent` down to `target`.
///
/// From the master key any depth is reached in one step. From a delegated
/// key the one-level child rule is applied once per added level, each with
/// fresh randomness. A delegated parent must be a strict prefix of `target`.
pub fn delegate<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    parent: ParentKey<'_>,
    target: &IdentityVector,
    rng: &mut R,
) -> Result<DelegatedKey> {
    pp.check_depth(target.len())?;
    let exponents = target.exponents();
    match parent {
        ParentKey::Master(msk) => {
            let KeyParts { a0, a1, b } = extract(pp, msk, &exponents, rng);
            Ok(DelegatedKey { identity: target.clone(), a0, a1, b })
        }
        ParentKey::Delegated(key) => {
            if key.depth() >= target.len() || !key.identity.is_prefix_of(target) {
                return Err(Error::NotPrefix);
            }
            let mut level_point = pp.identity_point(&exponents[..key.depth()]);
            let mut parts = KeyParts { a0: key.a0, a1: key.a1, b: key.b.clone() };
            for (k, e) in exponents.iter().enumerate().skip(key.depth()) {
                level_point += pp.h[k] * e;
                let next = extend(pp, &parts.a0, &parts.a1, &parts.b, e, &level_point, rng);
                parts.a0.zeroize();
                parts.b.zeroize();
                parts = next;
            }
            Ok(DelegatedKey { identity: target.clone(), a0: parts.a0, a1: parts.a1, b: parts.b })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub c1: Gt,
    pub c2: G2Projective,
    pub c3: G1Projective,
    pub depth: usize,
}

pub(crate) fn encrypt_exponents<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    pk: &PublicKey,
    exponents: &[Scalar],
    m: &Gt,
    rng: &mut R,
) -> Ciphertext {
    let s = random_scalar(rng);
    encrypt_with_randomness(pp, pk, exponents, m, &s)
}

pub(crate) fn encrypt_with_randomness(
    pp: &PublicParams,
    pk: &PublicKey,
    exponents: &[Scalar],
    m: &Gt,
    s: &Scalar,
) -> Ciphertext {
    let blind = pairing(&G1Affine::from(pp.g2), &G2Affine::from(pk.0)) * s;
    Ciphertext {
        c1: blind + m,
        c2: G2Projective::generator() * s,
        c3: pp.identity_point(exponents) * s,
        depth: exponents.len(),
    }
}

pub fn encrypt<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    pk: &PublicKey,
    id: &IdentityVector,
    m: &Gt,
    rng: &mut R,
) -> Result<Ciphertext> {
    pp.check_depth(id.len())?;
    Ok(encrypt_exponents(pp, pk, &id.exponents(), m, rng))
}

/// `C1 * e(C3, a1) / e(a0, C2)`.
pub(crate) fn decrypt_parts(a0: &G1Projective, a1: &G2Projective, ct: &Ciphertext) -> Gt {
    ct.c1 + pairing(&G1Affine::from(ct.c3), &G2Affine::from(a1))
        - pairing(&G1Affine::from(a0), &G2Affine::from(ct.c2))
}

/// Decrypts with a key of exactly the ciphertext's depth.
pub fn decrypt(key: &DelegatedKey, ct: &Ciphertext) -> Result<Gt> {
    if key.depth() != ct.depth {
        return Err(Error::CiphertextDepthMismatch { key: key.depth(), ciphertext: ct.depth });
    }
    Ok(decrypt_parts(&key.a0, &key.a1, ct))
}

/// Random message in `GT`.
pub fn random_message<R: RngCore + CryptoRng>(rng: &mut R) -> Gt {
    Gt::random(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn id(levels: &[&str]) -> IdentityVector {
        IdentityVector::new(levels.iter().map(|l| l.as_bytes().to_vec())).unwrap()
    }

    fn fixture(depth: usize) -> (PublicParams, MasterKeyPair, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let pp = PublicParams::setup(depth, &mut rng).unwrap();
        let keys = gen(&pp, &mut rng);
        (pp, keys, rng)
    }

    #[test]
    fn identity_vector_rules() {
        assert_eq!(IdentityVector::new(Vec::<Vec<u8>>::new()), Err(Error::InvalidIdentity));
        assert_eq!(IdentityVector::new([b"a".to_vec(), vec![]]), Err(Error::InvalidIdentity));
        assert!(id(&["a"]).is_prefix_of(&id(&["a", "b"])));
        assert!(!id(&["b"]).is_prefix_of(&id(&["a", "b"])));
        assert!(!id(&["a", "b"]).is_prefix_of(&id(&["a"])));
    }

    #[test]
    fn same_bytes_different_levels_hash_apart() {
        assert_ne!(level_exponent(1, b"x"), level_exponent(2, b"x"));
        assert_ne!(level_exponent(2, b"x"), message_exponent(2, b"x"));
    }

    #[test]
    fn setup_contract() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(PublicParams::setup(0, &mut rng), Err(Error::ZeroDepth));
        let a = PublicParams::setup(3, &mut rng).unwrap();
        let b = PublicParams::setup(3, &mut rng).unwrap();
        assert_eq!(a.h().len(), 3);
        assert_ne!(a.g2(), b.g2());
    }

    #[test]
    fn gen_is_consistent_and_reproducible() {
        let (pp, keys, mut rng) = fixture(2);
        assert!(keys.is_consistent(&pp));
        assert_ne!(gen(&pp, &mut rng).pk, keys.pk);
        let again = gen(&pp, &mut ChaCha20Rng::seed_from_u64(5));
        assert_eq!(again.pk, gen(&pp, &mut ChaCha20Rng::seed_from_u64(5)).pk);
    }

    #[test]
    fn encrypt_decrypt_along_paths() {
        let (pp, keys, mut rng) = fixture(3);
        let m = random_message(&mut rng);
        let k1 = delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A"]), &mut rng).unwrap();
        let k2 = delegate(&pp, ParentKey::Delegated(&k1), &id(&["A", "B"]), &mut rng).unwrap();
        let direct = delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A", "B"]), &mut rng).unwrap();
        assert_ne!(k2, direct);
        for k in [&k1, &k2, &direct] {
            assert!(k.is_consistent(&pp, &keys.pk));
        }

        let ct1 = encrypt(&pp, &keys.pk, &id(&["A"]), &m, &mut rng).unwrap();
        assert_eq!(decrypt(&k1, &ct1).unwrap(), m);
        let ct2 = encrypt(&pp, &keys.pk, &id(&["A", "B"]), &m, &mut rng).unwrap();
        assert_eq!(decrypt(&k2, &ct2).unwrap(), m);
        assert_eq!(decrypt(&direct, &ct2).unwrap(), m);
        assert!(matches!(decrypt(&k1, &ct2), Err(Error::CiphertextDepthMismatch { .. })));

        let other = delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A", "C"]), &mut rng).unwrap();
        assert_ne!(decrypt(&other, &ct2).unwrap(), m);
    }

    #[test]
    fn identity_message_roundtrips() {
        let (pp, keys, mut rng) = fixture(1);
        let k = delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A"]), &mut rng).unwrap();
        let ct = encrypt(&pp, &keys.pk, &id(&["A"]), &Gt::identity(), &mut rng).unwrap();
        assert_eq!(decrypt(&k, &ct).unwrap(), Gt::identity());
    }

    #[test]
    fn delegation_errors() {
        let (pp, keys, mut rng) = fixture(3);
        let ka = delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A"]), &mut rng).unwrap();
        assert_eq!(
            delegate(&pp, ParentKey::Delegated(&ka), &id(&["B", "C"]), &mut rng),
            Err(Error::NotPrefix)
        );
        assert_eq!(
            delegate(&pp, ParentKey::Delegated(&ka), &id(&["A"]), &mut rng),
            Err(Error::NotPrefix)
        );
        assert_eq!(
            delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A", "B", "C", "D"]), &mut rng),
            Err(Error::DepthExceeded { depth: 4, max: 3 })
        );
    }

    #[test]
    fn delegation_rerandomizes() {
        let (pp, keys, mut rng) = fixture(2);
        let parent = delegate(&pp, ParentKey::Master(&keys.msk), &id(&["A"]), &mut rng).unwrap();
        let x = delegate(&pp, ParentKey::Delegated(&parent), &id(&["A", "B"]), &mut rng).unwrap();
        let y = delegate(&pp, ParentKey::Delegated(&parent), &id(&["A", "B"]), &mut rng).unwrap();
        assert_ne!(x.a1(), y.a1());
    }

    #[test]
    fn c2_carries_the_encryption_exponent() {
        let (pp, keys, mut rng) = fixture(2);
        let s = random_scalar(&mut rng);
        let m = random_message(&mut rng);
        let ct = encrypt_with_randomness(&pp, &keys.pk, &id(&["A"]).exponents(), &m, &s);
        let g = G1Affine::generator();
        assert_eq!(
            pairing(&g, &G2Affine::from(ct.c2)),
            pairing(&g, &G2Affine::generator()) * s
        );
    }
}
