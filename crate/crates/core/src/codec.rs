//! Binary envelopes for every persisted or transmitted object.
//!
//! ```text
//! magic "TBID" | version u8 | kind u8 | curve u8 | body
//! ```
//!
//! Integers are big-endian, points are compressed, and decoding checks every
//! point for curve and subgroup membership. The text form wraps the binary
//! envelope in base64 between `-----BEGIN TBIDS <KIND>-----` banners.

use std::fmt;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use thiserror::Error;

use crate::group::{
    G1Affine, G1Projective, G2Affine, G2Projective, CURVE_BLS12_381, G1_COMPRESSED, G2_COMPRESSED,
};
use crate::hibe::{DelegatedKey, IdentityVector, MasterSecretKey, PublicKey, PublicParams};
use crate::hibs::{HibsSignature, SignerPrecomputation};
use crate::tbids::{
    DelegatedEpochKey, EpochConfig, FsSecretKeyState, NodeLabel, NodeSecret, SchemeKind,
    StackEntry, TbidsParams, TbidsSignature, MAX_EPOCH_BITS,
};

pub const MAGIC: [u8; 4] = *b"TBID";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 7;

pub const PUBLIC_KEY_BODY_LEN: usize = G2_COMPRESSED;
pub const MASTER_SK_BODY_LEN: usize = G1_COMPRESSED;
pub const SIGNATURE_BODY_LEN: usize = G1_COMPRESSED + G2_COMPRESSED;
pub const EPOCH_CONFIG_BODY_LEN: usize = 8 + 8 + 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown object kind {0}")]
    UnknownKind(u8),
    #[error("unknown curve id {0}")]
    UnknownCurve(u8),
    #[error("expected a {expected} envelope, found {found}")]
    KindMismatch { expected: ObjectKind, found: ObjectKind },
    #[error("truncated input")]
    Truncated,
    #[error("{0} trailing bytes after body")]
    TrailingBytes(usize),
    #[error("point is not a valid compressed curve point")]
    InvalidPoint,
    #[error("point is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("depth mismatch: {0}")]
    DepthMismatch(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("bad armor: {0}")]
    BadArmor(String),
}

type DResult<T> = std::result::Result<T, DecodeError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ObjectKind {
    Params = 1,
    MasterPk = 2,
    MasterSk = 3,
    DelegatedEpochKey = 4,
    FsState = 5,
    Signature = 6,
    EpochConfig = 7,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 7] = [
        Self::Params,
        Self::MasterPk,
        Self::MasterSk,
        Self::DelegatedEpochKey,
        Self::FsState,
        Self::Signature,
        Self::EpochConfig,
    ];

    pub fn from_u8(v: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| *k as u8 == v)
    }

    /// Banner label used by the text form.
    pub fn label(self) -> &'static str {
        match self {
            Self::Params => "PARAMS",
            Self::MasterPk => "PUBLIC KEY",
            Self::MasterSk => "MASTER SECRET KEY",
            Self::DelegatedEpochKey => "DELEGATED EPOCH KEY",
            Self::FsState => "FS STATE",
            Self::Signature => "SIGNATURE",
            Self::EpochConfig => "EPOCH CONFIG",
        }
    }

    /// Whether the object holds secret material.
    pub fn is_secret(self) -> bool {
        matches!(self, Self::MasterSk | Self::DelegatedEpochKey | Self::FsState)
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Params => "params",
            Self::MasterPk => "master-pk",
            Self::MasterSk => "master-sk",
            Self::DelegatedEpochKey => "delegated-epoch-key",
            Self::FsState => "fs-state",
            Self::Signature => "signature",
            Self::EpochConfig => "epoch-config",
        })
    }
}

/// An object with a fixed envelope kind and body layout.
pub trait WireObject: Sized {
    const KIND: ObjectKind;
    fn encode_body(&self, out: &mut Vec<u8>);
    fn decode_body(r: &mut Reader<'_>) -> DResult<Self>;
}

pub fn encode<T: WireObject>(obj: &T) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 256);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(T::KIND as u8);
    out.push(CURVE_BLS12_381);
    obj.encode_body(&mut out);
    out
}

/// Parses and validates the envelope header, returning the kind and body.
pub fn parse_header(bytes: &[u8]) -> DResult<(ObjectKind, &[u8])> {
    if bytes.len() < HEADER_LEN {
        return Err(if bytes.len() >= 4 && bytes[..4] != MAGIC {
            DecodeError::BadMagic
        } else {
            DecodeError::Truncated
        });
    }
    if bytes[..4] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::UnsupportedVersion(bytes[4]));
    }
    let kind = ObjectKind::from_u8(bytes[5]).ok_or(DecodeError::UnknownKind(bytes[5]))?;
    if bytes[6] != CURVE_BLS12_381 {
        return Err(DecodeError::UnknownCurve(bytes[6]));
    }
    Ok((kind, &bytes[HEADER_LEN..]))
}

pub fn decode<T: WireObject>(bytes: &[u8]) -> DResult<T> {
    let (kind, body) = parse_header(bytes)?;
    if kind != T::KIND {
        return Err(DecodeError::KindMismatch { expected: T::KIND, found: kind });
    }
    decode_body_exact(body)
}

fn decode_body_exact<T: WireObject>(body: &[u8]) -> DResult<T> {
    let mut r = Reader::new(body);
    let obj = T::decode_body(&mut r)?;
    r.finish()?;
    Ok(obj)
}

/// Any decodable object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Params(TbidsParams),
    MasterPk(PublicKey),
    MasterSk(MasterSecretKey),
    DelegatedEpochKey(DelegatedEpochKey),
    FsState(FsSecretKeyState),
    Signature(TbidsSignature),
    EpochConfig(EpochConfig),
}

/// A group element held by a decoded object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupElement {
    G1(G1Affine),
    G2(G2Affine),
}

impl GroupElement {
    pub fn is_valid(&self) -> bool {
        match self {
            Self::G1(p) => bool::from(p.is_on_curve() & p.is_torsion_free()),
            Self::G2(p) => bool::from(p.is_on_curve() & p.is_torsion_free()),
        }
    }
}

impl Object {
    pub fn kind(&self) -> ObjectKind {
        match self {
            Self::Params(_) => ObjectKind::Params,
            Self::MasterPk(_) => ObjectKind::MasterPk,
            Self::MasterSk(_) => ObjectKind::MasterSk,
            Self::DelegatedEpochKey(_) => ObjectKind::DelegatedEpochKey,
            Self::FsState(_) => ObjectKind::FsState,
            Self::Signature(_) => ObjectKind::Signature,
            Self::EpochConfig(_) => ObjectKind::EpochConfig,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        match self {
            Self::Params(x) => encode(x),
            Self::MasterPk(x) => encode(x),
            Self::MasterSk(x) => encode(x),
            Self::DelegatedEpochKey(x) => encode(x),
            Self::FsState(x) => encode(x),
            Self::Signature(x) => encode(x),
            Self::EpochConfig(x) => encode(x),
        }
    }

    /// Every group element the object carries.
    pub fn group_elements(&self) -> Vec<GroupElement> {
        let g1 = |p: &G1Projective| GroupElement::G1(G1Affine::from(p));
        let g2 = |p: &G2Projective| GroupElement::G2(G2Affine::from(p));
        match self {
            Self::Params(p) => {
                let pp = p.hibe();
                [pp.g2(), pp.g3()].into_iter().chain(pp.h()).map(g1).collect()
            }
            Self::MasterPk(pk) => vec![g2(pk.point())],
            Self::MasterSk(sk) => vec![g1(sk.point())],
            Self::DelegatedEpochKey(k) => {
                let inner = k.inner();
                let pre = k.precomputation();
                let mut out = vec![g1(inner.a0()), g2(inner.a1())];
                out.extend(inner.b().iter().map(g1));
                out.push(g1(&pre.t));
                out.push(g1(&pre.message_generator));
                out
            }
            Self::FsState(s) => {
                let mut out = Vec::new();
                for entry in s.stack() {
                    match &entry.secret {
                        NodeSecret::Root(msk) => out.push(g1(msk.point())),
                        NodeSecret::Node(key) => {
                            out.push(g1(key.a0()));
                            out.push(g2(key.a1()));
                            out.extend(key.b().iter().map(g1));
                        }
                    }
                }
                out
            }
            Self::Signature(s) => vec![g1(&s.0.a0), g2(&s.0.a1)],
            Self::EpochConfig(_) => Vec::new(),
        }
    }
}

pub fn decode_any(bytes: &[u8]) -> DResult<Object> {
    let (kind, body) = parse_header(bytes)?;
    Ok(match kind {
        ObjectKind::Params => Object::Params(decode_body_exact(body)?),
        ObjectKind::MasterPk => Object::MasterPk(decode_body_exact(body)?),
        ObjectKind::MasterSk => Object::MasterSk(decode_body_exact(body)?),
        ObjectKind::DelegatedEpochKey => Object::DelegatedEpochKey(decode_body_exact(body)?),
        ObjectKind::FsState => Object::FsState(decode_body_exact(body)?),
        ObjectKind::Signature => Object::Signature(decode_body_exact(body)?),
        ObjectKind::EpochConfig => Object::EpochConfig(decode_body_exact(body)?),
    })
}

// ---- text form ----

const ARMOR_WIDTH: usize = 64;

/// Wraps an encoded envelope in banner lines. The label is taken from the
/// envelope's kind byte.
pub fn to_armor(envelope: &[u8]) -> DResult<String> {
    let (kind, _) = parse_header(envelope)?;
    let b64 = STANDARD.encode(envelope);
    let mut out = format!("-----BEGIN TBIDS {}-----\n", kind.label());
    for chunk in b64.as_bytes().chunks(ARMOR_WIDTH) {
        out.push_str(std::str::from_utf8(chunk).expect("base64 is ascii"));
        out.push('\n');
    }
    out.push_str(&format!("-----END TBIDS {}-----\n", kind.label()));
    Ok(out)
}

pub fn from_armor(text: &str) -> DResult<Vec<u8>> {
    let bad = |m: &str| DecodeError::BadArmor(m.to_string());
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let begin = lines.next().ok_or_else(|| bad("empty input"))?;
    let label = begin
        .strip_prefix("-----BEGIN TBIDS ")
        .and_then(|l| l.strip_suffix("-----"))
        .ok_or_else(|| bad("missing BEGIN banner"))?;
    let end = format!("-----END TBIDS {label}-----");
    let mut b64 = String::new();
    let mut closed = false;
    for line in lines.by_ref() {
        if line == end {
            closed = true;
            break;
        }
        b64.push_str(line);
    }
    if !closed {
        return Err(bad("missing END banner"));
    }
    if lines.next().is_some() {
        return Err(bad("content after END banner"));
    }
    let bytes = STANDARD.decode(b64).map_err(|e| bad(&e.to_string()))?;
    let (kind, _) = parse_header(&bytes)?;
    if kind.label() != label {
        return Err(bad("banner label does not match envelope kind"));
    }
    Ok(bytes)
}

/// Accepts either the binary envelope or its text form.
pub fn unwrap_any(input: &[u8]) -> DResult<Vec<u8>> {
    if input.starts_with(&MAGIC) {
        return Ok(input.to_vec());
    }
    let text = std::str::from_utf8(input).map_err(|_| DecodeError::BadMagic)?;
    if text.trim_start().starts_with("-----BEGIN") {
        from_armor(text)
    } else {
        Err(DecodeError::BadMagic)
    }
}

pub fn decode_auto<T: WireObject>(input: &[u8]) -> DResult<T> {
    decode(&unwrap_any(input)?)
}

// ---- size table ----

/// Params body for a hierarchy of depth `depth`.
pub fn params_body_len(depth: usize) -> usize {
    3 + (2 + depth) * G1_COMPRESSED
}

/// Delegated epoch key body for identity levels of the given byte lengths.
pub fn delegated_key_body_len(level_lens: &[usize]) -> usize {
    1 + 1 + 8 + 1 + level_lens.iter().map(|l| 4 + l).sum::<usize>()
        + G1_COMPRESSED
        + G2_COMPRESSED
        + 1
        + 3 * G1_COMPRESSED
}

/// FS state body at `epoch`; determined by the frontier of that epoch.
pub fn fs_state_body_len(epoch_bits: u32, identity_levels: usize, epoch: u64) -> usize {
    let total = epoch_bits as usize + identity_levels + 1;
    let leaf_len = epoch_bits as usize;
    let mut label_lens: Vec<usize> = (0..leaf_len)
        .filter(|k| (epoch >> (leaf_len - 1 - k)) & 1 == 0)
        .map(|k| k + 1)
        .collect();
    label_lens.push(leaf_len);
    1 + 1 + 8 + 1
        + label_lens
            .iter()
            .map(|&l| 1 + 4 + G1_COMPRESSED + G2_COMPRESSED + 1 + (total - l) * G1_COMPRESSED)
            .sum::<usize>()
}

// ---- primitives ----

/// Cursor over a body.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn bytes(&mut self, n: usize) -> DResult<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(DecodeError::Truncated)?;
        let out = self.buf.get(self.pos..end).ok_or(DecodeError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    pub fn u8(&mut self) -> DResult<u8> {
        Ok(self.bytes(1)?[0])
    }

    pub fn u32(&mut self) -> DResult<u32> {
        Ok(u32::from_be_bytes(self.bytes(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> DResult<u64> {
        Ok(u64::from_be_bytes(self.bytes(8)?.try_into().expect("8 bytes")))
    }

    pub fn g1(&mut self) -> DResult<G1Projective> {
        let raw: [u8; G1_COMPRESSED] = self.bytes(G1_COMPRESSED)?.try_into().expect("48 bytes");
        let p = Option::<G1Affine>::from(G1Affine::from_compressed_unchecked(&raw))
            .ok_or(DecodeError::InvalidPoint)?;
        if !bool::from(p.is_torsion_free()) {
            return Err(DecodeError::NotInSubgroup);
        }
        Ok(p.into())
    }

    pub fn g2(&mut self) -> DResult<G2Projective> {
        let raw: [u8; G2_COMPRESSED] = self.bytes(G2_COMPRESSED)?.try_into().expect("96 bytes");
        let p = Option::<G2Affine>::from(G2Affine::from_compressed_unchecked(&raw))
            .ok_or(DecodeError::InvalidPoint)?;
        if !bool::from(p.is_torsion_free()) {
            return Err(DecodeError::NotInSubgroup);
        }
        Ok(p.into())
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(self) -> DResult<()> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(DecodeError::TrailingBytes(n)),
        }
    }
}

fn put_g1(out: &mut Vec<u8>, p: &G1Projective) {
    out.extend_from_slice(&G1Affine::from(p).to_compressed());
}

fn put_g2(out: &mut Vec<u8>, p: &G2Projective) {
    out.extend_from_slice(&G2Affine::from(p).to_compressed());
}

fn invalid(e: impl fmt::Display) -> DecodeError {
    DecodeError::InvalidField(e.to_string())
}

fn read_epoch_bits(r: &mut Reader<'_>) -> DResult<u32> {
    let bits = u32::from(r.u8()?);
    if !(1..=MAX_EPOCH_BITS).contains(&bits) {
        return Err(invalid(format!("epoch bits {bits}")));
    }
    Ok(bits)
}

fn read_identity_levels(r: &mut Reader<'_>) -> DResult<usize> {
    match r.u8()? {
        0 => Err(invalid("zero identity levels")),
        n => Ok(n as usize),
    }
}

// ---- bodies ----

/// `epoch_bits u8 | identity_levels u8 | depth u8 | g2 | g3 | h_1..h_depth`
impl WireObject for TbidsParams {
    const KIND: ObjectKind = ObjectKind::Params;

    fn encode_body(&self, out: &mut Vec<u8>) {
        let pp = self.hibe();
        out.push(self.epoch_bits() as u8);
        out.push(self.identity_levels() as u8);
        out.push(pp.max_depth() as u8);
        put_g1(out, pp.g2());
        put_g1(out, pp.g3());
        for h in pp.h() {
            put_g1(out, h);
        }
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        let bits = read_epoch_bits(r)?;
        let levels = read_identity_levels(r)?;
        let depth = r.u8()? as usize;
        let expected = bits as usize + levels + 1;
        if depth != expected {
            return Err(DecodeError::DepthMismatch(format!(
                "depth {depth}, expected {expected} for {bits} epoch bits and {levels} identity levels"
            )));
        }
        let g2 = r.g1()?;
        let g3 = r.g1()?;
        let h = (0..depth).map(|_| r.g1()).collect::<DResult<Vec<_>>>()?;
        let pp = PublicParams::from_parts(g2, g3, h).map_err(invalid)?;
        TbidsParams::from_hibe(bits, levels, pp).map_err(invalid)
    }
}

impl WireObject for PublicKey {
    const KIND: ObjectKind = ObjectKind::MasterPk;

    fn encode_body(&self, out: &mut Vec<u8>) {
        put_g2(out, self.point());
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        Ok(PublicKey::from_point(r.g2()?))
    }
}

impl WireObject for MasterSecretKey {
    const KIND: ObjectKind = ObjectKind::MasterSk;

    fn encode_body(&self, out: &mut Vec<u8>) {
        put_g1(out, self.point());
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        Ok(MasterSecretKey::from_point(r.g1()?))
    }
}

/// `scheme u8 | epoch_bits u8 | epoch u64 | level count u8 | (len u32, bytes)*
/// | a0 | a1 | b count u8 (= 1) | b | t | message generator`
impl WireObject for DelegatedEpochKey {
    const KIND: ObjectKind = ObjectKind::DelegatedEpochKey;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.push(self.scheme() as u8);
        out.push(self.epoch_bits() as u8);
        out.extend_from_slice(&self.epoch().to_be_bytes());
        let levels = self.identity().levels();
        out.push(levels.len() as u8);
        for level in levels {
            out.extend_from_slice(&(level.len() as u32).to_be_bytes());
            out.extend_from_slice(level);
        }
        let inner = self.inner();
        put_g1(out, inner.a0());
        put_g2(out, inner.a1());
        out.push(inner.b().len() as u8);
        for b in inner.b() {
            put_g1(out, b);
        }
        let pre = self.precomputation();
        put_g1(out, &pre.t);
        put_g1(out, &pre.message_generator);
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        let scheme_byte = r.u8()?;
        let scheme = SchemeKind::from_u8(scheme_byte)
            .ok_or_else(|| invalid(format!("scheme {scheme_byte}")))?;
        let bits = read_epoch_bits(r)?;
        let epoch = r.u64()?;
        if epoch >= 1u64 << bits {
            return Err(invalid(format!("epoch {epoch} outside a {bits}-bit tree")));
        }
        let count = read_identity_levels(r)?;
        let mut levels = Vec::with_capacity(count);
        for _ in 0..count {
            let len = r.u32()? as usize;
            levels.push(r.bytes(len)?.to_vec());
        }
        let identity = IdentityVector::new(levels).map_err(invalid)?;
        let a0 = r.g1()?;
        let a1 = r.g2()?;
        let b_count = r.u8()?;
        if b_count != 1 {
            return Err(DecodeError::DepthMismatch(format!(
                "delegated epoch key carries {b_count} open levels, expected 1"
            )));
        }
        let b = r.g1()?;
        let precomp = SignerPrecomputation { t: r.g1()?, message_generator: r.g1()? };
        DelegatedEpochKey::from_parts(scheme, bits, epoch, identity, a0, a1, b, precomp)
            .map_err(invalid)
    }
}

/// `epoch_bits u8 | identity_levels u8 | current u64 | count u8 | entries`,
/// each entry `label len u8 | label value u32 | a0 | a1 | b count u8 | b*`.
impl WireObject for FsSecretKeyState {
    const KIND: ObjectKind = ObjectKind::FsState;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.push(self.epoch_bits() as u8);
        out.push(self.identity_levels() as u8);
        out.extend_from_slice(&self.current_epoch().to_be_bytes());
        out.push(self.stack().len() as u8);
        for entry in self.stack() {
            out.push(entry.label.len() as u8);
            out.extend_from_slice(&(entry.label.value() as u32).to_be_bytes());
            let NodeSecret::Node(key) = &entry.secret else {
                unreachable!("persisted states never hold the root key")
            };
            put_g1(out, key.a0());
            put_g2(out, key.a1());
            out.push(key.b().len() as u8);
            for b in key.b() {
                put_g1(out, b);
            }
        }
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        let bits = read_epoch_bits(r)?;
        let levels = read_identity_levels(r)?;
        let total = bits as usize + levels + 1;
        if total > u8::MAX as usize {
            return Err(DecodeError::DepthMismatch(format!("depth {total} exceeds 255")));
        }
        let current = r.u64()?;
        if current >= 1u64 << bits {
            return Err(invalid(format!("epoch {current} outside a {bits}-bit tree")));
        }
        let count = r.u8()? as usize;
        if count == 0 || count > bits as usize + 1 {
            return Err(DecodeError::DepthMismatch(format!("stack of {count} entries")));
        }
        let mut stack = Vec::with_capacity(count);
        for _ in 0..count {
            let len = r.u8()? as u32;
            let value = r.u32()?;
            if len == 0 || len > bits || u64::from(value) >= 1u64 << len {
                return Err(invalid(format!("node label ({len}, {value})")));
            }
            let label = NodeLabel::from_bits(
                (0..len).rev().map(|s| (value >> s) & 1 == 1).collect(),
            );
            let a0 = r.g1()?;
            let a1 = r.g2()?;
            let b_count = r.u8()? as usize;
            if b_count != total - len as usize {
                return Err(DecodeError::DepthMismatch(format!(
                    "node of depth {len} carries {b_count} open levels, expected {}",
                    total - len as usize
                )));
            }
            let b = (0..b_count).map(|_| r.g1()).collect::<DResult<Vec<_>>>()?;
            let identity = IdentityVector::new(label.levels()).map_err(invalid)?;
            let key = DelegatedKey::from_raw(identity, a0, a1, b);
            stack.push(StackEntry { label, secret: NodeSecret::Node(key) });
        }
        FsSecretKeyState::from_parts(bits, levels, current, stack).map_err(invalid)
    }
}

/// `a0 (G1) | a1 (G2)`.
impl WireObject for TbidsSignature {
    const KIND: ObjectKind = ObjectKind::Signature;

    fn encode_body(&self, out: &mut Vec<u8>) {
        put_g1(out, &self.0.a0);
        put_g2(out, &self.0.a1);
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        Ok(TbidsSignature(HibsSignature { a0: r.g1()?, a1: r.g2()? }))
    }
}

/// `t0 u64 | epoch_length u64 | window u32`
impl WireObject for EpochConfig {
    const KIND: ObjectKind = ObjectKind::EpochConfig;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.t0.to_be_bytes());
        out.extend_from_slice(&self.epoch_length.to_be_bytes());
        out.extend_from_slice(&self.window.to_be_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> DResult<Self> {
        let t0 = r.u64()?;
        let len = r.u64()?;
        let window = r.u32()?;
        EpochConfig::new(t0, len, window).map_err(invalid)
    }
}
