//! Forward-secure master state over the binary epoch tree.
//!
//! The state is a stack of node keys. Its top is always the leaf key for the
//! current epoch; below it sit the right siblings of every left turn on the
//! path from the root to that leaf, deepest nearest the top. Updating pops
//! the leaf and descends from the next stacked node, so a key for any epoch
//! at or before the current one is never reachable again.

use std::fmt;

use rand_core::{CryptoRng, RngCore};

use super::epoch::NodeLabel;
use super::{DelegatedEpochKey, SchemeKind, TbidsParams, MAX_EPOCH_BITS};
use crate::error::{Error, Result};
use crate::hibe::{self, DelegatedKey, IdentityVector, MasterSecretKey, ParentKey, PublicKey, PublicParams};

/// Secret held at a tree node. Only the root holds the master key.
#[derive(Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum NodeSecret {
    Root(MasterSecretKey),
    Node(DelegatedKey),
}

#[derive(Clone, PartialEq, Eq)]
pub struct StackEntry {
    pub label: NodeLabel,
    pub secret: NodeSecret,
}

impl StackEntry {
    fn derive_child<R: RngCore + CryptoRng>(
        &self,
        pp: &PublicParams,
        bit: bool,
        rng: &mut R,
    ) -> Result<StackEntry> {
        let label = self.label.child(bit);
        let target = IdentityVector::new(label.levels())?;
        let parent = match &self.secret {
            NodeSecret::Root(msk) => ParentKey::Master(msk),
            NodeSecret::Node(key) => ParentKey::Delegated(key),
        };
        let key = hibe::delegate(pp, parent, &target, rng)?;
        Ok(StackEntry { label, secret: NodeSecret::Node(key) })
    }
}

impl fmt::Debug for StackEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StackEntry({:?})", self.label)
    }
}

/// Pops the top node and walks left down to a leaf, pushing every right
/// child on the way. Returns the leaf; the stack keeps the right siblings.
pub fn dfeval<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    epoch_bits: u32,
    stack: &mut Vec<StackEntry>,
    rng: &mut R,
) -> Result<StackEntry> {
    let mut node = stack.pop().ok_or(Error::EpochsExhausted)?;
    while !node.label.is_leaf(epoch_bits) {
        let left = node.derive_child(pp, false, rng)?;
        let right = node.derive_child(pp, true, rng)?;
        stack.push(right);
        // the internal node's key is dropped (and wiped) here
        node = left;
    }
    Ok(node)
}

/// Forward-secure master state: current epoch plus the node-key stack.
#[derive(Clone, PartialEq, Eq)]
pub struct FsSecretKeyState {
    epoch_bits: u32,
    identity_levels: usize,
    current_epoch: u64,
    stack: Vec<StackEntry>,
}

/// Generates the master key and immediately descends to the leaf of epoch
/// 0. The root key does not survive this call.
pub fn fs_gen<R: RngCore + CryptoRng>(
    params: &TbidsParams,
    rng: &mut R,
) -> (PublicKey, FsSecretKeyState) {
    let pp = params.hibs_params(SchemeKind::ForwardSecure);
    let pair = hibe::gen(pp, rng);
    let mut stack = vec![StackEntry { label: NodeLabel::root(), secret: NodeSecret::Root(pair.msk) }];
    let leaf = dfeval(pp, params.epoch_bits(), &mut stack, rng)
        .expect("a fresh tree has at least one leaf");
    stack.push(leaf);
    let state = FsSecretKeyState {
        epoch_bits: params.epoch_bits(),
        identity_levels: params.identity_levels(),
        current_epoch: 0,
        stack,
    };
    (pair.pk, state)
}

/// Labels the stack must hold, bottom to top, while at `epoch`.
pub(crate) fn frontier(epoch: u64, epoch_bits: u32) -> Result<Vec<NodeLabel>> {
    let leaf = NodeLabel::leaf(epoch, epoch_bits)?;
    let mut labels: Vec<NodeLabel> = (0..leaf.len())
        .filter(|&k| !leaf.bits()[k])
        .map(|k| NodeLabel::from_bits(leaf.bits()[..k].to_vec()).child(true))
        .collect();
    labels.push(leaf);
    Ok(labels)
}

impl FsSecretKeyState {
    /// Rebuilds a state read from storage, checking that the stack is
    /// exactly the frontier of `current_epoch` and that every key has the
    /// depth its label implies.
    pub fn from_parts(
        epoch_bits: u32,
        identity_levels: usize,
        current_epoch: u64,
        stack: Vec<StackEntry>,
    ) -> Result<Self> {
        if !(1..=MAX_EPOCH_BITS).contains(&epoch_bits) || identity_levels == 0 {
            return Err(Error::InvalidParams("state dimensions out of range".into()));
        }
        let expected = frontier(current_epoch, epoch_bits)?;
        let labels: Vec<&NodeLabel> = stack.iter().map(|e| &e.label).collect();
        if labels.len() != expected.len() || labels.iter().zip(&expected).any(|(a, b)| *a != b) {
            return Err(Error::InvalidParams("stack is not the frontier of the current epoch".into()));
        }
        let total = epoch_bits as usize + identity_levels + 1;
        for entry in &stack {
            match &entry.secret {
                NodeSecret::Root(_) => {
                    return Err(Error::InvalidParams("persisted state holds the root key".into()))
                }
                NodeSecret::Node(key) => {
                    if key.identity().levels() != entry.label.levels().as_slice() {
                        return Err(Error::InvalidParams("node key identity mismatch".into()));
                    }
                    if key.b().len() != total - entry.label.len() {
                        return Err(Error::WrongKeyDepth {
                            expected: total - entry.label.len(),
                            found: key.b().len(),
                        });
                    }
                }
            }
        }
        Ok(Self { epoch_bits, identity_levels, current_epoch, stack })
    }

    pub fn current_epoch(&self) -> u64 {
        self.current_epoch
    }

    pub fn epoch_bits(&self) -> u32 {
        self.epoch_bits
    }

    pub fn identity_levels(&self) -> usize {
        self.identity_levels
    }

    pub fn epochs(&self) -> u64 {
        1u64 << self.epoch_bits
    }

    /// Bottom to top.
    pub fn stack(&self) -> &[StackEntry] {
        &self.stack
    }

    pub fn labels(&self) -> Vec<NodeLabel> {
        self.stack.iter().map(|e| e.label.clone()).collect()
    }

    pub fn is_exhausted(&self) -> bool {
        self.current_epoch + 1 >= self.epochs()
    }

    fn check_params(&self, params: &TbidsParams) -> Result<()> {
        if params.epoch_bits() != self.epoch_bits || params.identity_levels() != self.identity_levels {
            return Err(Error::InvalidParams("state does not belong to these parameters".into()));
        }
        Ok(())
    }

    /// Moves to the next epoch. The current leaf key is wiped; on error the
    /// state is left untouched.
    pub fn update<R: RngCore + CryptoRng>(&mut self, params: &TbidsParams, rng: &mut R) -> Result<()> {
        self.check_params(params)?;
        if self.is_exhausted() {
            return Err(Error::EpochsExhausted);
        }
        let pp = params.hibs_params(SchemeKind::ForwardSecure);
        let mut rest: Vec<StackEntry> = self.stack[..self.stack.len() - 1].to_vec();
        let leaf = dfeval(pp, self.epoch_bits, &mut rest, rng)?;
        debug_assert_eq!(leaf.label.value(), self.current_epoch + 1);
        rest.push(leaf);
        // dropping the old stack wipes the consumed leaf
        self.stack = rest;
        self.current_epoch += 1;
        Ok(())
    }

    /// Delegates for `(epoch, id)`; only the current epoch is possible.
    pub fn delegate<R: RngCore + CryptoRng>(
        &self,
        params: &TbidsParams,
        epoch: u64,
        id: &IdentityVector,
        rng: &mut R,
    ) -> Result<DelegatedEpochKey> {
        self.check_params(params)?;
        if epoch != self.current_epoch {
            return Err(Error::WrongEpoch { requested: epoch, current: self.current_epoch });
        }
        let target = params.signer_identity(SchemeKind::ForwardSecure, epoch, id)?;
        let leaf = match &self.stack.last().expect("state always holds its leaf").secret {
            NodeSecret::Node(key) => key,
            NodeSecret::Root(_) => unreachable!("root never persists past generation"),
        };
        let pp = params.hibs_params(SchemeKind::ForwardSecure);
        let inner = hibe::delegate(pp, ParentKey::Delegated(leaf), &target, rng)?;
        DelegatedEpochKey::from_delegation(params, SchemeKind::ForwardSecure, epoch, id.clone(), inner)
    }
}

impl fmt::Debug for FsSecretKeyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FsSecretKeyState")
            .field("current_epoch", &self.current_epoch)
            .field("labels", &self.labels())
            .finish_non_exhaustive()
    }
}
