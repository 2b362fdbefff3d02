use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_EPOCH_LENGTH: u64 = 3600;
pub const DEFAULT_WINDOW: u32 = 1;
pub const DEFAULT_EPOCHS: u64 = 1 << 20;

/// How wall-clock seconds map to epoch indices, and how many neighbouring
/// epochs a verifier tolerates on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpochConfig {
    pub t0: u64,
    pub epoch_length: u64,
    pub window: u32,
}

impl EpochConfig {
    pub fn new(t0: u64, epoch_length: u64, window: u32) -> Result<Self> {
        if epoch_length == 0 {
            return Err(Error::ZeroEpochLength);
        }
        Ok(Self { t0, epoch_length, window })
    }

    pub fn epoch_at(&self, ts: u64) -> Result<u64> {
        epoch_from_timestamp(ts, self)
    }

    /// First second of `epoch`.
    pub fn epoch_start(&self, epoch: u64) -> u64 {
        self.t0 + epoch * self.epoch_length
    }

    /// Epochs to try for a verifier whose clock says `current`: the current
    /// one first, then `-1, +1, -2, +2, ..` out to the window, clipped to
    /// `[0, epochs)`.
    pub fn candidate_epochs(&self, current: u64, epochs: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(1 + 2 * self.window as usize);
        if current < epochs {
            out.push(current);
        }
        for d in 1..=u64::from(self.window) {
            if let Some(before) = current.checked_sub(d) {
                if before < epochs {
                    out.push(before);
                }
            }
            if let Some(after) = current.checked_add(d) {
                if after < epochs {
                    out.push(after);
                }
            }
        }
        out
    }
}

impl Default for EpochConfig {
    fn default() -> Self {
        Self { t0: 0, epoch_length: DEFAULT_EPOCH_LENGTH, window: DEFAULT_WINDOW }
    }
}

/// `floor((ts - t0) / epoch_length)`.
pub fn epoch_from_timestamp(ts: u64, cfg: &EpochConfig) -> Result<u64> {
    if cfg.epoch_length == 0 {
        return Err(Error::ZeroEpochLength);
    }
    if ts < cfg.t0 {
        return Err(Error::TimestampBeforeOrigin { ts, t0: cfg.t0 });
    }
    Ok((ts - cfg.t0) / cfg.epoch_length)
}

/// Node of the binary epoch tree: the path from the root, most significant
/// bit first. The root is the empty label; leaves have `epoch_bits` bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeLabel {
    bits: Vec<bool>,
}

impl NodeLabel {
    pub fn root() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Leaf label of `epoch` in a tree of depth `epoch_bits`.
    pub fn leaf(epoch: u64, epoch_bits: u32) -> Result<Self> {
        check_epoch(epoch, epoch_bits)?;
        Ok(Self {
            bits: (0..epoch_bits)
                .rev()
                .map(|shift| (epoch >> shift) & 1 == 1)
                .collect(),
        })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_leaf(&self, epoch_bits: u32) -> bool {
        self.bits.len() == epoch_bits as usize
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit);
        Self { bits }
    }

    pub fn is_prefix_of(&self, other: &NodeLabel) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// The path bits as integer, most significant first.
    pub fn value(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }

    /// Identity levels `"0"` / `"1"`.
    pub fn levels(&self) -> Vec<Vec<u8>> {
        self.bits
            .iter()
            .map(|&b| if b { b"1".to_vec() } else { b"0".to_vec() })
            .collect()
    }
}

impl fmt::Debug for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_epoch(epoch: u64, epoch_bits: u32) -> Result<()> {
    let epochs = 1u64.checked_shl(epoch_bits).unwrap_or(u64::MAX);
    if epoch_bits > 63 || epoch >= epochs {
        return Err(Error::EpochOutOfRange { epoch, epochs });
    }
    Ok(())
}

/// Fixed-width big-endian bit decomposition of `epoch`, one identity level
/// (`"0"` or `"1"`) per bit.
pub fn binid(epoch: u64, epoch_bits: u32) -> Result<Vec<Vec<u8>>> {
    Ok(NodeLabel::leaf(epoch, epoch_bits)?.levels())
}
