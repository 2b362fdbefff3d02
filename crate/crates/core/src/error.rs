use thiserror::Error;

use crate::codec::DecodeError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("multi-pairing over an empty sequence")]
    EmptyPairing,

    #[error("hierarchy depth must be at least 1")]
    ZeroDepth,

    #[error("identity depth {depth} exceeds the maximum depth {max}")]
    DepthExceeded { depth: usize, max: usize },

    #[error("identity must have at least one level and no empty levels")]
    InvalidIdentity,

    #[error("parent identity is not a strict prefix of the target identity")]
    NotPrefix,

    #[error("key depth {found} does not match the required depth {expected}")]
    WrongKeyDepth { expected: usize, found: usize },

    #[error("ciphertext depth {ciphertext} does not match key depth {key}")]
    CiphertextDepthMismatch { key: usize, ciphertext: usize },

    #[error("epoch {epoch} is outside [0, {epochs})")]
    EpochOutOfRange { epoch: u64, epochs: u64 },

    #[error("timestamp {ts} precedes the epoch origin {t0}")]
    TimestampBeforeOrigin { ts: u64, t0: u64 },

    #[error("epoch length must be positive")]
    ZeroEpochLength,

    #[error("no epochs remain")]
    EpochsExhausted,

    #[error("key state is at epoch {current}; epoch {requested} cannot be delegated")]
    WrongEpoch { requested: u64, current: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Decode(#[from] DecodeError),
}
