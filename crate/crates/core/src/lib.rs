//! Time-bound identity-based signatures over BLS12-381.
//!
//! Layers, bottom up:
//!
//! * [`group`]: the pairing group and hashing into scalars.
//! * [`hibe`]: the Boneh-Boyen-Goh hierarchical IBE.
//! * [`hibs`]: hierarchical signatures from the HIBE via the Naor transform.
//! * [`tbids`]: epoch-bound delegation, flat and forward-secure.
//! * [`codec`]: wire envelopes.
//! * [`batch`]: batch sign/verify, parallel behind the `parallel` feature.
//!
//! No function reads ambient randomness; every randomized operation takes
//! an rng.

pub mod batch;
pub mod codec;
pub mod error;
pub mod group;
pub mod hibe;
pub mod hibs;
pub mod tbids;

pub use error::{Error, Result};
pub use hibe::{IdentityVector, MasterSecretKey, PublicKey};
pub use tbids::{
    DelegatedEpochKey, EpochConfig, FsSecretKeyState, SchemeKind, TbidsParams, TbidsSignature,
    VerifyingKey,
};
