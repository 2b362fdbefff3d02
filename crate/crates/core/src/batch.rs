//! Batch signing and verification.
//!
//! With the `parallel` feature (default) the batch runs on the rayon global
//! pool; without it, or through the `_sequential` variants, items run in
//! order on the calling thread. Both produce identical output: per-item
//! randomness is derived from seeds drawn up front from the caller's rng.

use rand_chacha::ChaCha20Rng;
use rand_core::{CryptoRng, RngCore, SeedableRng};

use crate::hibe::IdentityVector;
use crate::tbids::{self, DelegatedEpochKey, TbidsParams, TbidsSignature, VerifyingKey};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One signature to check.
#[derive(Clone, Copy, Debug)]
pub struct VerifyItem<'a> {
    pub epoch: u64,
    pub identity: &'a IdentityVector,
    pub msg: &'a [u8],
    pub sig: &'a TbidsSignature,
}

fn verify_one(params: &TbidsParams, vk: &VerifyingKey, item: &VerifyItem<'_>) -> bool {
    tbids::verify(params, vk, item.epoch, item.identity, item.msg, item.sig)
}

pub fn verify_all(params: &TbidsParams, vk: &VerifyingKey, items: &[VerifyItem<'_>]) -> Vec<bool> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(|item| verify_one(params, vk, item)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        verify_all_sequential(params, vk, items)
    }
}

pub fn verify_all_sequential(
    params: &TbidsParams,
    vk: &VerifyingKey,
    items: &[VerifyItem<'_>],
) -> Vec<bool> {
    items.iter().map(|item| verify_one(params, vk, item)).collect()
}

fn draw_seeds<R: RngCore + CryptoRng>(n: usize, rng: &mut R) -> Vec<[u8; 32]> {
    (0..n)
        .map(|_| {
            let mut seed = [0u8; 32];
            rng.fill_bytes(&mut seed);
            seed
        })
        .collect()
}

fn sign_seeded(key: &DelegatedEpochKey, msg: &[u8], seed: [u8; 32]) -> TbidsSignature {
    key.sign(msg, &mut ChaCha20Rng::from_seed(seed))
}

pub fn sign_all<M, R>(key: &DelegatedEpochKey, msgs: &[M], rng: &mut R) -> Vec<TbidsSignature>
where
    M: AsRef<[u8]> + Sync,
    R: RngCore + CryptoRng,
{
    let seeds = draw_seeds(msgs.len(), rng);
    #[cfg(feature = "parallel")]
    {
        msgs.par_iter()
            .zip(seeds)
            .map(|(m, seed)| sign_seeded(key, m.as_ref(), seed))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        msgs.iter().zip(seeds).map(|(m, seed)| sign_seeded(key, m.as_ref(), seed)).collect()
    }
}

pub fn sign_all_sequential<M, R>(
    key: &DelegatedEpochKey,
    msgs: &[M],
    rng: &mut R,
) -> Vec<TbidsSignature>
where
    M: AsRef<[u8]>,
    R: RngCore + CryptoRng,
{
    let seeds = draw_seeds(msgs.len(), rng);
    msgs.iter().zip(seeds).map(|(m, seed)| sign_seeded(key, m.as_ref(), seed)).collect()
}

/// Runs `f` over `items` on the pool when `parallel` is enabled.
pub fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
