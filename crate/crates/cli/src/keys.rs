//! Key lifecycle commands.

use std::path::{Path, PathBuf};

use rand_core::OsRng;
use tbids_core::codec::{self, Object};
use tbids_core::tbids::{self, flat_delegate, flat_keygen, fs_gen, NodeSecret};
use tbids_core::{
    DelegatedEpochKey, EpochConfig, Error, FsSecretKeyState, IdentityVector, SchemeKind, TbidsParams,
    TbidsSignature, VerifyingKey,
};
use tbids_core::hibe::{MasterSecretKey, PublicKey};
use tbids_harness::messages::pk_fingerprint;
use tbids_harness::store;

use crate::error::{CliError, CliResult};
use crate::files::{self, load};
use crate::{EpochArgs, When};

pub enum Source {
    Flat(PathBuf),
    Fs(PathBuf),
}

pub fn setup(levels: usize, epochs: u64, out: &Path, armor: bool) -> CliResult {
    let params = TbidsParams::setup(epochs, levels, &mut OsRng)?;
    files::save_public(out, &params, armor)?;
    println!(
        "epochs={} epoch_bits={} identity_levels={} depth={}",
        params.epochs(),
        params.epoch_bits(),
        params.identity_levels(),
        params.hibe().max_depth()
    );
    Ok(())
}

pub fn keygen(scheme: SchemeKind, params: &Path, out_pk: &Path, out_sk: &Path, armor: bool) -> CliResult {
    let params: TbidsParams = load(params)?;
    match scheme {
        SchemeKind::Flat => {
            let (pk, msk) = flat_keygen(&params, &mut OsRng);
            files::save_secret(out_sk, &msk, armor)?;
            files::save_public(out_pk, &pk, armor)?;
        }
        SchemeKind::ForwardSecure => {
            let (pk, state) = fs_gen(&params, &mut OsRng);
            files::save_secret(out_sk, &state, armor)?;
            files::save_public(out_pk, &pk, armor)?;
        }
    }
    println!("scheme={scheme}");
    Ok(())
}

pub fn epoch(when: When, epochs: EpochArgs, window: u32) -> CliResult {
    let cfg = epochs.config(window)?;
    let epoch = when.resolve(&epochs)?;
    let start = cfg.epoch_start(epoch);
    print!("epoch={epoch} start={start} end={}", start + cfg.epoch_length);
    if window > 0 {
        let accepted: Vec<String> =
            cfg.candidate_epochs(epoch, u64::MAX).iter().map(u64::to_string).collect();
        print!(" accepted={}", accepted.join(","));
    }
    println!();
    Ok(())
}

pub fn delegate(
    params: &Path,
    source: Source,
    epoch: u64,
    id: &IdentityVector,
    out: &Path,
    armor: bool,
) -> CliResult {
    let params: TbidsParams = load(params)?;
    let key = match source {
        Source::Flat(path) => {
            let msk: MasterSecretKey = load(&path)?;
            flat_delegate(&params, &msk, epoch, id, &mut OsRng)?
        }
        Source::Fs(path) => {
            let state: FsSecretKeyState = load(&path)?;
            state.delegate(&params, epoch, id, &mut OsRng).map_err(|e| match e {
                Error::WrongEpoch { requested, current } => CliError::Validation(format!(
                    "state is at epoch {current}; epoch {requested} is {}",
                    if requested < current { "erased" } else { "not reached yet (run update)" }
                )),
                other => other.into(),
            })?
        }
    };
    files::save_secret(out, &key, armor)?;
    println!("scheme={} epoch={}", key.scheme(), key.epoch());
    Ok(())
}

pub fn update(params: &Path, state_path: &Path) -> CliResult {
    let params: TbidsParams = load(params)?;
    let _lock = store::lock_state(state_path).map_err(|e| match e {
        store::LockError::Busy(_) => CliError::Validation(e.to_string()),
        store::LockError::Io(err) => CliError::io(&store::lock_path(state_path), err),
    })?;
    let raw = files::read_bytes(state_path)?;
    let mut state: FsSecretKeyState =
        codec::decode_auto(&raw).map_err(|e| CliError::decode(state_path, e))?;
    state.update(&params, &mut OsRng)?;
    files::save_secret(state_path, &state, files::is_armored(&raw))?;
    println!("epoch={}", state.current_epoch());
    Ok(())
}

pub fn sign(key: &Path, input: &Path, out: &Path, armor: bool) -> CliResult {
    let key: DelegatedEpochKey = load(key)?;
    let msg = files::read_input(input)?;
    let sig = key.sign(&msg, &mut OsRng);
    files::save_public(out, &sig, armor)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn verify(
    params: &Path,
    pk: &Path,
    scheme: SchemeKind,
    id: &IdentityVector,
    current: u64,
    window: u32,
    input: &Path,
    sig: &Path,
) -> CliResult {
    let params: TbidsParams = load(params)?;
    let pk: PublicKey = load(pk)?;
    let sig: TbidsSignature = load(sig)?;
    let msg = files::read_input(input)?;
    let vk = VerifyingKey { scheme, pk };
    // only the window matters for the candidate list
    let matched = EpochConfig { t0: 0, epoch_length: 1, window }
        .candidate_epochs(current, params.epochs())
        .into_iter()
        .find(|&e| tbids::verify(&params, &vk, e, id, &msg, &sig));
    match matched {
        Some(epoch) => {
            println!("VALID epoch={epoch}");
            Ok(())
        }
        None => {
            println!("INVALID");
            Err(CliError::Invalid("signature does not verify".into()))
        }
    }
}

pub fn inspect(path: &Path) -> CliResult {
    let raw = files::read_bytes(path)?;
    let bytes = codec::unwrap_any(&raw).map_err(|e| CliError::decode(path, e))?;
    let obj = codec::decode_any(&bytes).map_err(|e| CliError::decode(path, e))?;
    println!("kind={}", obj.kind().label().to_ascii_lowercase().replace(' ', "-"));
    println!("bytes={}", bytes.len());
    match &obj {
        Object::Params(p) => {
            println!("epochs={}", p.epochs());
            println!("epoch_bits={}", p.epoch_bits());
            println!("identity_levels={}", p.identity_levels());
            println!("depth={}", p.hibe().max_depth());
        }
        Object::MasterPk(pk) => println!("fingerprint={}", hex::encode(pk_fingerprint(pk))),
        Object::MasterSk(_) => println!("secret=true"),
        Object::DelegatedEpochKey(k) => {
            println!("secret=true");
            println!("scheme={}", k.scheme());
            println!("epoch={}", k.epoch());
            println!("identity={}", render_identity(k.identity()));
        }
        Object::FsState(s) => {
            println!("secret=true");
            println!("current_epoch={}", s.current_epoch());
            println!("epochs={}", s.epochs());
            println!("stack_height={}", s.stack().len());
            let labels: Vec<String> = s
                .stack()
                .iter()
                .map(|e| match &e.secret {
                    NodeSecret::Root(_) => "root".to_string(),
                    NodeSecret::Node(_) => e.label.bits().iter().map(|&b| if b { '1' } else { '0' }).collect(),
                })
                .collect();
            println!("stack={}", labels.join(","));
        }
        Object::Signature(_) => {}
        Object::EpochConfig(c) => {
            println!("t0={}", c.t0);
            println!("epoch_length={}", c.epoch_length);
            println!("window={}", c.window);
        }
    }
    Ok(())
}

fn render_identity(id: &IdentityVector) -> String {
    id.levels().iter().map(|l| String::from_utf8_lossy(l).into_owned()).collect::<Vec<_>>().join("/")
}
