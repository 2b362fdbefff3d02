//! Files holding secret material: atomic replacement, owner-only
//! permissions, and an advisory lock next to the state file.

use std::fs::{File, OpenOptions, TryLockError};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tbids_core::codec;
use tbids_core::DelegatedEpochKey;

/// Replaces `path` with `bytes` via a temp file in the same directory and
/// a rename, so readers see either the old or the new contents. The file
/// is created with mode 0600.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn lock_path(state: &Path) -> PathBuf {
    suffixed(state, ".lock")
}

pub fn outbox_path(state: &Path) -> PathBuf {
    suffixed(state, ".outbox")
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Exclusive lock on `<state>.lock`, released on drop.
#[derive(Debug)]
pub struct StateLock(#[allow(dead_code)] File);

#[derive(Debug, thiserror::Error)]
pub enum LockError {
    #[error("state {0} is locked by another process")]
    Busy(PathBuf),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

pub fn lock_state(state: &Path) -> Result<StateLock, LockError> {
    let path = lock_path(state);
    let file = OpenOptions::new().create(true).truncate(false).write(true).open(&path)?;
    match file.try_lock() {
        Ok(()) => Ok(StateLock(file)),
        Err(TryLockError::WouldBlock) => Err(LockError::Busy(state.to_path_buf())),
        Err(TryLockError::Error(e)) => Err(LockError::Io(e)),
    }
}

const OUTBOX_MAGIC: &[u8; 4] = b"TBOX";

/// Derived keys waiting to be (re)pushed: `"TBOX" | count u32 | (len u32 |
/// envelope)*`.
pub fn encode_outbox(keys: &[DelegatedEpochKey]) -> Vec<u8> {
    let mut out = OUTBOX_MAGIC.to_vec();
    out.extend_from_slice(&(keys.len() as u32).to_be_bytes());
    for key in keys {
        let env = codec::encode(key);
        out.extend_from_slice(&(env.len() as u32).to_be_bytes());
        out.extend_from_slice(&env);
    }
    out
}

pub fn decode_outbox(bytes: &[u8]) -> io::Result<Vec<DelegatedEpochKey>> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, format!("outbox: {m}"));
    let rest = bytes.strip_prefix(OUTBOX_MAGIC).ok_or_else(|| bad("bad magic"))?;
    let (count, mut rest) = rest.split_first_chunk::<4>().ok_or_else(|| bad("truncated"))?;
    let mut keys = Vec::new();
    for _ in 0..u32::from_be_bytes(*count) {
        let (len, tail) = rest.split_first_chunk::<4>().ok_or_else(|| bad("truncated"))?;
        let len = u32::from_be_bytes(*len) as usize;
        if tail.len() < len {
            return Err(bad("truncated"));
        }
        let key = codec::decode(&tail[..len]).map_err(|e| bad(&e.to_string()))?;
        keys.push(key);
        rest = &tail[len..];
    }
    if !rest.is_empty() {
        return Err(bad("trailing bytes"));
    }
    Ok(keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    #[test]
    fn atomic_write_is_private() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("state.bin");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        let mode = std::fs::metadata(&p).unwrap().permissions().mode() & 0o777;
        assert_eq!(mode, 0o600);
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("state.bin");
        let held = lock_state(&p).unwrap();
        assert!(matches!(lock_state(&p), Err(LockError::Busy(_))));
        drop(held);
        lock_state(&p).unwrap();
    }

    #[test]
    fn empty_outbox_roundtrip() {
        assert!(decode_outbox(&encode_outbox(&[])).unwrap().is_empty());
        assert!(decode_outbox(b"TBOX\0\0\0\x01").is_err());
    }
}
