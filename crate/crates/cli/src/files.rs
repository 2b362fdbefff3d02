use std::fs;
use std::io::{self, Read};
use std::path::Path;

use tbids_core::codec::{self, WireObject};
use tbids_harness::store;

use crate::error::{CliError, CliResult};

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Reads a file, or standard input when the path is `-`.
pub fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(|e| CliError::io(path, e))?;
        Ok(buf)
    } else {
        read_bytes(path)
    }
}

/// Loads an envelope in binary or armored form.
pub fn load<T: WireObject>(path: &Path) -> CliResult<T> {
    let bytes = read_bytes(path)?;
    codec::decode_auto(&bytes).map_err(|e| CliError::decode(path, e))
}

fn render<T: WireObject>(obj: &T, armor: bool) -> Vec<u8> {
    let bytes = codec::encode(obj);
    if armor {
        codec::to_armor(&bytes).expect("fresh envelope").into_bytes()
    } else {
        bytes
    }
}

pub fn save_public<T: WireObject>(path: &Path, obj: &T, armor: bool) -> CliResult {
    fs::write(path, render(obj, armor)).map_err(|e| CliError::io(path, e))
}

/// Secret material: written atomically with owner-only permissions.
pub fn save_secret<T: WireObject>(path: &Path, obj: &T, armor: bool) -> CliResult {
    store::write_atomic(path, &render(obj, armor)).map_err(|e| CliError::io(path, e))
}

/// Whether an existing file is armored, so rewrites keep its form.
pub fn is_armored(bytes: &[u8]) -> bool {
    bytes.starts_with(b"-----BEGIN")
}
