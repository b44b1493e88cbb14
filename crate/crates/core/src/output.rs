//! Digests and atomic file output.

use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

/// Digest of the canonical JSON form of a value.
pub fn digest_of<T: Serialize>(value: &T) -> String {
    digest_bytes(serde_json::to_string(value).expect("serializable value").as_bytes())
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Header line carried by every CSV the crate writes.
pub fn csv_header_comment(digest: &str, seed: u64) -> String {
    format!("# digest={digest} seed={seed}\n")
}
