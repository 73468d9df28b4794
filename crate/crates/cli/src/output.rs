use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::CliError;

/// 17 significant digits, `inf` for infinities.
pub fn fmt17(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// First 16 hex digits of the SHA-256 of a canonical config string.
pub fn config_digest(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Header line carried by every CSV artifact.
pub fn csv_header(digest: &str, seed: u64) -> String {
    format!("# config_digest={digest} seed={seed}\n")
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::malformed(format!("cannot write {}: {e}", path.display())))
}
