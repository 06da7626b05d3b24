//! Canonical artifact formatting: fixed-format CSV documents, SHA-256
//! provenance hashes, and atomic file writes.
//!
//! Every float that reaches a CSV cell goes through [`format_float`], so
//! identical computations produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Scientific notation with 17 significant digits and a `.` decimal
/// point: enough to round-trip any f64 exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Assemble a CSV document with the fixed `,` separator and one trailing
/// newline per row.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write `bytes` to `path` atomically: write a sibling `.tmp` file, sync
/// it, then rename it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    {
        let mut file = fs::File::create(&tmp)
            .with_context(|| format!("creating temporary file {}", tmp.display()))?;
        file.write_all(bytes)
            .with_context(|| format!("writing {}", tmp.display()))?;
        file.sync_all()
            .with_context(|| format!("syncing {}", tmp.display()))?;
    }
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into {}", tmp.display(), path.display()))
}

/// Lowercase hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(format_float(1.5625), "1.5625000000000000e0");
        assert_eq!(format_float(-0.03125), "-3.1250000000000000e-2");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
        // Round-trip exactness on an irrational-looking value.
        let v = std::f64::consts::PI * 1e-7;
        let back: f64 = format_float(v).parse().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn csv_layout_is_fixed() {
        let doc = csv_document(
            &["a", "b"],
            &[vec!["1".into(), "2".into()], vec!["3".into(), "4".into()]],
        );
        assert_eq!(doc, "a,b\n1,2\n3,4\n");
    }

    #[test]
    fn sha256_matches_known_answer() {
        // FIPS 180-4 test vector for the empty message.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.csv");
        write_atomic(&path, b"first\n").unwrap();
        write_atomic(&path, b"second\n").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"second\n");
        // No stray temp file remains.
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
