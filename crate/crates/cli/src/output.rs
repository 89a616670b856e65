//! Deterministic artifact writing: all floats serialize through Rust's
//! shortest round-trip formatting, field order is fixed by struct order,
//! and every file is written in one call.

use crate::CmdError;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Create the output directory (and parents) if needed; errors map to
/// exit code 2.
pub fn ensure_dir(dir: &Path) -> Result<(), CmdError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CmdError(format!("cannot create output directory {}: {e}", dir.display())))
}

/// Write pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CmdError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text)
        .map_err(|e| CmdError(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Write a CSV file from a header and rows of already-formatted fields.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[Vec<String>],
) -> Result<PathBuf, CmdError> {
    let path = dir.join(name);
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 2);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&path, text)
        .map_err(|e| CmdError(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Full-precision decimal rendering of a float (shortest round-trip).
pub fn fmt(v: f64) -> String {
    format!("{v}")
}
