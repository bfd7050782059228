//! Output plumbing: atomic file writes and lossless CSV formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use stabfar_core::{Error, Result};

/// Formats a float with 17 significant digits, '.' decimal separator.
pub fn fmt(value: f64) -> String {
    format!("{value:.16e}")
}

/// Writes bytes to a temporary file in the target directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::Config(format!("cannot create temp file in {dir:?}: {e}")))?;
    tmp.write_all(bytes)
        .map_err(|e| Error::Config(format!("write failed: {e}")))?;
    tmp.persist(path)
        .map_err(|e| Error::Config(format!("cannot rename into {path:?}: {e}")))?;
    Ok(())
}

/// Writes a CSV file (comma separated, header row) atomically.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(|e| Error::Config(e.to_string()))?;
        for row in rows {
            w.write_record(row).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Config(e.to_string()))?;
    }
    atomic_write(path, &buf)
}

/// Writes pretty JSON atomically.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    atomic_write(path, text.as_bytes())
}

/// Reads a file to string with a config-style error.
pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {path:?}: {e}")))
}
