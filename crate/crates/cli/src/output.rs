//! CSV emission. Every table starts with a `# config_hash=` line followed by
//! the column header; files are written through a temporary file in the
//! target directory and renamed into place.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub struct Table {
    buf: Vec<u8>,
    rows: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(config_hash: &str, header: &[&str]) -> Result<Self, CliError> {
        let buf = format!("# config_hash={config_hash}\n").into_bytes();
        let mut rows = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        rows.write_record(header)?;
        Ok(Table { buf, rows })
    }

    pub fn row<R: Serialize>(&mut self, record: R) -> Result<(), CliError> {
        self.rows.serialize(record)?;
        Ok(())
    }

    pub fn into_bytes(mut self) -> Result<Vec<u8>, CliError> {
        let body = self
            .rows
            .into_inner()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        self.buf.extend_from_slice(&body);
        Ok(self.buf)
    }
}

/// Writes `bytes` to `path` atomically, or to standard output when `path`
/// is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(p) => write_atomic(p, bytes)?,
    }
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(())
}
