//! File emission. Every file is written to a temporary sibling and renamed
//! into place, so readers never see a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Decimal form with 17 significant digits; parses back to the same bits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn output_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Output {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| output_error(&dir, e))?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| output_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| output_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| output_error(path, e))?;
    tmp.persist(path).map_err(|e| output_error(path, e.error))?;
    Ok(())
}

/// A CSV table whose cells are already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn push(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Config(format!("csv encoding failed: {e}"));
        w.write_record(&self.headers).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Config(format!("csv encoding failed: {e}")))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    /// Reads a numeric CSV file back as headers and columns.
    pub fn read_numeric(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
        let mut r = csv::Reader::from_path(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let headers: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            .iter()
            .map(String::from)
            .collect();
        let mut cols = vec![Vec::new(); headers.len()];
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            for (c, cell) in cols.iter_mut().zip(rec.iter()) {
                let v = cell
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("{}: '{cell}' is not a number", path.display())))?;
                c.push(v);
            }
        }
        Ok((headers, cols))
    }
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("json encoding failed: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// `{"value": v, "error": e}`.
pub fn quantity(value: f64, error: f64) -> Value {
    serde_json::json!({ "value": value, "error": error })
}
