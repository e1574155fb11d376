//! Deterministic machine-readable reports.
//!
//! A report carries the tool version, the SHA-256 digest of every input file,
//! the effective parameters, and the results. There are no timestamps and all
//! JSON maps are key-sorted, so identical inputs and seed yield byte-identical
//! output — CI can diff reports directly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    /// SHA-256 digest of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub params: Value,
    pub results: Value,
}

impl Report {
    pub fn new(subcommand: &'static str) -> Self {
        Report {
            tool_version: TOOL_VERSION,
            subcommand,
            inputs: BTreeMap::new(),
            params: Value::Null,
            results: Value::Null,
        }
    }

    /// Reads `path` and records its content digest.
    pub fn digest_input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }
}

/// Writes the report as pretty JSON (plus trailing newline) to `out`, or to
/// stdout when no path is given.
pub fn emit_json(report: &Report, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    emit_bytes(out, text.as_bytes())
}

/// Writes raw bytes to `out` or stdout.
pub fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

/// Renders a header and rows as a CSV byte buffer.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    Ok(writer.into_inner()?)
}
