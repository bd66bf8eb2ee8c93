//! Output plumbing: atomic file writes, full-precision number
//! formatting, and the run log that mirrors warnings to stderr.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Formats a float with 17 significant digits so the printed value
/// parses back to the identical f64 and downstream checks can use
/// tight tolerances.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// `full`, with absent values rendered as empty fields.
pub fn opt(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

/// Writes a file via a temp-then-rename in the same directory, so a
/// crash never leaves a half-written artifact behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", path.display()))?;
    Ok(())
}

/// Collects warnings for `run_log.txt`, echoing each to stderr as it
/// arrives.
pub struct RunLog {
    path: PathBuf,
    lines: Vec<String>,
}

impl RunLog {
    pub fn new(out_dir: &Path) -> Self {
        Self {
            path: out_dir.join("run_log.txt"),
            lines: Vec::new(),
        }
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        eprintln!("warning: {message}");
        self.lines.push(format!("warning: {message}"));
    }

    pub fn info(&mut self, message: impl Into<String>) {
        self.lines.push(format!("info: {}", message.into()));
    }

    pub fn finish(self) -> Result<()> {
        let mut body = self.lines.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        write_atomic(&self.path, body.as_bytes())
    }
}

/// Builds a CSV in memory and writes it atomically.
pub struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<Vec<u8>>,
}

impl CsvFile {
    pub fn new(out_dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self {
            path: out_dir.join(name),
            writer,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        let bytes = self.writer.into_inner().context("csv flush")?;
        write_atomic(&self.path, &bytes)
    }
}

/// Serializes a report as pretty JSON and writes it atomically.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    write_atomic(path, &body)
}

/// Plain-text artifact (single value files such as coverage.txt).
pub fn write_text(path: &Path, body: &str) -> Result<()> {
    let mut bytes = body.as_bytes().to_vec();
    if !body.ends_with('\n') {
        bytes.push(b'\n');
    }
    write_atomic(path, &bytes)
}

/// Stdout table row helper with fixed-width columns.
pub fn print_summary_header() {
    println!(
        "{:<24} {:>9} {:>10} {:>8}",
        "classifier", "accuracy", "precision", "recall"
    );
}

pub fn print_summary_row(name: &str, accuracy: f64, precision: f64, recall: f64) {
    println!("{name:<24} {accuracy:>9.4} {precision:>10.4} {recall:>8.4}");
    std::io::stdout().flush().ok();
}
