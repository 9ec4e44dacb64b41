//! CSV and summary writers. Numbers are written in Rust's shortest
//! round-trip representation so outputs stay byte-stable across runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

pub fn csv_path(out: &Path, name: &str) -> PathBuf {
    out.join(format!("{name}.csv"))
}

pub fn write_csv(
    out: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf, CliError> {
    let path = csv_path(out, name);
    let mut writer = csv::Writer::from_path(&path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(path)
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Accumulates the human-readable run summary; written once as summary.txt.
#[derive(Default)]
pub struct Summary {
    text: String,
}

impl Summary {
    pub fn line(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.text, "{}", line.as_ref());
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}: {value}");
    }

    pub fn write(&self, out: &Path) -> Result<(), CliError> {
        std::fs::write(out.join("summary.txt"), &self.text)?;
        Ok(())
    }
}
