// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Plain-text table output: comma-delimited rows, a `#`-prefixed column
//! header, an optional `#`-prefixed timestamp line, and numbers printed with
//! 17 significant digits so every f64 round-trips bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// An output table being assembled in memory.
pub struct Table {
    buf: String,
    columns: usize,
}

impl Table {
    /// Starts a table with the given column names. When `timestamp` is true
    /// a `# generated <unix seconds>` line precedes the header — suppress it
    /// for byte-identical reruns.
    pub fn new(column_names: &[&str], timestamp: bool) -> Self {
        let mut buf = String::new();
        if timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(buf, "# generated {secs}");
        }
        let _ = writeln!(buf, "# {}", column_names.join(","));
        Table {
            buf,
            columns: column_names.len(),
        }
    }

    /// Appends one data row; the length must match the header.
    pub fn push_row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.columns, "row width mismatch");
        let mut first = true;
        for v in values {
            if !first {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{v:.16e}");
            first = false;
        }
        self.buf.push('\n');
    }

    /// Writes the table to `path`, creating parent directories as needed.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, self.buf.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
    }
}

/// Reads a table file back: `#` lines are skipped, every remaining line is
/// split on commas and parsed as f64s.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line
            .split(',')
            .map(|cell| cell.trim().parse::<f64>())
            .collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => {
                return Err(CliError::Config(format!(
                    "{}:{}: bad number: {e}",
                    path.display(),
                    ln + 1
                )));
            }
        }
    }
    Ok(rows)
}
