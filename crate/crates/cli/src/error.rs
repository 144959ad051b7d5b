// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! CLI error classes, one per exit code.

use std::fmt;

/// Exit-code classes: config errors (including I/O and parse problems) exit
/// with 1, capacity refusals with 2, failed validation runs with 3.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, bad input file, engine-level validation error: exit 1.
    Config(String),
    /// The run would exceed an engine cap: exit 2.
    Capacity(String),
    /// A validate run completed and the comparison exceeded tolerance: exit 3.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Capacity(_) => 2,
            CliError::Failed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Capacity(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dephase::Error> for CliError {
    fn from(e: dephase::Error) -> Self {
        match e {
            dephase::Error::Capacity(_) => CliError::Capacity(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o error: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
