//! Batch front end for the spectral edge detector: flat `key = value`
//! experiment configs, preset experiments, and plot-ready CSV artifacts with
//! a re-runnable manifest.

pub mod config;
pub mod manifest;
pub mod runner;
pub mod table;

use std::fmt;
use std::process::ExitCode;

/// Errors mapped onto exit codes: config errors exit 2, failed numeric
/// self-checks exit 3, IO problems exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error: config: {m}"),
            CliError::Numeric(m) => write!(f, "error: numeric: {m}"),
            CliError::Io(m) => write!(f, "error: io: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<specedge::Error> for CliError {
    fn from(e: specedge::Error) -> Self {
        if e.is_numeric_assertion() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
