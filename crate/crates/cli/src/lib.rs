//! Command-line harness around `sdf-core`: comparison sweeps, power-split
//! optimisation and Monte Carlo validation, emitted as CSV or JSON.

pub mod compare;
pub mod config;
pub mod optimize;
pub mod table;
pub mod validate;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use compare::{run_compare, Curve, EpsMode, SweepSpec};
pub use config::Settings;
pub use optimize::{run_optimize, OptimizeMode, OptimizeReport, OptimizeSpec};
pub use table::Table;
pub use validate::{run_validate, ValidationReport};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const VALIDATION_FAILED: i32 = 3;
    pub const DOMAIN: i32 = 4;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => exit::CONFIG,
            HarnessError::Domain(_) => exit::DOMAIN,
            HarnessError::Io(_) => exit::IO,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format {s:?}, expected csv or json")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl Table {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}
