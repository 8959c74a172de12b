//! JSON configuration, run orchestration and the CSV/JSON writers behind the
//! `lasw` binary.

mod args;
mod commands;
mod config;
mod output;

pub use args::{Cli, Command, CommonArgs};
pub use commands::{
    converge_command, execute, probe_command, run_command, sweep_command, ConvergeConfig, ProbeConfig, ProbeSpec,
    RunSummary, SweepConfig, DEFAULT_OUTPUT_ROOT, OUTPUT_ROOT_ENV,
};
pub use config::{load_config, InitialData, ModeEntry, ModelSpec, PresetName, RunConfig};
pub use output::{format_number, write_diagnostics};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config syntax: {0}")]
    ConfigSyntax(String),
    #[error("config invalid: {field}: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("i/o error at {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            message: e.to_string(),
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const BLOW_UP: i32 = 2;
    pub const PROBE_FAIL: i32 = 3;
}
