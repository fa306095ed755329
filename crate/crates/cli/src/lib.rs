//! Library side of the `opcalc` binary: argument types, config merging and
//! subcommand execution. Exit codes: 0 success, 1 a check exceeded its
//! tolerance, 2 usage or I/O error.

pub mod args;
mod commands;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;

pub use args::{Cli, Command, ConfigFile};

/// Machine-readable record written to stderr when a check fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureRecord {
    pub subcommand: String,
    pub check: String,
    pub observed: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] opcalc_core::Error),
    #[error("check failed: {}", .0.len())]
    CheckFailed(Vec<FailureRecord>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            _ => 2,
        }
    }
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads the optional config file and applies it under the flags.
pub fn resolve(cli: Cli) -> Result<Command, CliError> {
    let Some(path) = cli.config else {
        return Ok(cli.command);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
    let file = ConfigFile::parse(&text).map_err(|e| CliError::Config {
        path: path.clone(),
        message: e.to_string(),
    })?;
    Ok(file.apply(cli.command))
}

/// Runs `cli`, writing reports to `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let command = resolve(cli)?;
    commands::dispatch(command, stdout)
}

/// Entry point used by the binary.
pub fn run(cli: Cli) -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    match execute(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed(records)) => {
            let mut stderr = std::io::stderr().lock();
            for r in &records {
                let _ = writeln!(stderr, "{}", serde_json::to_string(r).expect("record serializes"));
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("opcalc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
