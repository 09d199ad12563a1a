use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line layer. [`CliError::exit_code`] maps them onto
/// the process status: 1 for a failed check, 2 for bad usage or input.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate cell {cell}")]
    DuplicateCell { line: usize, cell: String },
    #[error("{0}")]
    Usage(String),
    #[error("unknown scenario family {0:?} (expected one of sharp-family, freiman1d, box-hull, perturbed-convex, intconvex)")]
    UnknownFamily(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no rows to report")]
    EmptyReport,
    #[error(transparent)]
    Core(#[from] bmlab_core::Error),
    #[error("check failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Assertion(_) | CliError::Core(bmlab_core::Error::NegativeDeficit(_)) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
