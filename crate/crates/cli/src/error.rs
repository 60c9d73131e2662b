//! Errors and the exit-code contract shared by every subcommand.

use std::path::PathBuf;

use redgreen::lattice::LatticeError;
use redgreen::measurement::{CompileError, MeasurementError};
use redgreen::rewrite::NormalizeError;
use redgreen::semantics::SemanticsError;
use thiserror::Error;

/// Success, or the diagram is equivalent to what was expected.
pub const EXIT_OK: i32 = 0;
/// Not equivalent, or not recognised.
pub const EXIT_MISMATCH: i32 = 1;
/// The input could not be read, parsed or accepted.
pub const EXIT_INPUT: i32 = 2;
/// A resource limit (rank cap, site cap, step budget) was hit.
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
    #[error("step budget of {budget} exceeded after {steps} steps")]
    Budget { budget: usize, steps: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Resource(_) | CliError::Budget { .. } => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> CliError {
        CliError::Parse { path: path.into(), message: message.to_string() }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::CapExceeded { .. } => CliError::Resource(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<MeasurementError> for CliError {
    fn from(e: MeasurementError) -> Self {
        match e {
            MeasurementError::Lattice(l) => l.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<NormalizeError> for CliError {
    fn from(e: NormalizeError) -> Self {
        match e {
            NormalizeError::BudgetExceeded { budget, trace, .. } => CliError::Budget { budget, steps: trace.len() },
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Pattern(p) => p.into(),
            CompileError::Normalize(n) => n.into(),
        }
    }
}

impl From<SemanticsError> for CliError {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::RankCapExceeded { .. } => CliError::Resource(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
