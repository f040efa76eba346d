//! Experiment configuration, the run loop and its output files.

mod config;
mod convergence;
mod guard;
mod registry;
mod run;
mod snapshot;

#[cfg(test)]
mod tests;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{ExperimentConfig, GridSpec, GuardSpec, InitialSpec, OutputSpec, TimeParams, CONFIG_REFERENCE};
pub use convergence::{convergence_sweep, default_sizes, zaitsev_error, ConvergencePoint, ConvergenceReport, RefineAxis};
pub use guard::{blowup_guard, GuardDecision, GuardPolicy, HaltReason};
pub use registry::{experiment, Experiment, EXPERIMENTS};
pub use run::{run_experiment, simulate, FileObserver, NullObserver, RunObserver, RunOutcome, Termination};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotError};

use crate::analytic::AnalyticError;
use crate::diagnostics::DiagnosticsError;
use crate::field::FieldError;
use crate::stepper::StepError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl ConfigError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        ConfigError::Parse { line, message: message.into() }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Validation { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Internal(String),
}

impl RunError {
    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}
