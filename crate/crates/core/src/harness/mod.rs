//! Experiment configuration, named presets, Monte Carlo orchestration and
//! trace/summary serialization.
//!
//! A TOML config describes one experiment end to end: the update rule, the
//! per-agent sets and their declared intersection, the graph process, the
//! initial state, the seed list and the output locations. [`run_experiment`]
//! executes every seed on a worker pool, streams per-agent trace rows to CSV
//! (ordered by seed, step, agent regardless of completion order) and writes a
//! structured JSON summary with per-run and ensemble blocks.

mod config;
mod presets;
mod runner;
mod trace;

pub use config::{
    load_config, BuiltExperiment, ExperimentConfig, GraphSection, IntervalConfig, ModeName,
    OutputSection, PhaseName, ProcessConfig, ProtocolSection, SeedSpec, WeightRuleConfig,
};
pub use presets::{preset, preset_names};
pub use runner::{execute, run_experiment, ExperimentOutcome, SweepEntry};
pub use trace::{read_trace_csv, TraceRow};

use crate::graphs::GraphError;
use crate::metrics::MetricsError;
use crate::protocol::{ObserverError, ProtocolError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config at `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl HarnessError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 0 success, 2 validation, 3 invariant/numeric
    /// failure, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Io { .. } => 4,
            HarnessError::Parse { .. }
            | HarnessError::Validation { .. }
            | HarnessError::UnknownPreset(_) => 2,
            HarnessError::Graph(GraphError::Invalid(_)) => 2,
            HarnessError::Metrics(MetricsError::BadEpsilons(_)) => 2,
            HarnessError::Protocol(ProtocolError::Observer(ObserverError::Invariant(_))) => 3,
            _ => 3,
        }
    }
}
