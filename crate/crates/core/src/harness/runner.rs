//! Monte Carlo execution of a built experiment.
//!
//! Seeds fan out over a rayon pool; each worker owns its run end to end and
//! emits a CSV chunk plus a run summary. Chunks are concatenated in seed
//! order, so the trace bytes do not depend on worker count or completion
//! order. Any per-step invariant breach aborts the whole experiment.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{BuiltExperiment, ExperimentConfig};
use super::trace::{csv_header, push_step_rows};
use super::HarnessError;
use crate::metrics::{self, EnsembleStats, MetricsRecorder, RunSummary};
use crate::protocol::{self, Mode, Phase, ProtocolConfig};

/// Results of one experiment entry (one p value).
#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub p: f64,
    pub ensemble: EnsembleStats,
    /// Deterministic alternating baseline on the same instance, when the
    /// entry itself is randomized.
    pub reference: Option<RunSummary>,
    pub runs: Vec<RunSummary>,
    /// Full trace in CSV form (header + rows ordered by seed, k, agent).
    #[serde(skip)]
    pub trace_csv: Vec<u8>,
}

#[derive(Debug, Serialize)]
pub struct ExperimentOutcome {
    pub name: String,
    pub horizon: u64,
    pub epsilons: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    /// Files written by [`run_experiment`]; empty for in-memory execution.
    pub files: Vec<PathBuf>,
}

struct SingleRun {
    seed: u64,
    summary: RunSummary,
    trajectory: Vec<f64>,
    csv: String,
}

fn run_single(
    built: &BuiltExperiment,
    protocol_config: &ProtocolConfig,
    seed: u64,
) -> Result<SingleRun, HarnessError> {
    let mut recorder = MetricsRecorder::new(protocol_config).keeping_states();
    protocol::run(
        protocol_config,
        &built.graph,
        &built.initial,
        built.horizon,
        seed,
        &mut recorder,
    )?;
    let summary = metrics::summarize(seed, &recorder.trace, &built.epsilons)?;
    let mut csv = String::new();
    for (state, step_metrics) in recorder.states.iter().zip(&recorder.trace) {
        push_step_rows(&mut csv, seed, state, step_metrics);
    }
    Ok(SingleRun {
        seed,
        summary,
        trajectory: recorder.d0_trajectory(),
        csv,
    })
}

fn run_entry(built: &BuiltExperiment, p: f64) -> Result<SweepEntry, HarnessError> {
    let mut protocol_config = built.protocol.clone();
    protocol_config.p = p;

    let mut runs: Vec<SingleRun> = built
        .seeds
        .par_iter()
        .map(|&seed| run_single(built, &protocol_config, seed))
        .collect::<Result<_, _>>()?;
    runs.sort_by_key(|r| r.seed);

    let reference = match protocol_config.mode {
        Mode::Randomized => {
            let mut det = protocol_config.clone();
            det.mode = Mode::DeterministicAlternating {
                phase: Phase::AverageFirst,
            };
            Some(run_single(built, &det, built.seeds[0])?.summary)
        }
        Mode::DeterministicAlternating { .. } => None,
    };

    let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let trajectories: Vec<Vec<f64>> = runs.iter().map(|r| r.trajectory.clone()).collect();
    let ensemble = metrics::aggregate(&summaries, &trajectories, reference.as_ref());

    let mut trace_csv = csv_header(built.initial.dim()).into_bytes();
    for run in runs {
        trace_csv.extend_from_slice(run.csv.as_bytes());
    }

    Ok(SweepEntry {
        p,
        ensemble,
        reference,
        runs: summaries,
        trace_csv,
    })
}

/// Runs every seed (and every sweep p) of a validated config in memory.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let built = config.build()?;
    let entries = built
        .p_values
        .iter()
        .map(|&p| run_entry(&built, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentOutcome {
        name: built.name,
        horizon: built.horizon,
        epsilons: built.epsilons,
        entries,
        files: Vec::new(),
    })
}

/// [`execute`], then write the trace CSVs and the JSON summary under the
/// config's output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let mut outcome = execute(config)?;
    let dir = &config.output.dir;
    let io_err = |path: &PathBuf| {
        let path = path.display().to_string();
        move |source: std::io::Error| HarnessError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let sweeping = outcome.entries.len() > 1;
    for entry in &outcome.entries {
        let file = if sweeping {
            dir.join(format!("trace_p{}.csv", entry.p))
        } else {
            dir.join("trace.csv")
        };
        let mut f = fs::File::create(&file).map_err(io_err(&file))?;
        f.write_all(&entry.trace_csv).map_err(io_err(&file))?;
        outcome.files.push(file);
    }

    #[derive(Serialize)]
    struct SummaryDoc<'a> {
        name: &'a str,
        horizon: u64,
        epsilons: &'a [f64],
        entries: &'a [SweepEntry],
    }
    let doc = SummaryDoc {
        name: &outcome.name,
        horizon: outcome.horizon,
        epsilons: &outcome.epsilons,
        entries: &outcome.entries,
    };
    let file = dir.join("summary.json");
    let json = serde_json::to_vec_pretty(&doc).expect("summary serializes");
    fs::write(&file, json).map_err(io_err(&file))?;
    outcome.files.push(file);

    Ok(outcome)
}
