//! Convergence functionals over a running trace.
//!
//! Per step we track the maximum distance to the declared intersection
//! (`d0`), each agent's distance to its own set, and the per-coordinate
//! consensus spread (max minus min). The recorder doubles as the runtime
//! invariant monitor: along every sample path `d0` must never increase, and
//! no anchor-set distance may grow faster than the step's own-set slack.
//! Both checks run after every step of every run, not just in expectation.

use serde::Serialize;

use crate::convex::{self, ConvexError};
use crate::protocol::{
    Decision, InvariantKind, InvariantViolation, NetworkState, ObserverError, ProtocolConfig,
    StepObserver,
};

/// Slack absorbing floating-point noise in the exact monotonicity and drift
/// inequalities.
pub const MONOTONICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, thiserror::Error)]
pub enum MetricsError {
    #[error("cannot summarize an empty trace")]
    EmptyTrace,
    #[error("epsilons must be positive and strictly descending, got {0:?}")]
    BadEpsilons(Vec<f64>),
}

/// Observables of one step.
#[derive(Clone, Debug)]
pub struct StepMetrics {
    pub k: u64,
    /// Max over agents of the distance to the declared intersection.
    pub d0: f64,
    /// Distance of each agent to its own set.
    pub per_agent_own: Vec<f64>,
    /// Per-coordinate spread: max minus min over agents.
    pub spread_per_coord: Vec<f64>,
    pub spread_max: f64,
    /// Decisions that produced this state; `None` for the initial state.
    pub decisions: Option<Vec<Decision>>,
}

/// Computes the step observables for `state` under `config`.
pub fn observe(
    state: &NetworkState,
    config: &ProtocolConfig,
    decisions: Option<&[Decision]>,
) -> Result<StepMetrics, ConvexError> {
    let mut d0 = 0.0f64;
    let mut per_agent_own = Vec::with_capacity(state.n());
    for (i, x) in state.states.iter().enumerate() {
        d0 = d0.max(convex::distance(&config.intersection, x)?);
        per_agent_own.push(convex::distance(&config.sets[i], x)?);
    }
    let dim = state.dim();
    let mut spread_per_coord = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in &state.states {
            lo = lo.min(x[c]);
            hi = hi.max(x[c]);
        }
        spread_per_coord.push(hi - lo);
    }
    let spread_max = spread_per_coord.iter().copied().fold(0.0, f64::max);
    Ok(StepMetrics {
        k: state.step,
        d0,
        per_agent_own,
        spread_per_coord,
        spread_max,
        decisions: decisions.map(|d| d.to_vec()),
    })
}

/// Trace recorder and per-step invariant monitor.
///
/// In strict mode the first violation aborts the run; otherwise violations
/// are only counted, which the property tests use to measure.
pub struct MetricsRecorder<'a> {
    config: &'a ProtocolConfig,
    strict: bool,
    keep_states: bool,
    pub trace: Vec<StepMetrics>,
    pub states: Vec<NetworkState>,
    pub monotonicity_violations: u64,
    pub drift_violations: u64,
    prev: Option<PrevStep>,
}

struct PrevStep {
    d0: f64,
    /// Max over agents of the distance to each agent's set, anchor-indexed.
    anchor_dist: Vec<f64>,
    max_own: f64,
}

impl<'a> MetricsRecorder<'a> {
    pub fn new(config: &'a ProtocolConfig) -> Self {
        MetricsRecorder {
            config,
            strict: true,
            keep_states: false,
            trace: Vec::new(),
            states: Vec::new(),
            monotonicity_violations: 0,
            drift_violations: 0,
            prev: None,
        }
    }

    /// Count violations instead of aborting on the first one.
    pub fn lenient(mut self) -> Self {
        self.strict = false;
        self
    }

    /// Also keep full network states (the CSV writer needs coordinates).
    pub fn keeping_states(mut self) -> Self {
        self.keep_states = true;
        self
    }

    fn anchor_distances(&self, state: &NetworkState) -> Result<Vec<f64>, ConvexError> {
        let n = self.config.n();
        let mut out = Vec::with_capacity(n);
        for anchor in 0..n {
            let mut z = 0.0f64;
            for x in &state.states {
                z = z.max(convex::distance(&self.config.sets[anchor], x)?);
            }
            out.push(z);
        }
        Ok(out)
    }

    fn ingest(
        &mut self,
        state: &NetworkState,
        decisions: Option<&[Decision]>,
    ) -> Result<(), ObserverError> {
        let metrics = observe(state, self.config, decisions)?;
        let anchor_dist = self.anchor_distances(state)?;
        let max_own = metrics.per_agent_own.iter().copied().fold(0.0, f64::max);
        if let Some(prev) = &self.prev {
            let excess = metrics.d0 - prev.d0 - MONOTONICITY_TOL;
            if excess > 0.0 {
                self.monotonicity_violations += 1;
                if self.strict {
                    return Err(InvariantViolation {
                        kind: InvariantKind::MaxTargetDistanceIncreased,
                        step: state.step,
                        agent: None,
                        excess,
                    }
                    .into());
                }
            }
            for (anchor, (&z_next, &z_prev)) in
                anchor_dist.iter().zip(&prev.anchor_dist).enumerate()
            {
                let excess = z_next - z_prev - prev.max_own - MONOTONICITY_TOL;
                if excess > 0.0 {
                    self.drift_violations += 1;
                    if self.strict {
                        return Err(InvariantViolation {
                            kind: InvariantKind::AnchorDriftBound,
                            step: state.step,
                            agent: Some(anchor),
                            excess,
                        }
                        .into());
                    }
                }
            }
        }
        self.prev = Some(PrevStep {
            d0: metrics.d0,
            anchor_dist,
            max_own,
        });
        self.trace.push(metrics);
        if self.keep_states {
            self.states.push(state.clone());
        }
        Ok(())
    }

    pub fn d0_trajectory(&self) -> Vec<f64> {
        self.trace.iter().map(|m| m.d0).collect()
    }
}

impl StepObserver for MetricsRecorder<'_> {
    fn on_initial(&mut self, state: &NetworkState) -> Result<(), ObserverError> {
        self.ingest(state, None)
    }

    fn on_step(
        &mut self,
        state: &NetworkState,
        decisions: &[Decision],
    ) -> Result<(), ObserverError> {
        self.ingest(state, Some(decisions))
    }
}

/// Per-run aggregate of a recorded trace.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    /// Thresholds the hit statistics refer to, strictly descending.
    pub epsilons: Vec<f64>,
    /// Smallest step with `d0 <= eps`, per epsilon; `None` = never within
    /// the horizon.
    pub first_hit: Vec<Option<u64>>,
    /// Smallest step with `d0 <= eps` and `spread_max <= eps` simultaneously.
    pub first_joint_hit: Vec<Option<u64>>,
    pub final_d0: f64,
    pub final_spread_max: f64,
    /// Largest own-set distance of any agent over the last fifth of the
    /// trace; finite-horizon proxy for the limiting per-agent distances.
    pub tail_max_own: f64,
    /// Steps where `d0` increased by more than the tolerance. Zero on every
    /// valid run.
    pub monotonicity_violations: u64,
    /// Empirical fraction of averaging decisions across agents and steps.
    pub averaging_fraction: f64,
    /// Log-linear slope of `d0` over the last fifth of the trace, if defined.
    /// Exploratory only; nothing gates on it.
    pub tail_slope: Option<f64>,
}

/// Condenses a trace into first-hit times and end-of-run figures.
pub fn summarize(
    seed: u64,
    trace: &[StepMetrics],
    epsilons: &[f64],
) -> Result<RunSummary, MetricsError> {
    if trace.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    let descending = epsilons.windows(2).all(|w| w[0] > w[1]);
    if epsilons.is_empty() || !descending || epsilons.iter().any(|&e| e <= 0.0) {
        return Err(MetricsError::BadEpsilons(epsilons.to_vec()));
    }
    let first_hit: Vec<Option<u64>> = epsilons
        .iter()
        .map(|&eps| trace.iter().find(|m| m.d0 <= eps).map(|m| m.k))
        .collect();
    let first_joint_hit: Vec<Option<u64>> = epsilons
        .iter()
        .map(|&eps| {
            trace
                .iter()
                .find(|m| m.d0 <= eps && m.spread_max <= eps)
                .map(|m| m.k)
        })
        .collect();
    let monotonicity_violations = trace
        .windows(2)
        .filter(|w| w[1].d0 > w[0].d0 + MONOTONICITY_TOL)
        .count() as u64;
    let mut averages = 0u64;
    let mut total = 0u64;
    for m in trace {
        if let Some(decisions) = &m.decisions {
            total += decisions.len() as u64;
            averages += decisions
                .iter()
                .filter(|d| **d == Decision::Average)
                .count() as u64;
        }
    }
    let averaging_fraction = if total > 0 {
        averages as f64 / total as f64
    } else {
        0.0
    };
    let tail_start = trace.len() - (trace.len() / 5).max(1);
    let tail_max_own = trace[tail_start..]
        .iter()
        .flat_map(|m| m.per_agent_own.iter().copied())
        .fold(0.0, f64::max);
    let last = trace.last().expect("nonempty");
    Ok(RunSummary {
        seed,
        epsilons: epsilons.to_vec(),
        first_hit,
        first_joint_hit,
        final_d0: last.d0,
        final_spread_max: last.spread_max,
        tail_max_own,
        monotonicity_violations,
        averaging_fraction,
        tail_slope: tail_slope(&trace.iter().map(|m| m.d0).collect::<Vec<_>>()),
    })
}

/// Least-squares slope of `ln d0` over the last fifth of the trajectory.
/// `None` when fewer than two positive samples remain.
pub fn tail_slope(d0: &[f64]) -> Option<f64> {
    let tail_len = (d0.len() / 5).max(2).min(d0.len());
    let start = d0.len() - tail_len;
    let pts: Vec<(f64, f64)> = d0[start..]
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(i, &v)| ((start + i) as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < f64::EPSILON {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Ensemble statistics over many run summaries.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleStats {
    pub runs: usize,
    pub epsilons: Vec<f64>,
    /// Fraction of runs whose `d0` reached each epsilon within the horizon.
    pub hit_fraction: Vec<f64>,
    /// Fraction reaching `d0` and `spread_max` below each epsilon together.
    pub joint_hit_fraction: Vec<f64>,
    /// Mean first-hit step over the runs that hit; `None` if none did.
    pub mean_first_hit: Vec<Option<f64>>,
    pub median_first_hit: Vec<Option<f64>>,
    /// Fraction of runs whose first hit strictly beats the reference run
    /// (a run that never hits cannot win; a reference that never hits loses
    /// to any hit). `None` without a reference.
    pub win_fraction: Vec<Option<f64>>,
    /// Pointwise mean of `d0` over runs at each step.
    pub mean_d0_trajectory: Vec<f64>,
}

/// Folds run summaries (and their `d0` trajectories, same order) into
/// ensemble statistics, optionally scored against a reference run.
pub fn aggregate(
    summaries: &[RunSummary],
    trajectories: &[Vec<f64>],
    reference: Option<&RunSummary>,
) -> EnsembleStats {
    assert!(
        !summaries.is_empty(),
        "aggregate needs at least one summary"
    );
    let epsilons = summaries[0].epsilons.clone();
    let runs = summaries.len();
    let n_eps = epsilons.len();

    let mut hit_fraction = Vec::with_capacity(n_eps);
    let mut joint_hit_fraction = Vec::with_capacity(n_eps);
    let mut mean_first_hit = Vec::with_capacity(n_eps);
    let mut median_first_hit = Vec::with_capacity(n_eps);
    let mut win_fraction = Vec::with_capacity(n_eps);
    for e in 0..n_eps {
        let hits: Vec<u64> = summaries.iter().filter_map(|s| s.first_hit[e]).collect();
        hit_fraction.push(hits.len() as f64 / runs as f64);
        joint_hit_fraction.push(
            summaries
                .iter()
                .filter(|s| s.first_joint_hit[e].is_some())
                .count() as f64
                / runs as f64,
        );
        mean_first_hit.push(if hits.is_empty() {
            None
        } else {
            Some(hits.iter().sum::<u64>() as f64 / hits.len() as f64)
        });
        median_first_hit.push(if hits.is_empty() {
            None
        } else {
            let mut sorted = hits.clone();
            sorted.sort_unstable();
            let mid = sorted.len() / 2;
            Some(if sorted.len().is_multiple_of(2) {
                (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
            } else {
                sorted[mid] as f64
            })
        });
        win_fraction.push(reference.map(|r| {
            let wins = summaries
                .iter()
                .filter(|s| match (s.first_hit[e], r.first_hit[e]) {
                    (Some(mine), Some(theirs)) => mine < theirs,
                    (Some(_), None) => true,
                    (None, _) => false,
                })
                .count();
            wins as f64 / runs as f64
        }));
    }

    let mut mean_d0_trajectory = Vec::new();
    if !trajectories.is_empty() {
        let len = trajectories.iter().map(|t| t.len()).min().unwrap_or(0);
        mean_d0_trajectory = (0..len)
            .map(|k| trajectories.iter().map(|t| t[k]).sum::<f64>() / trajectories.len() as f64)
            .collect();
    }

    EnsembleStats {
        runs,
        epsilons,
        hit_fraction,
        joint_hit_fraction,
        mean_first_hit,
        median_first_hit,
        win_fraction,
        mean_d0_trajectory,
    }
}
