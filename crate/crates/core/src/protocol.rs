//! The per-step state update: each agent either averages over its current
//! neighbor set with the snapshot's row-stochastic weights, or projects onto
//! its own target set. In randomized mode the choice is an independent
//! Bernoulli(p) coin per agent and step; the deterministic baseline alternates
//! the whole network between the two actions.
//!
//! Updates are synchronous: every agent reads the pre-step state, so the
//! processing order of agents cannot affect the result. A run is fully
//! determined by `(config, graph, initial, seed)`.

use std::fmt;

use rand::Rng;

use crate::convex::{self, ConvexError, ConvexSet};
use crate::graphs::{self, DigraphSnapshot, GraphError, GraphProcess};
use crate::point::Point;
use crate::rng::{substream, DOMAIN_DECISION};

/// States of all agents at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkState {
    pub step: u64,
    pub states: Vec<Point>,
}

impl NetworkState {
    pub fn new(step: u64, states: Vec<Point>) -> Self {
        NetworkState { step, states }
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map(|p| p.dim()).unwrap_or(0)
    }
}

/// Per-agent action for one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Average,
    Project,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Average => "average",
            Decision::Project => "project",
        }
    }
}

/// Which action the deterministic baseline takes on even steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    AverageFirst,
    ProjectFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Independent Bernoulli(p) coin per agent and step.
    Randomized,
    /// All agents alternate between averaging and projecting in lockstep.
    DeterministicAlternating { phase: Phase },
}

/// Everything an experiment needs about the update rule and the target sets.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    /// Averaging probability, in (0, 1) for randomized mode.
    pub p: f64,
    pub mode: Mode,
    /// Per-agent target sets; agent `i` only ever touches `sets[i]`.
    pub sets: Vec<ConvexSet>,
    /// Declared intersection of the target sets. Read by the metrics only,
    /// never by the agents.
    pub intersection: ConvexSet,
}

impl ProtocolConfig {
    pub fn n(&self) -> usize {
        self.sets.len()
    }
}

/// Kinds of per-step invariant an observer may report broken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantKind {
    /// The max distance to the declared intersection increased.
    MaxTargetDistanceIncreased,
    /// Distance to some anchor set grew by more than the step's own-set slack.
    AnchorDriftBound,
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantKind::MaxTargetDistanceIncreased => {
                write!(f, "max distance to intersection increased")
            }
            InvariantKind::AnchorDriftBound => write!(f, "anchor drift bound exceeded"),
        }
    }
}

/// A broken per-step invariant, reported by an observer and fatal to the run.
#[derive(Clone, Debug)]
pub struct InvariantViolation {
    pub kind: InvariantKind,
    pub step: u64,
    /// Anchor or agent index the violation was measured against, if any.
    pub agent: Option<usize>,
    /// How far past the tolerated bound the quantity moved.
    pub excess: f64,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at step {}", self.kind, self.step)?;
        if let Some(a) = self.agent {
            write!(f, " (index {a})")?;
        }
        write!(f, ", excess {:.3e}", self.excess)
    }
}

impl std::error::Error for InvariantViolation {}

#[derive(Debug, thiserror::Error)]
pub enum ObserverError {
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
    #[error("metric evaluation failed: {0}")]
    Metric(#[from] ConvexError),
}

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("network has {states} states but config declares {sets} sets")]
    SizeMismatch { states: usize, sets: usize },
    #[error("snapshot is over {snapshot} nodes, network has {network}")]
    SnapshotMismatch { snapshot: usize, network: usize },
    #[error("decision vector has length {got}, expected {expected}")]
    DecisionMismatch { expected: usize, got: usize },
    #[error("decide() called in deterministic-alternating mode")]
    DecideInDeterministicMode,
    #[error("averaging probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("projection failed: {0}")]
    Projector(#[from] ConvexError),
    #[error("graph sampling failed: {0}")]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Observer(#[from] ObserverError),
}

/// Draws the per-agent coins for step `k`, ascending agent index, from the
/// decision substream of `(seed, k)`. Graph sampling never touches this
/// stream.
pub fn decide(config: &ProtocolConfig, k: u64, seed: u64) -> Result<Vec<Decision>, ProtocolError> {
    match config.mode {
        Mode::Randomized => {
            if !(config.p > 0.0 && config.p < 1.0) {
                return Err(ProtocolError::InvalidProbability(config.p));
            }
            let mut rng = substream(seed, DOMAIN_DECISION, k);
            Ok((0..config.n())
                .map(|_| {
                    if rng.random_bool(config.p) {
                        Decision::Average
                    } else {
                        Decision::Project
                    }
                })
                .collect())
        }
        Mode::DeterministicAlternating { .. } => Err(ProtocolError::DecideInDeterministicMode),
    }
}

/// Lockstep schedule for the deterministic baseline: the phase action on even
/// steps, the other on odd steps, for every agent.
pub fn deterministic_schedule(k: u64, phase: Phase, n: usize) -> Vec<Decision> {
    let even = match phase {
        Phase::AverageFirst => Decision::Average,
        Phase::ProjectFirst => Decision::Project,
    };
    let odd = match even {
        Decision::Average => Decision::Project,
        Decision::Project => Decision::Average,
    };
    vec![if k.is_multiple_of(2) { even } else { odd }; n]
}

/// One synchronous update: every agent reads the pre-step state.
pub fn step(
    state: &NetworkState,
    snapshot: &DigraphSnapshot,
    decisions: &[Decision],
    config: &ProtocolConfig,
) -> Result<NetworkState, ProtocolError> {
    let n = state.n();
    if config.sets.len() != n {
        return Err(ProtocolError::SizeMismatch {
            states: n,
            sets: config.sets.len(),
        });
    }
    if snapshot.n() != n {
        return Err(ProtocolError::SnapshotMismatch {
            snapshot: snapshot.n(),
            network: n,
        });
    }
    if decisions.len() != n {
        return Err(ProtocolError::DecisionMismatch {
            expected: n,
            got: decisions.len(),
        });
    }
    let dim = state.dim();
    let mut next = Vec::with_capacity(n);
    for (i, decision) in decisions.iter().enumerate() {
        let x = match decision {
            Decision::Average => Point::weighted_sum(
                snapshot
                    .neighbors(i)
                    .iter()
                    .map(|&(j, w)| (w, &state.states[j])),
                dim,
            ),
            Decision::Project => convex::project(&config.sets[i], &state.states[i])?.point,
        };
        next.push(x);
    }
    Ok(NetworkState::new(state.step + 1, next))
}

/// Observer invoked on the initial state and after every step.
pub trait StepObserver {
    fn on_initial(&mut self, state: &NetworkState) -> Result<(), ObserverError> {
        let _ = state;
        Ok(())
    }
    fn on_step(
        &mut self,
        state: &NetworkState,
        decisions: &[Decision],
    ) -> Result<(), ObserverError>;
}

/// Observer that ignores everything.
pub struct NoopObserver;

impl StepObserver for NoopObserver {
    fn on_step(&mut self, _: &NetworkState, _: &[Decision]) -> Result<(), ObserverError> {
        Ok(())
    }
}

/// Runs the protocol for `horizon` steps from `initial`, sampling the graph
/// and the decisions per step, and invoking `observer` on the initial state
/// and after every step. The whole trajectory is a pure function of
/// `(config, graph, initial, seed)`.
pub fn run(
    config: &ProtocolConfig,
    graph: &GraphProcess,
    initial: &NetworkState,
    horizon: u64,
    seed: u64,
    observer: &mut dyn StepObserver,
) -> Result<NetworkState, ProtocolError> {
    observer.on_initial(initial)?;
    let mut state = initial.clone();
    for _ in 0..horizon {
        let k = state.step;
        let decisions = match config.mode {
            Mode::Randomized => decide(config, k, seed)?,
            Mode::DeterministicAlternating { phase } => deterministic_schedule(k, phase, state.n()),
        };
        let snapshot = graphs::sample_snapshot(graph, k, seed)?;
        debug_assert!(snapshot.verify_weights(graph.eta).is_ok());
        state = step(&state, &snapshot, &decisions, config)?;
        observer.on_step(&state, &decisions)?;
    }
    Ok(state)
}
