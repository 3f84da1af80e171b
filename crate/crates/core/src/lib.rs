//! Randomized projected consensus over stochastically time-varying digraphs.
//!
//! A network of agents shares one decision space. Each agent `i` owns a
//! private closed convex target set `X_i`; the network objective is a common
//! point in the intersection `X_0 = ∩ X_i`. Per step, every agent flips an
//! independent coin: with probability `p` it averages over its current
//! in-neighbors (row-stochastic weights, lower-bounded by `eta`), otherwise it
//! projects onto its own set. The communication graph is itself a stochastic
//! process, sampled per step from a declarative [`graphs::GraphProcess`].
//!
//! Crate layout mirrors the moving parts:
//!
//! - [`convex`] — set representations with exact projectors plus a Dykstra
//!   oracle for intersections,
//! - [`graphs`] — snapshot sampling, joint graphs, connectivity tests and a
//!   Monte Carlo connectivity-rate estimator,
//! - [`protocol`] — the per-step update, the randomized decision rule and the
//!   deterministic alternating baseline,
//! - [`metrics`] — distance-to-target and consensus-spread observers with
//!   per-step invariant checking,
//! - [`harness`] — TOML experiment configs, named presets, the Monte Carlo
//!   runner and CSV/JSON serialization,
//! - [`checks`] — the self-contained verification suite behind `opcon check`.

pub mod checks;
pub mod convex;
pub mod graphs;
pub mod harness;
pub mod metrics;
pub mod point;
pub mod protocol;
pub mod rng;

pub use convex::{ConvexError, ConvexSet, ProjectionResult};
pub use graphs::{DigraphSnapshot, GraphError, GraphProcess, JointGraph, WeightRule};
pub use metrics::{EnsembleStats, RunSummary, StepMetrics};
pub use point::Point;
pub use protocol::{Decision, Mode, NetworkState, Phase, ProtocolConfig, ProtocolError};
