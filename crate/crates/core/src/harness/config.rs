//! The on-disk experiment schema and its validation.
//!
//! Node ids in config files are 1-based, matching the usual labeling of small
//! network examples; everything internal is 0-based. `load_config` parses,
//! normalizes and validates in one pass, failing fast with the dotted path of
//! the offending field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::convex::ConvexSet;
use crate::graphs::{BackboneScheduler, GraphProcess, IntervalSequence, ProcessKind, WeightRule};
use crate::point::Point;
use crate::protocol::{Mode, NetworkState, Phase, ProtocolConfig};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Number of protocol steps per run. A zero-step run still records the
    /// initial state.
    pub horizon: u64,
    /// Hit thresholds, strictly descending.
    pub epsilons: Vec<f64>,
    pub protocol: ProtocolSection,
    pub graph: GraphSection,
    /// Per-agent target sets, one per node in node order.
    pub sets: Vec<ConvexSet>,
    /// Declared intersection of the target sets; metrics only.
    pub intersection: ConvexSet,
    /// Initial positions, one per node.
    pub initial: Vec<Point>,
    pub seeds: SeedSpec,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    /// Averaging probability, in (0, 1).
    pub p: f64,
    #[serde(default)]
    pub mode: ModeName,
    /// Action taken on even steps in deterministic mode.
    #[serde(default)]
    pub phase: PhaseName,
    /// Optional sweep: run the whole experiment once per listed p.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sweep: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Randomized,
    DeterministicAlternating,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseName {
    #[default]
    AverageFirst,
    ProjectFirst,
}

impl From<PhaseName> for Phase {
    fn from(p: PhaseName) -> Phase {
        match p {
            PhaseName::AverageFirst => Phase::AverageFirst,
            PhaseName::ProjectFirst => Phase::ProjectFirst,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// Lower bound on every averaging weight.
    pub eta: f64,
    #[serde(default)]
    pub weight_rule: WeightRuleConfig,
    pub process: ProcessConfig,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRuleConfig {
    /// Each neighbor (self included) gets `1/|N_i|`.
    #[default]
    Equal,
    /// Fixed self weight; the rest splits equally.
    SelfWeighted(f64),
}

impl From<WeightRuleConfig> for WeightRule {
    fn from(w: WeightRuleConfig) -> WeightRule {
        match w {
            WeightRuleConfig::Equal => WeightRule::Equal,
            WeightRuleConfig::SelfWeighted(s) => WeightRule::SelfWeighted(s),
        }
    }
}

/// Graph process variants; arcs and edges use 1-based node ids.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    /// The same arcs at every step.
    Fixed { arcs: Vec<(u64, u64)> },
    /// `prob[i][j]` = probability of arc i+1 -> j+1, independently per step.
    IndependentArcs { prob: Vec<Vec<f64>> },
    /// Strongly connected backbone spread round-robin over windows of
    /// `window` steps; one activation coin of success probability `q` per
    /// window.
    WindowedBackbone {
        window: u64,
        q: f64,
        backbone: Vec<(u64, u64)>,
    },
    /// Undirected backbone edges spread over a deterministic interval
    /// schedule; one activation coin per interval. Snapshots are
    /// bidirectional.
    SicSchedule {
        q: f64,
        edges: Vec<(u64, u64)>,
        intervals: IntervalConfig,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntervalConfig {
    FixedLength { len: u64 },
    Geometric { first: u64, ratio: f64, cap: u64 },
    Explicit { endpoints: Vec<u64> },
}

impl From<IntervalConfig> for IntervalSequence {
    fn from(c: IntervalConfig) -> IntervalSequence {
        match c {
            IntervalConfig::FixedLength { len } => IntervalSequence::FixedLength { len },
            IntervalConfig::Geometric { first, ratio, cap } => {
                IntervalSequence::Geometric { first, ratio, cap }
            }
            IntervalConfig::Explicit { endpoints } => IntervalSequence::Explicit { endpoints },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    /// Explicit list of run seeds.
    List { list: Vec<u64> },
    /// `base, base + 1, ..., base + count - 1`.
    Range { base: u64, count: u64 },
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List { list } => list.clone(),
            SeedSpec::Range { base, count } => (0..*count).map(|i| base + i).collect(),
        }
    }

    pub fn first(&self) -> Option<u64> {
        match self {
            SeedSpec::List { list } => list.first().copied(),
            SeedSpec::Range { base, count } => (*count > 0).then_some(*base),
        }
    }

    /// Keeps the first seed, replaces the count.
    pub fn with_count(&self, count: u64) -> SeedSpec {
        SeedSpec::Range {
            base: self.first().unwrap_or(0),
            count,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

/// Runtime objects built from a validated config.
#[derive(Clone, Debug)]
pub struct BuiltExperiment {
    pub name: String,
    pub protocol: ProtocolConfig,
    pub graph: GraphProcess,
    pub initial: NetworkState,
    pub horizon: u64,
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub p_values: Vec<f64>,
    pub out_dir: PathBuf,
}

fn to_zero_based(
    pairs: &[(u64, u64)],
    n: usize,
    field: &str,
) -> Result<Vec<(usize, usize)>, HarnessError> {
    pairs
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            let path = format!("{field}[{idx}]");
            if a == 0 || b == 0 {
                return Err(HarnessError::validation(path, "node ids are 1-based"));
            }
            if a as usize > n || b as usize > n {
                return Err(HarnessError::validation(
                    path,
                    format!("node id out of range for n={n}"),
                ));
            }
            Ok((a as usize - 1, b as usize - 1))
        })
        .collect()
}

impl ExperimentConfig {
    /// Normalizes sets in place and checks every structural invariant,
    /// reporting the first failure with its field path.
    pub fn validate(&mut self) -> Result<(), HarnessError> {
        for (i, set) in self.sets.iter_mut().enumerate() {
            set.validate()
                .map_err(|e| HarnessError::validation(format!("sets[{i}]"), e.to_string()))?;
        }
        self.intersection
            .validate()
            .map_err(|e| HarnessError::validation("intersection", e.to_string()))?;
        self.build().map(drop)
    }

    /// Converts to runtime objects, validating on the way. Call
    /// [`ExperimentConfig::validate`] first if the sets may be unnormalized.
    pub fn build(&self) -> Result<BuiltExperiment, HarnessError> {
        if self.sets.is_empty() {
            return Err(HarnessError::validation(
                "sets",
                "need at least one agent set",
            ));
        }
        let n = self.sets.len();
        let dim = self.sets[0].dim();
        if dim == 0 {
            return Err(HarnessError::validation(
                "sets[0]",
                "dimension must be >= 1",
            ));
        }
        for (i, set) in self.sets.iter().enumerate() {
            if set.dim() != dim {
                return Err(HarnessError::validation(
                    format!("sets[{i}]"),
                    format!("dimension {} differs from sets[0]'s {dim}", set.dim()),
                ));
            }
        }
        if self.intersection.dim() != dim {
            return Err(HarnessError::validation(
                "intersection",
                format!(
                    "dimension {} differs from the sets' {dim}",
                    self.intersection.dim()
                ),
            ));
        }
        if self.initial.len() != n {
            return Err(HarnessError::validation(
                "initial",
                format!("{} initial points for {n} agents", self.initial.len()),
            ));
        }
        for (i, x) in self.initial.iter().enumerate() {
            if x.dim() != dim {
                return Err(HarnessError::validation(
                    format!("initial[{i}]"),
                    format!("dimension {} differs from the sets' {dim}", x.dim()),
                ));
            }
            if !x.is_finite() {
                return Err(HarnessError::validation(
                    format!("initial[{i}]"),
                    "coordinates must be finite",
                ));
            }
        }
        if self.epsilons.is_empty()
            || self.epsilons.iter().any(|&e| !e.is_finite() || e <= 0.0)
            || self.epsilons.windows(2).any(|w| w[0] <= w[1])
        {
            return Err(HarnessError::validation(
                "epsilons",
                "must be nonempty, positive and strictly descending",
            ));
        }
        let randomized = self.protocol.mode == ModeName::Randomized;
        if randomized && !(self.protocol.p > 0.0 && self.protocol.p < 1.0) {
            return Err(HarnessError::validation(
                "protocol.p",
                format!("p in (0,1) required, got {}", self.protocol.p),
            ));
        }
        if let Some(sweep) = &self.protocol.p_sweep {
            if sweep.is_empty() {
                return Err(HarnessError::validation(
                    "protocol.p_sweep",
                    "must be nonempty",
                ));
            }
            if randomized && sweep.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return Err(HarnessError::validation(
                    "protocol.p_sweep",
                    "every p must lie in (0,1)",
                ));
            }
        }
        let seeds = self.seeds.seeds();
        if seeds.is_empty() {
            return Err(HarnessError::validation("seeds", "need at least one seed"));
        }

        let kind = match &self.graph.process {
            ProcessConfig::Fixed { arcs } => ProcessKind::Fixed {
                arcs: to_zero_based(arcs, n, "graph.process.arcs")?,
            },
            ProcessConfig::IndependentArcs { prob } => {
                ProcessKind::IndependentArcs { prob: prob.clone() }
            }
            ProcessConfig::WindowedBackbone {
                window,
                q,
                backbone,
            } => ProcessKind::WindowedBackbone {
                window: *window,
                q: *q,
                backbone: to_zero_based(backbone, n, "graph.process.backbone")?,
                scheduler: BackboneScheduler::RoundRobin,
            },
            ProcessConfig::SicSchedule {
                q,
                edges,
                intervals,
            } => ProcessKind::SicSchedule {
                q: *q,
                edges: to_zero_based(edges, n, "graph.process.edges")?,
                intervals: intervals.clone().into(),
            },
        };
        let graph = GraphProcess {
            n,
            eta: self.graph.eta,
            weight_rule: self.graph.weight_rule.into(),
            kind,
        };
        graph
            .validate()
            .map_err(|e| HarnessError::validation("graph", e.to_string()))?;

        let mode = match self.protocol.mode {
            ModeName::Randomized => Mode::Randomized,
            ModeName::DeterministicAlternating => Mode::DeterministicAlternating {
                phase: self.protocol.phase.into(),
            },
        };
        let protocol = ProtocolConfig {
            p: self.protocol.p,
            mode,
            sets: self.sets.clone(),
            intersection: self.intersection.clone(),
        };
        let p_values = self
            .protocol
            .p_sweep
            .clone()
            .unwrap_or_else(|| vec![self.protocol.p]);
        Ok(BuiltExperiment {
            name: self.name.clone(),
            protocol,
            graph,
            initial: NetworkState::new(0, self.initial.clone()),
            horizon: self.horizon,
            epsilons: self.epsilons.clone(),
            seeds,
            p_values,
            out_dir: self.output.dir.clone(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Reads, parses and validates an experiment config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut config: ExperimentConfig = toml::from_str(&text).map_err(|e| HarnessError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::super::preset;
    use super::*;

    #[test]
    fn preset_roundtrips_through_toml() {
        for name in super::super::preset_names() {
            let config = preset(name).unwrap();
            let text = config.to_toml();
            let mut parsed: ExperimentConfig = toml::from_str(&text).unwrap();
            parsed.validate().unwrap();
            assert_eq!(parsed.name, config.name);
            assert_eq!(parsed.sets.len(), config.sets.len());
        }
    }

    #[test]
    fn out_of_range_p_is_rejected_with_field_path() {
        let mut config = preset("section6").unwrap();
        config.protocol.p = 1.2;
        let err = config.validate().unwrap_err();
        match err {
            HarnessError::Validation { field, .. } => assert_eq!(field, "protocol.p"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut config = preset("section6").unwrap();
        config.initial[0] = Point::new(vec![1.0, 2.0, 3.0]);
        let err = config.validate().unwrap_err();
        match err {
            HarnessError::Validation { field, .. } => assert_eq!(field, "initial[0]"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn seed_specs_expand() {
        let range = SeedSpec::Range { base: 5, count: 3 };
        assert_eq!(range.seeds(), vec![5, 6, 7]);
        let list = SeedSpec::List { list: vec![9, 2] };
        assert_eq!(list.seeds(), vec![9, 2]);
        assert_eq!(list.with_count(2).seeds(), vec![9, 10]);
    }
}
