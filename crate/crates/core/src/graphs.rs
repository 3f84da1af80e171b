//! Time-varying random digraph processes.
//!
//! A [`GraphProcess`] declaratively describes the stochastic snapshot
//! sequence: a fixed arc set, per-arc independent coins, a strongly connected
//! backbone spread over fixed windows with one activation coin per window, or
//! a bidirectional backbone spread over a growing interval schedule. Sampling
//! is pure given `(process, step, seed)`: every window or interval draws from
//! its own labeled substream, so outcomes are independent across windows and
//! reproducible in isolation.
//!
//! Node ids are 0-based throughout this module; the config layer translates
//! the 1-based ids used in files.

use std::collections::BTreeSet;

use rand::Rng;

use crate::rng::{substream, DOMAIN_GRAPH};

#[derive(Debug, Clone, thiserror::Error)]
pub enum GraphError {
    #[error(
        "eta {eta} infeasible: node {node} would get weight {weight} \
         over {neighbors} neighbors"
    )]
    InfeasibleEta {
        node: usize,
        weight: f64,
        neighbors: usize,
        eta: f64,
    },
    #[error("snapshots of mixed sizes: expected n={expected}, got n={got}")]
    MixedSizes { expected: usize, got: usize },
    #[error("arc ({0}, {1}) has no reverse arc; graph is not bidirectional")]
    NotBidirectional(usize, usize),
    #[error("cannot union an empty snapshot list")]
    EmptyUnion,
    #[error("invalid graph process: {0}")]
    Invalid(String),
}

/// How row-stochastic weights are assigned over a neighbor set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightRule {
    /// Each of the `|N_i|` neighbors (self included) gets `1/|N_i|`.
    Equal,
    /// Self gets `s`; the remaining `1 - s` splits equally over the others.
    /// A node with no in-arcs keeps weight 1 on itself.
    SelfWeighted(f64),
}

/// One time-step communication graph: arcs plus row-stochastic weights.
///
/// An arc `(j, i)` means node `i` receives from `j`. Self-loops are never
/// stored; every node is implicitly its own neighbor.
#[derive(Clone, Debug, PartialEq)]
pub struct DigraphSnapshot {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
    /// Receiver-indexed `(neighbor, weight)` rows, sorted by neighbor id,
    /// self included.
    weights: Vec<Vec<(usize, f64)>>,
}

impl DigraphSnapshot {
    /// Builds a snapshot from an arc set, assigning weights per `rule` and
    /// rejecting assignments that break the `eta` lower bound.
    pub fn from_arcs(
        n: usize,
        arcs: BTreeSet<(usize, usize)>,
        rule: WeightRule,
        eta: f64,
    ) -> Result<Self, GraphError> {
        for &(a, b) in &arcs {
            if a == b {
                return Err(GraphError::Invalid(format!("self-loop arc ({a}, {a})")));
            }
            if a >= n || b >= n {
                return Err(GraphError::Invalid(format!(
                    "arc ({a}, {b}) out of range for n={n}"
                )));
            }
        }
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut neighbors: Vec<usize> = arcs
                .iter()
                .filter(|&&(_, to)| to == i)
                .map(|&(from, _)| from)
                .collect();
            neighbors.push(i);
            neighbors.sort_unstable();
            let m = neighbors.len();
            let row: Vec<(usize, f64)> = match rule {
                WeightRule::Equal => {
                    let w = 1.0 / m as f64;
                    neighbors.into_iter().map(|j| (j, w)).collect()
                }
                WeightRule::SelfWeighted(_) if m == 1 => vec![(i, 1.0)],
                WeightRule::SelfWeighted(s) => {
                    let other = (1.0 - s) / (m - 1) as f64;
                    neighbors
                        .into_iter()
                        .map(|j| (j, if j == i { s } else { other }))
                        .collect()
                }
            };
            for &(_, w) in &row {
                if w < eta {
                    return Err(GraphError::InfeasibleEta {
                        node: i,
                        weight: w,
                        neighbors: m,
                        eta,
                    });
                }
            }
            weights.push(row);
        }
        Ok(DigraphSnapshot { n, arcs, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    /// `(neighbor, weight)` row for receiver `i`, self included, sorted by id.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.weights[i]
    }

    /// Exact row-stochasticity and lower-bound check; the harness asserts
    /// this on every sampled snapshot.
    pub fn verify_weights(&self, eta: f64) -> Result<(), GraphError> {
        for (i, row) in self.weights.iter().enumerate() {
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(GraphError::Invalid(format!(
                    "node {i} weights sum to {sum}, expected 1"
                )));
            }
            for &(j, w) in row {
                if w < eta {
                    return Err(GraphError::InfeasibleEta {
                        node: i,
                        weight: w,
                        neighbors: row.len(),
                        eta,
                    });
                }
                let _ = j;
            }
        }
        Ok(())
    }

    pub fn is_strongly_connected(&self) -> bool {
        strongly_connected(self.n, &self.arcs)
    }
}

/// Union of snapshot arc sets over a step interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointGraph {
    pub n: usize,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl JointGraph {
    pub fn is_strongly_connected(&self) -> bool {
        strongly_connected(self.n, &self.arcs)
    }

    /// Undirected connectivity. Fails unless the arc set is symmetric.
    pub fn is_connected_bidirectional(&self) -> Result<bool, GraphError> {
        for &(a, b) in &self.arcs {
            if !self.arcs.contains(&(b, a)) {
                return Err(GraphError::NotBidirectional(a, b));
            }
        }
        if self.n == 0 {
            return Ok(true);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.arcs {
                for w in [(a == v).then_some(b), (b == v).then_some(a)]
                    .into_iter()
                    .flatten()
                {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
        }
        Ok(count == self.n)
    }
}

/// Set-union of the snapshots' arcs. All snapshots must share `n`.
pub fn union(snapshots: &[DigraphSnapshot]) -> Result<JointGraph, GraphError> {
    let first = snapshots.first().ok_or(GraphError::EmptyUnion)?;
    let n = first.n;
    let mut arcs = BTreeSet::new();
    for s in snapshots {
        if s.n != n {
            return Err(GraphError::MixedSizes {
                expected: n,
                got: s.n,
            });
        }
        arcs.extend(s.arcs.iter().copied());
    }
    Ok(JointGraph { n, arcs })
}

/// Directed double-reachability check: every node reaches node 0 and is
/// reached from it. O(n + |arcs|) per sweep.
fn strongly_connected(n: usize, arcs: &BTreeSet<(usize, usize)>) -> bool {
    if n <= 1 {
        return true;
    }
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for &(a, b) in arcs {
        fwd[a].push(b);
        bwd[b].push(a);
    }
    let reach = |adj: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    };
    reach(&fwd) && reach(&bwd)
}

/// How backbone arcs are spread over a window or interval.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackboneScheduler {
    /// Arc `t` of the backbone appears in the snapshot at offset
    /// `t mod length` within the active window.
    #[default]
    RoundRobin,
}

/// Deterministic interval schedule for the bidirectional process: interval
/// `tau` covers `[start_tau, start_tau + length(tau))`.
#[derive(Clone, Debug, PartialEq)]
pub enum IntervalSequence {
    /// All intervals share one length.
    FixedLength { len: u64 },
    /// Interval lengths grow geometrically from `first` by `ratio`,
    /// saturating at `cap`.
    Geometric { first: u64, ratio: f64, cap: u64 },
    /// Explicit ascending right endpoints `k*_1 < k*_2 < ...` (with
    /// `k*_0 = 0`); past the list the last gap repeats.
    Explicit { endpoints: Vec<u64> },
}

impl IntervalSequence {
    pub fn validate(&self) -> Result<(), GraphError> {
        match self {
            IntervalSequence::FixedLength { len } => {
                if *len == 0 {
                    return Err(GraphError::Invalid("interval length must be >= 1".into()));
                }
            }
            IntervalSequence::Geometric { first, ratio, cap } => {
                if *first == 0 || *cap == 0 {
                    return Err(GraphError::Invalid(
                        "geometric intervals need first >= 1 and cap >= 1".into(),
                    ));
                }
                if !ratio.is_finite() || *ratio < 1.0 {
                    return Err(GraphError::Invalid(format!(
                        "geometric interval ratio must be >= 1, got {ratio}"
                    )));
                }
            }
            IntervalSequence::Explicit { endpoints } => {
                if endpoints.is_empty() {
                    return Err(GraphError::Invalid(
                        "explicit interval schedule needs at least one endpoint".into(),
                    ));
                }
                let mut prev = 0;
                for &e in endpoints {
                    if e <= prev {
                        return Err(GraphError::Invalid(format!(
                            "interval endpoints must be strictly ascending and positive, \
                             got {e} after {prev}"
                        )));
                    }
                    prev = e;
                }
            }
        }
        Ok(())
    }

    pub fn length(&self, tau: u64) -> u64 {
        match self {
            IntervalSequence::FixedLength { len } => (*len).max(1),
            IntervalSequence::Geometric { first, ratio, cap } => {
                let raw = (*first as f64) * ratio.powi(tau.min(10_000) as i32);
                (raw.round() as u64).clamp(1, (*cap).max(1))
            }
            IntervalSequence::Explicit { endpoints } => {
                let mut prev = 0;
                for (i, &e) in endpoints.iter().enumerate() {
                    if i as u64 == tau {
                        return (e - prev).max(1);
                    }
                    prev = e;
                }
                // past the explicit list: repeat the last gap
                let last_gap = endpoints
                    .windows(2)
                    .last()
                    .map(|w| w[1] - w[0])
                    .or_else(|| endpoints.first().copied())
                    .unwrap_or(1);
                last_gap.max(1)
            }
        }
    }

    /// `(tau, start, len)` of the interval containing step `k`.
    pub fn interval_of(&self, k: u64) -> (u64, u64, u64) {
        match self {
            IntervalSequence::FixedLength { len } => {
                let len = (*len).max(1);
                let tau = k / len;
                (tau, tau * len, len)
            }
            _ => {
                let mut tau = 0;
                let mut start = 0;
                loop {
                    let len = self.length(tau);
                    if k < start + len {
                        return (tau, start, len);
                    }
                    // geometric schedules saturate; skip the capped tail in one hop
                    if let IntervalSequence::Geometric { cap, .. } = self {
                        if len == (*cap).max(1) {
                            let hops = (k - start) / len;
                            tau += hops;
                            start += hops * len;
                            return (tau, start, len);
                        }
                    }
                    start += len;
                    tau += 1;
                }
            }
        }
    }
}

/// Generator of the snapshot sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphProcess {
    pub n: usize,
    /// Lower bound on every assigned weight (A2-style).
    pub eta: f64,
    pub weight_rule: WeightRule,
    pub kind: ProcessKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessKind {
    /// The same arc set at every step.
    Fixed { arcs: Vec<(usize, usize)> },
    /// Arc `(i, j)` present independently with probability `prob[i][j]`
    /// per step.
    IndependentArcs { prob: Vec<Vec<f64>> },
    /// One Bernoulli(q) coin per window of `window` steps decides whether the
    /// strongly connected backbone is spread over that window's snapshots.
    WindowedBackbone {
        window: u64,
        q: f64,
        backbone: Vec<(usize, usize)>,
        scheduler: BackboneScheduler,
    },
    /// Bidirectional analogue: one coin per schedule interval decides whether
    /// the undirected backbone edges (emitted as arc pairs) are spread over
    /// the interval.
    SicSchedule {
        q: f64,
        /// Undirected backbone edges; each scheduled edge contributes both arcs.
        edges: Vec<(usize, usize)>,
        intervals: IntervalSequence,
    },
}

impl GraphProcess {
    /// Structural validation: arc ranges, probabilities, backbone
    /// connectivity, and `eta` feasibility against the worst-case in-degree.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.n;
        if n == 0 {
            return Err(GraphError::Invalid("graph needs n >= 1".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(GraphError::Invalid(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if let WeightRule::SelfWeighted(s) = self.weight_rule {
            if !(s >= self.eta && s <= 1.0 - self.eta) {
                return Err(GraphError::Invalid(format!(
                    "self weight {s} must lie in [eta, 1 - eta] = [{}, {}]",
                    self.eta,
                    1.0 - self.eta
                )));
            }
        }
        let check_arcs = |arcs: &[(usize, usize)], symmetric: bool| -> Result<(), GraphError> {
            for &(a, b) in arcs {
                if a >= n || b >= n {
                    return Err(GraphError::Invalid(format!(
                        "arc ({a}, {b}) out of range for n={n}"
                    )));
                }
                if a == b {
                    return Err(GraphError::Invalid(format!("self-loop arc ({a}, {a})")));
                }
            }
            let _ = symmetric;
            Ok(())
        };
        let max_in_degree = match &self.kind {
            ProcessKind::Fixed { arcs } => {
                check_arcs(arcs, false)?;
                in_degree_bound(n, arcs.iter().copied())
            }
            ProcessKind::IndependentArcs { prob } => {
                if prob.len() != n || prob.iter().any(|row| row.len() != n) {
                    return Err(GraphError::Invalid(format!(
                        "probability matrix must be {n}x{n}"
                    )));
                }
                for (i, row) in prob.iter().enumerate() {
                    for (j, &p) in row.iter().enumerate() {
                        if !(0.0..=1.0).contains(&p) {
                            return Err(GraphError::Invalid(format!(
                                "prob[{i}][{j}] = {p} outside [0, 1]"
                            )));
                        }
                        if i == j && p != 0.0 {
                            return Err(GraphError::Invalid(format!(
                                "prob[{i}][{i}] must be 0 (no self-loops)"
                            )));
                        }
                    }
                }
                let arcs = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| i != j && prob[i][j] > 0.0);
                in_degree_bound(n, arcs)
            }
            ProcessKind::WindowedBackbone {
                window,
                q,
                backbone,
                ..
            } => {
                if *window < 1 {
                    return Err(GraphError::Invalid("window length must be >= 1".into()));
                }
                if !(*q > 0.0 && *q <= 1.0) {
                    return Err(GraphError::Invalid(format!(
                        "window success probability must lie in (0, 1], got {q}"
                    )));
                }
                check_arcs(backbone, false)?;
                if !strongly_connected(n, &backbone.iter().copied().collect()) {
                    return Err(GraphError::Invalid(
                        "windowed backbone must be strongly connected".into(),
                    ));
                }
                in_degree_bound(n, backbone.iter().copied())
            }
            ProcessKind::SicSchedule {
                q,
                edges,
                intervals,
            } => {
                if !(*q > 0.0 && *q <= 1.0) {
                    return Err(GraphError::Invalid(format!(
                        "interval success probability must lie in (0, 1], got {q}"
                    )));
                }
                intervals.validate()?;
                check_arcs(edges, true)?;
                let arcs: BTreeSet<(usize, usize)> =
                    edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
                let joint = JointGraph {
                    n,
                    arcs: arcs.clone(),
                };
                if !joint.is_connected_bidirectional()? {
                    return Err(GraphError::Invalid(
                        "bidirectional backbone must be connected".into(),
                    ));
                }
                in_degree_bound(n, arcs.into_iter())
            }
        };
        // worst-case neighbor count = self + max in-degree
        let worst = max_in_degree + 1;
        let min_weight = match self.weight_rule {
            WeightRule::Equal => 1.0 / worst as f64,
            WeightRule::SelfWeighted(s) => {
                if worst == 1 {
                    1.0
                } else {
                    s.min((1.0 - s) / (worst - 1) as f64)
                }
            }
        };
        if min_weight < self.eta {
            return Err(GraphError::Invalid(format!(
                "eta {} infeasible: a node with {max_in_degree} in-arcs would \
                 get weight {min_weight}",
                self.eta
            )));
        }
        Ok(())
    }

    /// Steps `[start, end)` spanned by Monte Carlo window `m`: one step for
    /// memoryless processes, the window for the windowed backbone, the
    /// schedule interval for the bidirectional process.
    pub fn window_span(&self, m: u64) -> (u64, u64) {
        match &self.kind {
            ProcessKind::Fixed { .. } | ProcessKind::IndependentArcs { .. } => (m, m + 1),
            ProcessKind::WindowedBackbone { window, .. } => (m * window, (m + 1) * window),
            ProcessKind::SicSchedule { intervals, .. } => {
                let mut start = 0;
                for tau in 0..m {
                    start += intervals.length(tau);
                }
                (start, start + intervals.length(m))
            }
        }
    }

    /// Whether the joint graph over a window must be strongly connected
    /// (directed flavor) or connected as an undirected graph.
    pub fn requires_bidirectional(&self) -> bool {
        matches!(self.kind, ProcessKind::SicSchedule { .. })
    }
}

fn in_degree_bound(n: usize, arcs: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut deg = vec![0usize; n];
    let mut seen = BTreeSet::new();
    for (a, b) in arcs {
        if seen.insert((a, b)) {
            deg[b] += 1;
        }
    }
    deg.into_iter().max().unwrap_or(0)
}

/// Samples the communication graph of step `k`.
///
/// Windowed and interval processes key their activation coin on the window
/// index, so each window's outcome comes from its own substream, independent
/// of every other window and of the agents' decision stream.
pub fn sample_snapshot(
    process: &GraphProcess,
    k: u64,
    seed: u64,
) -> Result<DigraphSnapshot, GraphError> {
    let n = process.n;
    let arcs: BTreeSet<(usize, usize)> = match &process.kind {
        ProcessKind::Fixed { arcs } => arcs.iter().copied().collect(),
        ProcessKind::IndependentArcs { prob } => {
            let mut rng = substream(seed, DOMAIN_GRAPH, k);
            let mut arcs = BTreeSet::new();
            for (i, row) in prob.iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    if i != j && p > 0.0 && rng.random_bool(p) {
                        arcs.insert((i, j));
                    }
                }
            }
            arcs
        }
        ProcessKind::WindowedBackbone {
            window,
            q,
            backbone,
            scheduler: BackboneScheduler::RoundRobin,
        } => {
            let m = k / window;
            let offset = k % window;
            let mut rng = substream(seed, DOMAIN_GRAPH, m);
            if rng.random_bool(*q) {
                backbone
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| *t as u64 % window == offset)
                    .map(|(_, &arc)| arc)
                    .collect()
            } else {
                BTreeSet::new()
            }
        }
        ProcessKind::SicSchedule {
            q,
            edges,
            intervals,
        } => {
            let (tau, start, len) = intervals.interval_of(k);
            let offset = k - start;
            let mut rng = substream(seed, DOMAIN_GRAPH, tau);
            if rng.random_bool(*q) {
                edges
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| *t as u64 % len == offset)
                    .flat_map(|(_, &(a, b))| [(a, b), (b, a)])
                    .collect()
            } else {
                BTreeSet::new()
            }
        }
    };
    DigraphSnapshot::from_arcs(n, arcs, process.weight_rule, process.eta)
}

/// Fraction of `windows` whose joint graph passes the process's connectivity
/// test. Used to certify that a generator actually meets its declared rate.
pub fn estimate_connectivity_rate(
    process: &GraphProcess,
    windows: u64,
    seed: u64,
) -> Result<f64, GraphError> {
    assert!(windows >= 1);
    let mut hits = 0u64;
    for m in 0..windows {
        let (start, end) = process.window_span(m);
        let snaps: Vec<DigraphSnapshot> = (start..end)
            .map(|k| sample_snapshot(process, k, seed))
            .collect::<Result<_, _>>()?;
        let joint = union(&snaps)?;
        let connected = if process.requires_bidirectional() {
            joint.is_connected_bidirectional()?
        } else {
            joint.is_strongly_connected()
        };
        if connected {
            hits += 1;
        }
    }
    Ok(hits as f64 / windows as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed_cycle(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn cycle_weights_match_self_weighted_half() {
        // arcs 1->2, 2->3, 3->1 in 1-based labels
        let process = GraphProcess {
            n: 3,
            eta: 0.1,
            weight_rule: WeightRule::SelfWeighted(0.5),
            kind: ProcessKind::Fixed {
                arcs: fixed_cycle(3),
            },
        };
        process.validate().unwrap();
        let snap = sample_snapshot(&process, 0, 1).unwrap();
        // node 1 (0-based) receives from node 0 and itself, each 0.5
        assert_eq!(snap.neighbors(1), &[(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn empty_probabilities_isolate_nodes() {
        let process = GraphProcess {
            n: 3,
            eta: 0.1,
            weight_rule: WeightRule::SelfWeighted(0.5),
            kind: ProcessKind::IndependentArcs {
                prob: vec![vec![0.0; 3]; 3],
            },
        };
        let snap = sample_snapshot(&process, 5, 9).unwrap();
        assert!(snap.arcs().is_empty());
        for i in 0..3 {
            assert_eq!(snap.neighbors(i), &[(i, 1.0)]);
        }
    }

    #[test]
    fn windowed_backbone_union_covers_backbone() {
        let backbone = fixed_cycle(3);
        let process = GraphProcess {
            n: 3,
            eta: 0.1,
            weight_rule: WeightRule::Equal,
            kind: ProcessKind::WindowedBackbone {
                window: 4,
                q: 1.0,
                backbone: backbone.clone(),
                scheduler: BackboneScheduler::RoundRobin,
            },
        };
        let snaps: Vec<_> = (0..4)
            .map(|k| sample_snapshot(&process, k, 3).unwrap())
            .collect();
        let joint = union(&snaps).unwrap();
        for arc in backbone {
            assert!(joint.arcs.contains(&arc));
        }
        assert!(joint.is_strongly_connected());
    }

    #[test]
    fn union_of_empties_is_empty() {
        let empty = DigraphSnapshot::from_arcs(2, BTreeSet::new(), WeightRule::Equal, 0.1).unwrap();
        let joint = union(&[empty.clone(), empty]).unwrap();
        assert!(joint.arcs.is_empty());
    }

    #[test]
    fn union_merges_arcs() {
        let a =
            DigraphSnapshot::from_arcs(3, [(0, 1)].into_iter().collect(), WeightRule::Equal, 0.1)
                .unwrap();
        let b =
            DigraphSnapshot::from_arcs(3, [(1, 2)].into_iter().collect(), WeightRule::Equal, 0.1)
                .unwrap();
        let joint = union(&[a, b]).unwrap();
        assert_eq!(joint.arcs, [(0, 1), (1, 2)].into_iter().collect());
    }

    #[test]
    fn union_rejects_mixed_sizes() {
        let a = DigraphSnapshot::from_arcs(2, BTreeSet::new(), WeightRule::Equal, 0.1).unwrap();
        let b = DigraphSnapshot::from_arcs(3, BTreeSet::new(), WeightRule::Equal, 0.1).unwrap();
        assert!(matches!(
            union(&[a, b]),
            Err(GraphError::MixedSizes {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn strong_connectivity_cases() {
        let cycle = JointGraph {
            n: 3,
            arcs: fixed_cycle(3).into_iter().collect(),
        };
        assert!(cycle.is_strongly_connected());
        let fan = JointGraph {
            n: 3,
            arcs: [(0, 1), (0, 2)].into_iter().collect(),
        };
        assert!(!fan.is_strongly_connected());
        let singleton = JointGraph {
            n: 1,
            arcs: BTreeSet::new(),
        };
        assert!(singleton.is_strongly_connected());
    }

    #[test]
    fn bidirectional_connectivity_cases() {
        let path = JointGraph {
            n: 3,
            arcs: [(0, 1), (1, 0), (1, 2), (2, 1)].into_iter().collect(),
        };
        assert!(path.is_connected_bidirectional().unwrap());
        let split = JointGraph {
            n: 3,
            arcs: [(0, 1), (1, 0)].into_iter().collect(),
        };
        assert!(!split.is_connected_bidirectional().unwrap());
        let lone = JointGraph {
            n: 1,
            arcs: BTreeSet::new(),
        };
        assert!(lone.is_connected_bidirectional().unwrap());
        let asym = JointGraph {
            n: 2,
            arcs: [(0, 1)].into_iter().collect(),
        };
        assert!(matches!(
            asym.is_connected_bidirectional(),
            Err(GraphError::NotBidirectional(0, 1))
        ));
    }

    #[test]
    fn fixed_strongly_connected_rate_is_one() {
        let process = GraphProcess {
            n: 3,
            eta: 0.1,
            weight_rule: WeightRule::Equal,
            kind: ProcessKind::Fixed {
                arcs: fixed_cycle(3),
            },
        };
        assert_eq!(estimate_connectivity_rate(&process, 100, 5).unwrap(), 1.0);
    }

    #[test]
    fn all_zero_probabilities_never_connect() {
        let process = GraphProcess {
            n: 2,
            eta: 0.1,
            weight_rule: WeightRule::Equal,
            kind: ProcessKind::IndependentArcs {
                prob: vec![vec![0.0; 2]; 2],
            },
        };
        assert_eq!(estimate_connectivity_rate(&process, 50, 5).unwrap(), 0.0);
    }

    #[test]
    fn infeasible_eta_is_rejected() {
        // star into node 0: in-degree 3, equal weights 1/4 < 0.3
        let arcs = vec![(1, 0), (2, 0), (3, 0)];
        let process = GraphProcess {
            n: 4,
            eta: 0.3,
            weight_rule: WeightRule::Equal,
            kind: ProcessKind::Fixed { arcs },
        };
        assert!(process.validate().is_err());
    }

    #[test]
    fn interval_sequences_partition_time() {
        for seq in [
            IntervalSequence::FixedLength { len: 7 },
            IntervalSequence::Geometric {
                first: 4,
                ratio: 1.3,
                cap: 40,
            },
            IntervalSequence::Explicit {
                endpoints: vec![3, 10, 30],
            },
        ] {
            let mut expected_start = 0;
            let mut expected_tau = 0;
            let mut k = 0;
            while k < 500 {
                let len = seq.length(expected_tau);
                for step in expected_start..expected_start + len {
                    if step >= 500 {
                        break;
                    }
                    assert_eq!(seq.interval_of(step), (expected_tau, expected_start, len));
                }
                expected_start += len;
                expected_tau += 1;
                k = expected_start;
            }
        }
    }

    #[test]
    fn bad_interval_schedules_are_rejected() {
        let mk = |intervals: IntervalSequence| GraphProcess {
            n: 3,
            eta: 0.1,
            weight_rule: WeightRule::Equal,
            kind: ProcessKind::SicSchedule {
                q: 0.5,
                edges: vec![(0, 1), (1, 2)],
                intervals,
            },
        };
        assert!(mk(IntervalSequence::FixedLength { len: 0 }).validate().is_err());
        assert!(mk(IntervalSequence::Explicit { endpoints: vec![] })
            .validate()
            .is_err());
        assert!(mk(IntervalSequence::Explicit {
            endpoints: vec![5, 5]
        })
        .validate()
        .is_err());
        assert!(mk(IntervalSequence::Explicit {
            endpoints: vec![5, 3]
        })
        .validate()
        .is_err());
        assert!(mk(IntervalSequence::Geometric {
            first: 2,
            ratio: 0.5,
            cap: 10
        })
        .validate()
        .is_err());
        assert!(mk(IntervalSequence::Explicit {
            endpoints: vec![3, 10]
        })
        .validate()
        .is_ok());
    }

    #[test]
    fn window_resampling_is_isolated() {
        let process = GraphProcess {
            n: 4,
            eta: 0.1,
            weight_rule: WeightRule::Equal,
            kind: ProcessKind::WindowedBackbone {
                window: 3,
                q: 0.5,
                backbone: fixed_cycle(4),
                scheduler: BackboneScheduler::RoundRobin,
            },
        };
        // sample window 5 in isolation, then interleaved with other windows
        let isolated: Vec<_> = (15..18)
            .map(|k| sample_snapshot(&process, k, 77).unwrap())
            .collect();
        for k in 0..15 {
            sample_snapshot(&process, k, 77).unwrap();
        }
        let again: Vec<_> = (15..18)
            .map(|k| sample_snapshot(&process, k, 77).unwrap())
            .collect();
        assert_eq!(isolated, again);
    }
}
