//! Named experiment presets.
//!
//! `section6` is the fixed three-node instance used throughout: a directed
//! 3-cycle with weight 1/2 per arc, three unit disks whose intersection is
//! the origin, and corners of a square as initial values. The demo presets
//! exercise the two stochastic connectivity regimes with target sets whose
//! intersection is known in closed form, so the distance metrics stay exact.

use super::config::{
    ExperimentConfig, GraphSection, IntervalConfig, ModeName, OutputSection, PhaseName,
    ProcessConfig, ProtocolSection, SeedSpec, WeightRuleConfig,
};
use super::HarnessError;
use crate::convex::ConvexSet;
use crate::point::Point;

pub fn preset_names() -> Vec<&'static str> {
    vec![
        "section6",
        "section6_deterministic",
        "p_sweep",
        "susc_demo",
        "sic_bidirectional_demo",
    ]
}

/// Builds a named preset. The returned config is already validated.
pub fn preset(name: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match name {
        "section6" => three_disks(ModeName::Randomized, "section6"),
        "section6_deterministic" => {
            let mut c = three_disks(ModeName::DeterministicAlternating, "section6_deterministic");
            c.seeds = SeedSpec::Range { base: 42, count: 1 };
            c
        }
        "p_sweep" => {
            let mut c = three_disks(ModeName::Randomized, "p_sweep");
            c.protocol.p_sweep = Some(vec![0.2, 0.5, 0.8]);
            c.seeds = SeedSpec::Range {
                base: 42,
                count: 500,
            };
            c
        }
        "susc_demo" => windowed_boxes(),
        "sic_bidirectional_demo" => interval_balls(),
        other => return Err(HarnessError::UnknownPreset(other.to_string())),
    };
    config.validate()?;
    Ok(config)
}

fn pt(coords: &[f64]) -> Point {
    Point::from(coords)
}

fn three_disks(mode: ModeName, name: &str) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        horizon: 300,
        epsilons: vec![1e-2, 1e-3, 1e-6],
        protocol: ProtocolSection {
            p: 0.5,
            mode,
            phase: PhaseName::AverageFirst,
            p_sweep: None,
        },
        graph: GraphSection {
            eta: 0.1,
            weight_rule: WeightRuleConfig::SelfWeighted(0.5),
            process: ProcessConfig::Fixed {
                arcs: vec![(1, 2), (2, 3), (3, 1)],
            },
        },
        sets: vec![
            ConvexSet::ball(vec![-1.0, 0.0], 1.0),
            ConvexSet::ball(vec![1.0, 0.0], 1.0),
            ConvexSet::ball(vec![0.0, -1.0], 1.0),
        ],
        intersection: ConvexSet::ball(vec![0.0, 0.0], 0.0),
        initial: vec![pt(&[-2.0, 2.0]), pt(&[-2.0, -2.0]), pt(&[2.0, -2.0])],
        seeds: SeedSpec::Range {
            base: 42,
            count: 1000,
        },
        output: OutputSection {
            dir: format!("out/{name}").into(),
        },
    }
}

/// Six nodes on a directed cycle backbone, spread over 5-step windows with a
/// 0.7 activation rate. Boxes and halfspaces intersect in the box
/// [-0.5, 0.5]^2.
fn windowed_boxes() -> ExperimentConfig {
    ExperimentConfig {
        name: "susc_demo".to_string(),
        horizon: 2000,
        epsilons: vec![1e-1, 1e-2],
        protocol: ProtocolSection {
            p: 0.5,
            mode: ModeName::Randomized,
            phase: PhaseName::AverageFirst,
            p_sweep: None,
        },
        graph: GraphSection {
            eta: 0.1,
            weight_rule: WeightRuleConfig::Equal,
            process: ProcessConfig::WindowedBackbone {
                window: 5,
                q: 0.7,
                backbone: vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)],
            },
        },
        sets: vec![
            ConvexSet::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]),
            ConvexSet::halfspace(vec![1.0, 0.0], 0.5),
            ConvexSet::halfspace(vec![-1.0, 0.0], 0.5),
            ConvexSet::halfspace(vec![0.0, 1.0], 0.5),
            ConvexSet::halfspace(vec![0.0, -1.0], 0.5),
            ConvexSet::axis_box(vec![-0.75, -0.75], vec![0.75, 0.75]),
        ],
        intersection: ConvexSet::axis_box(vec![-0.5, -0.5], vec![0.5, 0.5]),
        initial: vec![
            pt(&[3.0, 3.0]),
            pt(&[-3.0, 3.0]),
            pt(&[-3.0, -3.0]),
            pt(&[3.0, -3.0]),
            pt(&[4.0, 0.0]),
            pt(&[0.0, 4.0]),
        ],
        seeds: SeedSpec::Range {
            base: 7,
            count: 200,
        },
        output: OutputSection {
            dir: "out/susc_demo".into(),
        },
    }
}

/// Five nodes on an undirected path backbone over geometrically growing
/// intervals. The five balls share exactly one point, the origin.
fn interval_balls() -> ExperimentConfig {
    ExperimentConfig {
        name: "sic_bidirectional_demo".to_string(),
        horizon: 5000,
        epsilons: vec![1e-1, 1e-2],
        protocol: ProtocolSection {
            p: 0.5,
            mode: ModeName::Randomized,
            phase: PhaseName::AverageFirst,
            p_sweep: None,
        },
        graph: GraphSection {
            eta: 0.1,
            weight_rule: WeightRuleConfig::Equal,
            process: ProcessConfig::SicSchedule {
                q: 0.9,
                edges: vec![(1, 2), (2, 3), (3, 4), (4, 5)],
                intervals: IntervalConfig::Geometric {
                    first: 4,
                    ratio: 1.15,
                    cap: 25,
                },
            },
        },
        sets: vec![
            ConvexSet::ball(vec![-1.0, 0.0], 1.0),
            ConvexSet::ball(vec![1.0, 0.0], 1.0),
            ConvexSet::ball(vec![0.0, 1.0], 1.0),
            ConvexSet::ball(vec![0.0, -1.0], 1.0),
            ConvexSet::ball(vec![0.0, 1.5], 1.5),
        ],
        intersection: ConvexSet::ball(vec![0.0, 0.0], 0.0),
        initial: vec![
            pt(&[-2.0, 1.5]),
            pt(&[2.0, 1.5]),
            pt(&[1.5, -2.0]),
            pt(&[-1.5, -2.0]),
            pt(&[0.0, 2.5]),
        ],
        seeds: SeedSpec::Range {
            base: 11,
            count: 200,
        },
        output: OutputSection {
            dir: "out/sic_bidirectional_demo".into(),
        },
    }
}
