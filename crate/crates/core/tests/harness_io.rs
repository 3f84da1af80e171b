//! File-level harness behavior: config loading, trace CSV structure, and
//! recomputability of the summary statistics from the CSV alone.

use std::collections::BTreeMap;

use opcon::harness::{
    execute, load_config, preset, read_trace_csv, run_experiment, SeedSpec, TraceRow,
};

#[test]
fn preset_config_files_load_back() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["section6", "susc_demo"] {
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, preset(name).unwrap().to_toml()).unwrap();
        let config = load_config(&path).unwrap();
        assert_eq!(config.name, name);
        config.build().unwrap();
    }
}

#[test]
fn all_set_variants_survive_a_config_round_trip() {
    use opcon::convex::ConvexSet;
    use opcon::point::Point;

    // two agents in R^2: an affine line, and a ball cut by a halfspace;
    // both contain the segment around (0.25, 0), declared via a box
    let mut config = preset("section6").unwrap();
    config.name = "variants".into();
    config.sets = vec![
        ConvexSet::AffineSubspace {
            basepoint: Point::new(vec![0.0, 0.0]),
            directions: vec![Point::new(vec![1.0, 0.0])],
        },
        ConvexSet::intersection(vec![
            ConvexSet::ball(vec![0.0, 0.0], 1.0),
            ConvexSet::halfspace(vec![1.0, 0.0], 0.5),
        ]),
    ];
    config.intersection = ConvexSet::axis_box(vec![-1.0, 0.0], vec![0.5, 0.0]);
    config.initial = vec![Point::new(vec![3.0, 2.0]), Point::new(vec![-2.0, -2.0])];
    config.graph.process = opcon::harness::ProcessConfig::Fixed {
        arcs: vec![(1, 2), (2, 1)],
    };
    config.seeds = SeedSpec::Range { base: 3, count: 4 };
    config.horizon = 250;

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("variants.toml");
    std::fs::write(&path, config.to_toml()).unwrap();
    let loaded = load_config(&path).unwrap();
    assert_eq!(loaded.sets, config.sets);

    let outcome = execute(&loaded).unwrap();
    let last = outcome.entries[0].runs.iter().map(|r| r.final_d0);
    for d0 in last {
        assert!(d0 < 0.1, "agents should approach the segment, d0 {d0}");
    }
}

#[test]
fn malformed_toml_reports_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "name = \"x\"\nhorizon = [oops").unwrap();
    let err = load_config(&path).unwrap_err();
    assert_eq!(err.exit_code(), 2, "unexpected error: {err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_config("/nonexistent/nowhere.toml").unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

fn small_section6() -> opcon::harness::ExperimentConfig {
    let mut config = preset("section6").unwrap();
    config.seeds = SeedSpec::Range {
        base: 42,
        count: 20,
    };
    config.horizon = 120;
    config
}

#[test]
fn zero_horizon_trace_has_one_row_per_agent() {
    let mut config = preset("section6").unwrap();
    config.horizon = 0;
    config.seeds = SeedSpec::List { list: vec![7] };
    let outcome = execute(&config).unwrap();
    let rows = read_trace_csv(&outcome.entries[0].trace_csv[..]).unwrap();
    assert_eq!(rows.len(), 3);
    let initial_d0 = 2.0 * 2f64.sqrt();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.seed, 7);
        assert_eq!(row.k, 0);
        assert_eq!(row.agent, i + 1);
        assert_eq!(row.decision, "init");
        assert!((row.d0 - initial_d0).abs() < 1e-12);
    }
}

#[test]
fn trace_d0_is_non_increasing_within_every_seed() {
    let outcome = execute(&small_section6()).unwrap();
    let rows = read_trace_csv(&outcome.entries[0].trace_csv[..]).unwrap();
    let mut last: BTreeMap<u64, (u64, f64)> = BTreeMap::new();
    for row in &rows {
        if let Some(&(prev_k, prev_d0)) = last.get(&row.seed) {
            if row.k > prev_k {
                assert!(
                    row.d0 <= prev_d0 + 1e-9,
                    "seed {} k {}: {} > {}",
                    row.seed,
                    row.k,
                    row.d0,
                    prev_d0
                );
            }
        }
        last.insert(row.seed, (row.k, row.d0));
    }
}

#[test]
fn rows_are_ordered_by_seed_step_agent() {
    let outcome = execute(&small_section6()).unwrap();
    let rows = read_trace_csv(&outcome.entries[0].trace_csv[..]).unwrap();
    let keys: Vec<(u64, u64, usize)> = rows.iter().map(|r| (r.seed, r.k, r.agent)).collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
    assert_eq!(rows.len(), 20 * 121 * 3);
}

/// First step at which the seed's d0 column drops to eps, straight from rows.
fn first_hit_from_rows(rows: &[TraceRow], seed: u64, eps: f64) -> Option<u64> {
    rows.iter()
        .filter(|r| r.seed == seed && r.d0 <= eps)
        .map(|r| r.k)
        .min()
}

#[test]
fn win_fraction_is_recomputable_from_the_csv() {
    let config = small_section6();
    let outcome = execute(&config).unwrap();
    let entry = &outcome.entries[0];
    let rows = read_trace_csv(&entry.trace_csv[..]).unwrap();
    let reference = entry.reference.as_ref().unwrap();
    for (e, &eps) in config.epsilons.iter().enumerate() {
        let mut wins = 0usize;
        for summary in &entry.runs {
            let from_csv = first_hit_from_rows(&rows, summary.seed, eps);
            assert_eq!(from_csv, summary.first_hit[e], "seed {}", summary.seed);
            let win = match (from_csv, reference.first_hit[e]) {
                (Some(mine), Some(theirs)) => mine < theirs,
                (Some(_), None) => true,
                (None, _) => false,
            };
            wins += win as usize;
        }
        let expected = wins as f64 / entry.runs.len() as f64;
        assert_eq!(entry.ensemble.win_fraction[e], Some(expected));
    }
}

#[test]
fn run_experiment_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_section6();
    config.seeds = SeedSpec::Range { base: 42, count: 5 };
    config.output.dir = dir.path().join("run1");
    let outcome = run_experiment(&config).unwrap();
    assert_eq!(outcome.files.len(), 2);
    let trace_path = dir.path().join("run1/trace.csv");
    let summary_path = dir.path().join("run1/summary.json");
    assert!(trace_path.is_file());
    assert!(summary_path.is_file());

    // repeated invocation produces byte-identical output
    config.output.dir = dir.path().join("run2");
    run_experiment(&config).unwrap();
    let a = std::fs::read(&trace_path).unwrap();
    let b = std::fs::read(dir.path().join("run2/trace.csv")).unwrap();
    assert_eq!(a, b);

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&summary_path).unwrap()).unwrap();
    assert_eq!(summary["name"], "section6");
    assert_eq!(summary["entries"][0]["runs"].as_array().unwrap().len(), 5);
    assert!(!summary["entries"][0]["ensemble"]["mean_d0_trajectory"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn p_sweep_produces_one_entry_per_p() {
    let mut config = preset("p_sweep").unwrap();
    config.seeds = SeedSpec::Range { base: 1, count: 10 };
    config.horizon = 60;
    let outcome = execute(&config).unwrap();
    let ps: Vec<f64> = outcome.entries.iter().map(|e| e.p).collect();
    assert_eq!(ps, vec![0.2, 0.5, 0.8]);
}
