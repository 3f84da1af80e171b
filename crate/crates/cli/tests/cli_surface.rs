//! Binary surface: subcommands, overrides and exit codes.

use std::process::Command;

fn opcon() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opcon"))
}

#[test]
fn preset_emits_a_loadable_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("section6.toml");
    let out = opcon()
        .args([
            "preset",
            "section6",
            "--emit-config",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let config = opcon::harness::load_config(&path).unwrap();
    assert_eq!(config.name, "section6");
}

#[test]
fn preset_prints_to_stdout() {
    let out = opcon()
        .args(["preset", "sic_bidirectional_demo"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("type = \"sic_schedule\""));
}

#[test]
fn unknown_preset_exits_2() {
    let out = opcon().args(["preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_accepts_overrides_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let out = opcon()
        .args([
            "run",
            "--config",
            "section6",
            "--seeds",
            "4",
            "--horizon",
            "50",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("trace.csv").is_file());
    assert!(out_dir.join("summary.json").is_file());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("4 seed(s)"), "{stdout}");
}

#[test]
fn run_from_config_file_works() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    let mut config = opcon::harness::preset("section6").unwrap();
    config.seeds = opcon::harness::SeedSpec::Range { base: 1, count: 2 };
    config.horizon = 30;
    config.output.dir = dir.path().join("out");
    std::fs::write(&path, config.to_toml()).unwrap();
    let out = opcon()
        .args(["run", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = opcon::harness::preset("section6").unwrap().to_toml();
    std::fs::write(&path, text.replace("p = 0.5", "p = 1.7")).unwrap();
    let out = opcon()
        .args(["run", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("protocol.p"), "{stderr}");
}

#[test]
fn missing_config_file_exits_4() {
    let out = opcon()
        .args(["run", "--config", "/definitely/not/here.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn shipped_config_files_match_the_presets() {
    let configs = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in opcon::harness::preset_names() {
        let on_disk = std::fs::read_to_string(configs.join(format!("{name}.toml")))
            .unwrap_or_else(|e| panic!("configs/{name}.toml: {e}"));
        let generated = opcon::harness::preset(name).unwrap().to_toml();
        assert_eq!(on_disk, generated, "configs/{name}.toml is out of date");
    }
}

#[test]
fn verify_graph_reports_a_rate() {
    let out = opcon()
        .args(["verify-graph", "--config", "susc_demo", "--windows", "500"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("of 500 windows"), "{stdout}");
}
