//! `opcon` — randomized projected-consensus experiments from the command
//! line.
//!
//! Exit codes: 0 success, 2 invalid config, 3 invariant or numeric failure,
//! 4 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opcon::graphs::estimate_connectivity_rate;
use opcon::harness::{
    load_config, preset, preset_names, run_experiment, ExperimentConfig, HarnessError,
};

#[derive(Parser)]
#[command(
    name = "opcon",
    about = "Simulate randomized projected consensus over time-varying random graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a preset name
    Run {
        /// Path to a TOML config, or a preset name (see `preset`)
        #[arg(long)]
        config: String,
        /// Override the number of seeds (keeps the first seed)
        #[arg(long)]
        seeds: Option<u64>,
        /// Override the horizon
        #[arg(long)]
        horizon: Option<u64>,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a named preset config, or write it to a file
    Preset {
        /// One of the built-in preset names
        name: String,
        /// Write the config here instead of stdout
        #[arg(long)]
        emit_config: Option<PathBuf>,
    },
    /// Estimate the connectivity rate of a config's graph process
    VerifyGraph {
        /// Path to a TOML config, or a preset name
        #[arg(long)]
        config: String,
        /// Number of Monte Carlo windows
        #[arg(long)]
        windows: u64,
    },
    /// Run the built-in invariant and property suite
    Check,
}

/// Loads a config file, falling back to a preset when the argument names one.
fn resolve_config(spec: &str) -> Result<ExperimentConfig, HarnessError> {
    if Path::new(spec).is_file() {
        load_config(spec)
    } else if preset_names().contains(&spec) {
        preset(spec)
    } else {
        load_config(spec)
    }
}

fn fmt_hit(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.1}"),
        None => "never".into(),
    }
}

fn cmd_run(
    config: &str,
    seeds: Option<u64>,
    horizon: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), HarnessError> {
    let mut config = resolve_config(config)?;
    if let Some(count) = seeds {
        config.seeds = config.seeds.with_count(count);
    }
    if let Some(h) = horizon {
        config.horizon = h;
    }
    if let Some(dir) = out {
        config.output.dir = dir;
    }
    config.validate()?;
    let outcome = run_experiment(&config)?;
    println!(
        "{}: {} steps, {} seed(s)",
        outcome.name,
        outcome.horizon,
        config.seeds.seeds().len()
    );
    for entry in &outcome.entries {
        println!("p = {}", entry.p);
        for (i, eps) in outcome.epsilons.iter().enumerate() {
            println!(
                "  eps {eps:>8}: hit {:5.1}%, joint {:5.1}%, mean first-hit {}, win vs baseline {}",
                entry.ensemble.hit_fraction[i] * 100.0,
                entry.ensemble.joint_hit_fraction[i] * 100.0,
                fmt_hit(&entry.ensemble.mean_first_hit[i]),
                entry.ensemble.win_fraction[i]
                    .map(|w| format!("{:.1}%", w * 100.0))
                    .unwrap_or_else(|| "-".into()),
            );
        }
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn cmd_preset(name: &str, emit: Option<PathBuf>) -> Result<(), HarnessError> {
    let config = preset(name)?;
    let text = config.to_toml();
    match emit {
        Some(path) => {
            std::fs::write(&path, text).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_verify_graph(config: &str, windows: u64) -> Result<(), HarnessError> {
    let config = resolve_config(config)?;
    let built = config.build()?;
    let seed = built.seeds[0];
    let rate = estimate_connectivity_rate(&built.graph, windows, seed)?;
    let flavor = if built.graph.requires_bidirectional() {
        "connected joint graphs (undirected)"
    } else {
        "strongly connected joint graphs"
    };
    println!(
        "{}: {rate:.4} of {windows} windows had {flavor}",
        config.name
    );
    Ok(())
}

fn cmd_check() -> u8 {
    let mut failed = 0;
    for report in opcon::checks::run_all() {
        println!(
            "{} {} — {}",
            if report.passed { "PASS" } else { "FAIL" },
            report.id,
            report.detail
        );
        if !report.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} check(s) failed");
        3
    } else {
        println!("all checks passed");
        0
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seeds,
            horizon,
            out,
        } => cmd_run(&config, seeds, horizon, out),
        Command::Preset { name, emit_config } => cmd_preset(&name, emit_config),
        Command::VerifyGraph { config, windows } => cmd_verify_graph(&config, windows),
        Command::Check => return ExitCode::from(cmd_check()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
