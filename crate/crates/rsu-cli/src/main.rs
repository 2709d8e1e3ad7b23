//! `rsu`: batch front-end for the RSU deployment pipeline.
//!
//! Subcommands: `optimize` (island-model NSGA-III runs), `compare-offloading`
//! (strategy race on a fixed deployment), `report-metrics` (front quality
//! indicators and the merged Pareto table) and `synth-scenario`
//! (deterministic synthetic worlds). All results are CSV/JSON files for
//! external plotting.

mod commands;
mod config;
mod csvio;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CmdError, CmdResult};

#[derive(Parser)]
#[command(name = "rsu", version, about = "Multi-objective RSU deployment toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration: a TOML file or a JSON manifest from a previous run.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Dotted-path config override, e.g. --set evolver.calibrate=false.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory (defaults to the config's output_dir).
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Seed (repeatable; replaces the config's seed list).
    #[arg(long = "seed", global = true, value_name = "N")]
    seeds: Vec<u64>,

    /// Worker threads for parallel evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the island-model optimizer for every seed.
    Optimize,
    /// Race the offloading strategies on a fixed deployment.
    CompareOffloading,
    /// Score front CSVs and build the merged Pareto table.
    ReportMetrics {
        /// Front CSV files (columns f1_s, f2_s, f3, phi, algorithm, seed).
        #[arg(required = true, value_name = "FRONT_CSV")]
        fronts: Vec<PathBuf>,
    },
    /// Generate synthetic scenario files, one per seed.
    SynthScenario,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("rsu: could not configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rsu: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let mut run_config = config::load_config(cli.config.as_deref(), &cli.overrides)
        .map_err(CmdError::Config)?;
    if !cli.seeds.is_empty() {
        run_config.seeds = cli.seeds.clone();
    }
    let out_dir = cli
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(&run_config.output_dir));

    match &cli.command {
        Command::Optimize => commands::optimize::cmd_optimize(&run_config, &out_dir),
        Command::CompareOffloading => {
            commands::compare::cmd_compare_offloading(&run_config, &out_dir)
        }
        Command::ReportMetrics { fronts } => {
            commands::report::cmd_report_metrics(fronts, &out_dir)
        }
        Command::SynthScenario => commands::synth::cmd_synth_scenario(&run_config, &out_dir),
    }
}
