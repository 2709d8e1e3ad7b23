//! `optimize`: one evolver run per seed, emitting the front, telemetry and
//! deployment artifacts plus a manifest that reproduces the run.

use std::path::Path;

use anyhow::{anyhow, Context};

use rsu_core::evolver;
use rsu_core::scenario::load_scenario;

use crate::config::RunConfig;
use crate::csvio;

use super::{config_err, runtime_err, Artifacts, CmdResult};

pub fn cmd_optimize(config: &RunConfig, out_dir: &Path) -> CmdResult {
    config.evolver.validate().map_err(config_err)?;
    if config.seeds.is_empty() {
        return Err(config_err(anyhow!("no seeds configured")));
    }
    if config.scenario.is_empty() {
        return Err(config_err(anyhow!("config names no scenario file")));
    }
    let scenario = load_scenario(&config.scenario).map_err(config_err)?;

    let mut artifacts = Artifacts::new(out_dir).map_err(runtime_err)?;
    let result = run_all(config, &scenario, &mut artifacts, out_dir);
    if result.is_err() {
        artifacts.discard();
    }
    result
}

fn run_all(
    config: &RunConfig,
    scenario: &rsu_core::scenario::GridScenario,
    artifacts: &mut Artifacts,
    out_dir: &Path,
) -> CmdResult {
    // The manifest is the fully resolved configuration; re-running from it
    // reproduces every artifact byte for byte.
    let mut resolved = config.clone();
    resolved.output_dir = out_dir.display().to_string();
    let manifest =
        serde_json::to_string_pretty(&resolved).context("serializing manifest").map_err(runtime_err)?;
    artifacts
        .write("run_manifest.json", &manifest)
        .map_err(runtime_err)?;

    let algorithm = config.evolver.variant_label();
    for &seed in &config.seeds {
        let evolver_config = evolver::EvolverConfig {
            master_seed: seed,
            ..config.evolver.clone()
        };
        let result = evolver::run(
            &evolver_config,
            scenario,
            &config.radio,
            &config.queue,
            &config.offload,
        )
        .map_err(runtime_err)?;

        artifacts
            .write(
                &format!("front_{seed}.csv"),
                &csvio::front_csv(&result.pareto, algorithm, seed),
            )
            .map_err(runtime_err)?;
        artifacts
            .write(
                &format!("telemetry_{seed}.csv"),
                &csvio::telemetry_csv(&result.telemetry),
            )
            .map_err(runtime_err)?;
        let deployments: Vec<Vec<usize>> = result
            .pareto
            .iter()
            .map(|p| p.genome.deployed_cells())
            .collect();
        let deployments_json = serde_json::to_string_pretty(&deployments)
            .context("serializing deployments")
            .map_err(runtime_err)?;
        artifacts
            .write(&format!("deployments_{seed}.json"), &deployments_json)
            .map_err(runtime_err)?;
    }
    Ok(())
}
