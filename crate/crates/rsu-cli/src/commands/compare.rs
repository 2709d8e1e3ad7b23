//! `compare-offloading`: races the offloading strategies on one fixed
//! deployment and reports delay, load balance, wall time and sweep counts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};

use rsu_core::objectives::Deployment;
use rsu_core::offloading::{self, OffloadConfig};
use rsu_core::scenario::load_scenario;

use super::{config_err, runtime_err, Artifacts, CmdResult};
use crate::config::RunConfig;

pub fn cmd_compare_offloading(config: &RunConfig, out_dir: &Path) -> CmdResult {
    if config.scenario.is_empty() {
        return Err(config_err(anyhow!("config names no scenario file")));
    }
    if config.compare.deployment.is_empty() {
        return Err(config_err(anyhow!("config names no deployment file")));
    }
    if config.compare.strategies.is_empty() {
        return Err(config_err(anyhow!("no strategies configured")));
    }
    let scenario = load_scenario(&config.scenario).map_err(config_err)?;

    let text = fs::read_to_string(&config.compare.deployment)
        .with_context(|| format!("reading deployment {}", config.compare.deployment))
        .map_err(config_err)?;
    let cells: Vec<usize> = serde_json::from_str(&text)
        .with_context(|| format!("parsing deployment {}", config.compare.deployment))
        .map_err(config_err)?;
    let deployment = Deployment::from_cells(scenario.num_cells(), &cells).map_err(config_err)?;
    let num_rsus = deployment.rsu_count();
    if num_rsus == 0 {
        return Err(config_err(anyhow!("deployment file lists no RSUs")));
    }

    let mut csv = String::from("strategy,total_delay_s,load_balance,wall_time_s,sweeps\n");
    for &strategy in &config.compare.strategies {
        let cfg = OffloadConfig {
            strategy,
            ..config.offload.clone()
        };
        let start = Instant::now();
        let (assignment, stats) =
            offloading::assign(&scenario, &deployment, &config.radio, &config.queue, &cfg);
        let wall = start.elapsed().as_secs_f64();
        let total =
            offloading::total_assignment_delay(&scenario, &assignment, &config.radio, &config.queue);
        let balance = offloading::load_balance(&assignment, num_rsus).map_err(config_err)?;
        writeln!(
            csv,
            "{},{},{},{},{}",
            strategy.name(),
            total,
            balance,
            wall,
            stats.sweeps
        )
        .unwrap();
    }

    let mut artifacts = Artifacts::new(out_dir).map_err(runtime_err)?;
    artifacts
        .write("offload_compare.csv", &csv)
        .map_err(runtime_err)?;
    Ok(())
}
