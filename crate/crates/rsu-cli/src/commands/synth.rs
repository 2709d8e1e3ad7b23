//! `synth-scenario`: deterministic synthetic scenario files, one per seed.

use std::path::Path;

use anyhow::anyhow;

use rsu_core::scenario::{scenario_to_json, synth_scenario};

use super::{config_err, runtime_err, Artifacts, CmdResult};
use crate::config::RunConfig;

pub fn cmd_synth_scenario(config: &RunConfig, out_dir: &Path) -> CmdResult {
    if config.seeds.is_empty() {
        return Err(config_err(anyhow!("no seeds configured")));
    }
    let mut artifacts = Artifacts::new(out_dir).map_err(runtime_err)?;
    for &seed in &config.seeds {
        let scenario = synth_scenario(seed, &config.synth).map_err(config_err)?;
        if let Err(e) = artifacts.write(
            &format!("scenario_{seed}.json"),
            &scenario_to_json(&scenario),
        ) {
            artifacts.discard();
            return Err(runtime_err(e));
        }
    }
    Ok(())
}
