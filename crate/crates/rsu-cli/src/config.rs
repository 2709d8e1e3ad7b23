//! Run configuration: a TOML file (or a JSON manifest from a previous run)
//! with sections for every subsystem, plus dotted-path command-line
//! overrides.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use rsu_core::evolver::EvolverConfig;
use rsu_core::offloading::{OffloadConfig, Strategy};
use rsu_core::radio::{LinkBudgetParams, QueueParams};
use rsu_core::scenario::SynthSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Scenario file consumed by `optimize` and `compare-offloading`.
    pub scenario: String,
    pub output_dir: String,
    pub seeds: Vec<u64>,
    pub evolver: EvolverConfig,
    pub radio: LinkBudgetParams,
    pub queue: QueueParams,
    pub offload: OffloadConfig,
    pub compare: CompareConfig,
    pub synth: SynthSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: String::new(),
            output_dir: "out".into(),
            seeds: vec![1],
            evolver: EvolverConfig::default(),
            radio: LinkBudgetParams::default(),
            queue: QueueParams::default(),
            offload: OffloadConfig::default(),
            compare: CompareConfig::default(),
            synth: SynthSpec::default(),
        }
    }
}

/// Section backing `compare-offloading`: a fixed deployment (JSON list of
/// cell indices) and the strategies to race.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareConfig {
    pub deployment: String,
    pub strategies: Vec<Strategy>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            deployment: String::new(),
            strategies: vec![
                Strategy::Ibrsg,
                Strategy::Mindis,
                Strategy::Minpl,
                Strategy::Random,
            ],
        }
    }
}

/// Loads a config file, defaulting every missing key, and applies `--set`
/// overrides. `.json` files are parsed as manifests, anything else as TOML.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut value = match path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            if path.extension().is_some_and(|e| e == "json") {
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing manifest {}", path.display()))?
            } else {
                let table: toml::Table = text
                    .parse()
                    .with_context(|| format!("parsing config {}", path.display()))?;
                serde_json::to_value(table).context("converting config")?
            }
        }
        None => serde_json::to_value(RunConfig::default())?,
    };

    for entry in overrides {
        apply_override(&mut value, entry)?;
    }
    let config: RunConfig =
        serde_json::from_value(value).context("config does not match the expected schema")?;
    Ok(config)
}

/// Applies one `section.key=value` override. Values parse as JSON when
/// possible (numbers, booleans, arrays, quoted strings) and fall back to
/// plain strings.
fn apply_override(root: &mut serde_json::Value, entry: &str) -> Result<()> {
    let (path, raw) = entry
        .split_once('=')
        .ok_or_else(|| anyhow!("override '{entry}' is not KEY=VALUE"))?;
    let parsed: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));

    let mut cursor = root;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        bail!("override key '{path}' has an empty segment");
    }
    for segment in &segments[..segments.len() - 1] {
        cursor = cursor
            .as_object_mut()
            .ok_or_else(|| anyhow!("override key '{path}' does not address a table"))?
            .entry(segment.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    cursor
        .as_object_mut()
        .ok_or_else(|| anyhow!("override key '{path}' does not address a table"))?
        .insert(segments.last().unwrap().to_string(), parsed);
    Ok(())
}
