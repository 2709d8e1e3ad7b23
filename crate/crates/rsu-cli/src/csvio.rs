//! CSV emission and parsing for result artifacts. Headers first, UTF-8,
//! '.' decimal separator; floats use Rust's shortest round-trip formatting
//! so equal runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

use rsu_core::evolver::{Individual, TelemetryRow};

pub const FRONT_HEADER: &str = "f1_s,f2_s,f3,viol_obstacle_m,viol_spacing_m,phi,algorithm,seed";
pub const TELEMETRY_HEADER: &str = "generation,island,epsilon,rho,crossover_rate,mutation_rate,\
feasible_count,best_f1,best_f2,best_f3,hypervolume";

pub fn front_csv(pareto: &[Individual], algorithm: &str, seed: u64) -> String {
    let mut out = String::from(FRONT_HEADER);
    out.push('\n');
    for p in pareto {
        writeln!(
            out,
            "{},{},{},{},{},{},{algorithm},{seed}",
            p.objectives.f1_total_delay_s,
            p.objectives.f2_max_sensitive_delay_s,
            p.objectives.f3_rsu_count,
            p.violation.obstacle_violation_m,
            p.violation.spacing_violation_m,
            p.violation.phi,
        )
        .unwrap();
    }
    out
}

pub fn telemetry_csv(rows: &[TelemetryRow]) -> String {
    let mut out = String::from(TELEMETRY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.generation,
            r.island,
            r.epsilon,
            r.rho,
            r.crossover_rate,
            r.mutation_rate,
            r.feasible_count,
            r.best_f1,
            r.best_f2,
            r.best_f3,
            r.hypervolume,
        )
        .unwrap();
    }
    out
}

/// One parsed row of a front CSV.
#[derive(Debug, Clone)]
pub struct FrontRow {
    pub f: [f64; 3],
    pub phi: f64,
    pub algorithm: String,
    /// Parsed to validate the schema; reporting does not consume it.
    #[allow(dead_code)]
    pub seed: u64,
}

/// Reads a front CSV, addressing columns by header name; extra columns are
/// ignored.
pub fn read_front_csv(path: &Path) -> Result<Vec<FrontRow>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading front CSV {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("{}: empty front CSV", path.display()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| anyhow!("{}: missing column '{name}'", path.display()))
    };
    let (c_f1, c_f2, c_f3) = (find("f1_s")?, find("f2_s")?, find("f3")?);
    let c_phi = find("phi")?;
    let c_algo = find("algorithm")?;
    let c_seed = find("seed")?;

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |c: usize| {
            fields
                .get(c)
                .ok_or_else(|| anyhow!("{}: line {} too short", path.display(), lineno + 2))
        };
        let num = |c: usize| -> Result<f64> {
            get(c)?
                .parse()
                .with_context(|| format!("{}: line {} bad number", path.display(), lineno + 2))
        };
        rows.push(FrontRow {
            f: [num(c_f1)?, num(c_f2)?, num(c_f3)?],
            phi: num(c_phi)?,
            algorithm: get(c_algo)?.to_string(),
            seed: num(c_seed)? as u64,
        });
    }
    Ok(rows)
}
