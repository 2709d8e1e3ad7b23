//! `report-metrics`: merges one or more front CSVs into the cross-algorithm
//! Pareto table and scores every algorithm with NPS/NFS, IGD, hypervolume
//! and spacing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::anyhow;

use rsu_core::metrics::{
    self, count_nps_nfs, merge_pareto, normalize_by_extremes, Front, HV_REF_POINT,
};
use rsu_core::objectives::ObjectiveVector;

use super::{config_err, runtime_err, Artifacts, CmdResult};
use crate::csvio::{read_front_csv, FrontRow};

pub fn cmd_report_metrics(front_paths: &[PathBuf], out_dir: &Path) -> CmdResult {
    if front_paths.is_empty() {
        return Err(config_err(anyhow!("no front CSV files given")));
    }
    let mut rows: Vec<FrontRow> = Vec::new();
    for path in front_paths {
        rows.extend(read_front_csv(path).map_err(config_err)?);
    }

    // Group rows per algorithm, keeping a deterministic order.
    let mut by_algorithm: BTreeMap<String, Front> = BTreeMap::new();
    for row in &rows {
        by_algorithm
            .entry(row.algorithm.clone())
            .or_default()
            .push(to_objectives(row), row.phi == 0.0, row.algorithm.clone());
    }

    let fronts: Vec<Front> = by_algorithm.values().cloned().collect();
    let merged = merge_pareto(&fronts);
    let reference = merged.as_arrays();

    let mut metrics_csv = String::from("algorithm,nps,nfs,igd,hv,s_metric\n");
    for (algorithm, front) in &by_algorithm {
        let (nps, nfs) = count_nps_nfs(front);
        let nd = nondominated_arrays(front);
        let (igd, hv, s_metric) = if reference.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let normalized = normalize_by_extremes(&nd, &reference);
            let igd = metrics::igd(&nd, &reference).map_err(runtime_err)?;
            let hv = metrics::hypervolume(&normalized, HV_REF_POINT);
            let s = metrics::spacing(&normalized).unwrap_or(f64::NAN);
            (igd, hv, s)
        };
        writeln!(metrics_csv, "{algorithm},{nps},{nfs},{igd},{hv},{s_metric}").unwrap();
    }

    let mut merged_csv = String::from("algorithm,f1_s,f2_s,f3\n");
    let mut merged_rows: Vec<(String, [f64; 3])> = merged
        .labels
        .iter()
        .cloned()
        .zip(merged.as_arrays())
        .collect();
    merged_rows.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    for (algorithm, f) in merged_rows {
        writeln!(merged_csv, "{algorithm},{},{},{}", f[0], f[1], f[2]).unwrap();
    }

    let mut artifacts = Artifacts::new(out_dir).map_err(runtime_err)?;
    let result = artifacts
        .write("metrics.csv", &metrics_csv)
        .and_then(|_| artifacts.write("merged_front.csv", &merged_csv));
    if let Err(e) = result {
        artifacts.discard();
        return Err(runtime_err(e));
    }
    Ok(())
}

fn to_objectives(row: &FrontRow) -> ObjectiveVector {
    ObjectiveVector {
        f1_total_delay_s: row.f[0],
        f2_max_sensitive_delay_s: row.f[1],
        f3_rsu_count: row.f[2] as u32,
    }
}

/// The algorithm's non-dominated subset (feasible or not), deduplicated.
fn nondominated_arrays(front: &Front) -> Vec<[f64; 3]> {
    let mut unique: Vec<ObjectiveVector> = Vec::new();
    for p in &front.points {
        if !unique.iter().any(|q| q.as_array() == p.as_array()) {
            unique.push(*p);
        }
    }
    metrics::nondominated_indices(&unique)
        .into_iter()
        .map(|i| unique[i].as_array())
        .collect()
}
