//! End-to-end checks of the `rsu` binary: artifact layout, exit codes,
//! overrides and reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rsu_core::scenario::{save_scenario, synth_scenario, SynthSpec};

fn rsu(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsu"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn tiny_scenario(dir: &Path) -> PathBuf {
    let spec = SynthSpec {
        width: 8,
        height: 8,
        vehicles: 6,
        periods: 2,
        obstacle_blocks: 1,
        sensitive_areas: 1,
        ..SynthSpec::default()
    };
    let scenario = synth_scenario(5, &spec).unwrap();
    let path = dir.join("scenario.json");
    save_scenario(&scenario, &path).unwrap();
    path
}

fn tiny_config(dir: &Path) -> PathBuf {
    tiny_scenario(dir);
    let path = dir.join("run.toml");
    fs::write(
        &path,
        r#"
scenario = "scenario.json"
output_dir = "out"
seeds = [1]

[evolver]
population = 12
islands = 3
generations = 2
theta = 3
init_density = 5.0
reference_point_divisions = 4
"#,
    )
    .unwrap();
    path
}

#[test]
fn optimize_emits_four_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    tiny_config(dir.path());
    let out = rsu(&["optimize", "--config", "run.toml"], dir.path());
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "run_manifest.json",
        "front_1.csv",
        "telemetry_1.csv",
        "deployments_1.json",
    ] {
        assert!(dir.path().join("out").join(name).exists(), "missing {name}");
    }
    let front = fs::read_to_string(dir.path().join("out/front_1.csv")).unwrap();
    assert!(front.starts_with("f1_s,f2_s,f3,"));
    let telemetry = fs::read_to_string(dir.path().join("out/telemetry_1.csv")).unwrap();
    // Initial rows plus one row per island per generation.
    assert_eq!(telemetry.lines().count(), 1 + 3 * 3);
}

#[test]
fn optimize_missing_scenario_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "scenario = \"nope.json\"\noutput_dir = \"out\"\n").unwrap();
    let out = rsu(&["optimize", "--config", "run.toml"], dir.path());
    assert_eq!(exit_code(&out), 2);
    let out_dir = dir.path().join("out");
    if out_dir.exists() {
        assert_eq!(fs::read_dir(&out_dir).unwrap().count(), 0);
    }
}

#[test]
fn set_override_flips_variant_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    tiny_config(dir.path());
    let out = rsu(
        &[
            "optimize",
            "--config",
            "run.toml",
            "--set",
            "evolver.calibrate=false",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/run_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["evolver"]["calibrate"], serde_json::json!(false));
    let front = fs::read_to_string(dir.path().join("out/front_1.csv")).unwrap();
    for line in front.lines().skip(1) {
        assert!(line.contains("am-nsga3,"), "row not labeled am-nsga3: {line}");
    }
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    tiny_config(dir.path());
    let first = rsu(&["optimize", "--config", "run.toml"], dir.path());
    assert_eq!(exit_code(&first), 0);
    let second = rsu(
        &[
            "optimize",
            "--config",
            "out/run_manifest.json",
            "--output",
            "out2",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&second), 0, "stderr: {}", String::from_utf8_lossy(&second.stderr));
    for name in ["front_1.csv", "telemetry_1.csv", "deployments_1.json"] {
        let a = fs::read(dir.path().join("out").join(name)).unwrap();
        let b = fs::read(dir.path().join("out2").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn compare_offloading_emits_one_row_per_strategy() {
    let dir = tempfile::tempdir().unwrap();
    // Obstacle-free world so mindis and minpl must agree; large enough that
    // wall-time differences dominate scheduler noise.
    let spec = SynthSpec {
        width: 12,
        height: 12,
        vehicles: 200,
        periods: 4,
        obstacle_blocks: 0,
        sensitive_areas: 1,
        ..SynthSpec::default()
    };
    let scenario = synth_scenario(9, &spec).unwrap();
    save_scenario(&scenario, dir.path().join("scenario.json")).unwrap();
    fs::write(
        dir.path().join("cells.json"),
        serde_json::to_string(&vec![0usize, 13, 30, 57, 66, 77, 98, 104, 121, 133, 140]).unwrap(),
    )
    .unwrap();
    fs::write(
        dir.path().join("run.toml"),
        r#"
scenario = "scenario.json"
output_dir = "out"

[compare]
deployment = "cells.json"
strategies = ["ibrsg", "mindis", "minpl", "random"]
"#,
    )
    .unwrap();
    let out = rsu(&["compare-offloading", "--config", "run.toml"], dir.path());
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/offload_compare.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5); // header + 4 strategies
    assert_eq!(lines[0], "strategy,total_delay_s,load_balance,wall_time_s,sweeps");

    let row = |name: &str| -> Vec<f64> {
        lines
            .iter()
            .find(|l| l.starts_with(&format!("{name},")))
            .unwrap_or_else(|| panic!("missing row {name}"))
            .split(',')
            .skip(1)
            .map(|v| v.parse().unwrap())
            .collect()
    };
    // No obstacles: nearest and strongest-signal pick identical targets.
    assert_eq!(row("mindis")[0], row("minpl")[0]);
    // IBRSG optimizes total delay, so it is never worse than the naive rows.
    assert!(row("ibrsg")[0] <= row("mindis")[0] + 1e-9);
    assert!(row("ibrsg")[3] >= 1.0); // sweeps recorded
    // Random does a strict subset of IBRSG's work, so its overhead row is
    // smaller; the full wall-time ordering is left to the CSV (one-shot
    // timings between the cheap strategies sit inside scheduler noise).
    assert!(row("random")[2] <= row("ibrsg")[2]);
}

#[test]
fn compare_offloading_rejects_bad_deployment() {
    let dir = tempfile::tempdir().unwrap();
    tiny_scenario(dir.path());
    fs::write(dir.path().join("cells.json"), "[9999]").unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "scenario = \"scenario.json\"\noutput_dir = \"out\"\n[compare]\ndeployment = \"cells.json\"\n",
    )
    .unwrap();
    let out = rsu(&["compare-offloading", "--config", "run.toml"], dir.path());
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn report_metrics_merges_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    // Algorithm "good" dominates algorithm "bad" everywhere.
    fs::write(
        dir.path().join("good.csv"),
        "f1_s,f2_s,f3,viol_obstacle_m,viol_spacing_m,phi,algorithm,seed\n\
         10,1,5,0,0,0,good,1\n\
         12,0.5,4,0,0,0,good,1\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("bad.csv"),
        "f1_s,f2_s,f3,viol_obstacle_m,viol_spacing_m,phi,algorithm,seed\n\
         20,2,6,0,0,0,bad,1\n\
         18,3,7,0,1,1,bad,1\n",
    )
    .unwrap();
    let args = [
        "report-metrics",
        "good.csv",
        "bad.csv",
        "--output",
        "report",
    ];
    let out = rsu(&args, dir.path());
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let metrics = fs::read_to_string(dir.path().join("report/metrics.csv")).unwrap();
    assert!(metrics.lines().any(|l| l.starts_with("good,2,2,")));
    assert!(metrics.lines().any(|l| l.starts_with("bad,2,1,")));

    let merged = fs::read_to_string(dir.path().join("report/merged_front.csv")).unwrap();
    // Only the dominating algorithm survives the merge.
    assert_eq!(merged.lines().count(), 3);
    assert!(merged.lines().skip(1).all(|l| l.starts_with("good,")));

    // Byte-identical re-run.
    let again = rsu(
        &["report-metrics", "good.csv", "bad.csv", "--output", "report2"],
        dir.path(),
    );
    assert_eq!(exit_code(&again), 0);
    for name in ["metrics.csv", "merged_front.csv"] {
        assert_eq!(
            fs::read(dir.path().join("report").join(name)).unwrap(),
            fs::read(dir.path().join("report2").join(name)).unwrap()
        );
    }
}

#[test]
fn report_metrics_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("broken.csv"), "not,a,front\n1,2,3\n").unwrap();
    let out = rsu(
        &["report-metrics", "broken.csv", "--output", "report"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn synth_scenario_writes_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = rsu(
        &[
            "synth-scenario",
            "--seed",
            "3",
            "--seed",
            "4",
            "--output",
            "scenarios",
            "--set",
            "synth.vehicles=10",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for seed in [3, 4] {
        let path = dir.path().join("scenarios").join(format!("scenario_{seed}.json"));
        let scenario = rsu_core::scenario::load_scenario(&path).unwrap();
        assert_eq!(scenario.num_vehicles(), 10);
    }
}
