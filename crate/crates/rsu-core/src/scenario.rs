//! Gridded urban scenario: the map raster, obstacle mask, vehicle traces and
//! latency-sensitive areas, plus the geometry queries everything else builds
//! on.
//!
//! The map is a `width x height` raster of square cells; cell `i` sits at row
//! `i / width`, column `i % width`. Vehicle positions snap to cell centers so
//! every distance in the system is measured between cell centers.

use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, domain};

/// One vehicle's per-period position; `None` marks a period in which the
/// vehicle is absent (contributes no delay and no queue arrivals).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleTrace {
    pub vehicle_id: String,
    pub positions: Vec<Option<usize>>,
}

/// A disc on the map in which the worst per-vehicle cumulative delay is
/// tracked as its own objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitiveArea {
    pub center_x_m: f64,
    pub center_y_m: f64,
    pub radius_m: f64,
}

/// Immutable world description. Constructed once, then shared read-only by
/// any number of concurrent workers.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScenario {
    pub width_cells: usize,
    pub height_cells: usize,
    pub cell_size_m: f64,
    /// `true` where an obstacle occupies the cell; length is exactly `K`.
    pub obstacle_mask: Vec<bool>,
    pub traces: Vec<VehicleTrace>,
    pub sensitive_areas: Vec<SensitiveArea>,
    pub period_length_s: f64,
    pub num_periods: usize,
    pub coverage_radius_m: f64,
    /// Per vehicle: does any of its present positions fall inside a sensitive
    /// area? Derived from the fields above at construction time.
    sensitive_vehicles: Vec<bool>,
}

pub const DEFAULT_PERIOD_LENGTH_S: f64 = 30.0;
pub const DEFAULT_COVERAGE_RADIUS_M: f64 = 300.0;
pub const DEFAULT_SENSITIVE_RADIUS_M: f64 = 20.0;

impl GridScenario {
    /// Validates every invariant and precomputes the sensitive-vehicle flags.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        width_cells: usize,
        height_cells: usize,
        cell_size_m: f64,
        obstacle_mask: Vec<bool>,
        traces: Vec<VehicleTrace>,
        sensitive_areas: Vec<SensitiveArea>,
        period_length_s: f64,
        num_periods: usize,
        coverage_radius_m: f64,
    ) -> Result<Self> {
        if width_cells == 0 || height_cells == 0 {
            return Err(Error::Validation("grid dimensions must be positive".into()));
        }
        if !(cell_size_m > 0.0) {
            return Err(Error::Validation(format!(
                "cell_size_m must be positive, got {cell_size_m}"
            )));
        }
        if !(coverage_radius_m > 0.0) {
            return Err(Error::Validation(format!(
                "coverage_radius_m must be positive, got {coverage_radius_m}"
            )));
        }
        if !(period_length_s > 0.0) {
            return Err(Error::Validation(format!(
                "period_length_s must be positive, got {period_length_s}"
            )));
        }
        if num_periods == 0 {
            return Err(Error::Validation("num_periods must be at least 1".into()));
        }
        let k = width_cells * height_cells;
        if obstacle_mask.len() != k {
            return Err(Error::Validation(format!(
                "obstacle mask has {} entries, expected K = {k}",
                obstacle_mask.len()
            )));
        }
        for trace in &traces {
            if trace.positions.len() != num_periods {
                return Err(Error::Validation(format!(
                    "trace {} has {} positions, expected {num_periods}",
                    trace.vehicle_id,
                    trace.positions.len()
                )));
            }
            for pos in trace.positions.iter().flatten() {
                if *pos >= k {
                    return Err(Error::Validation(format!(
                        "trace {} references cell {pos}, grid has K = {k}",
                        trace.vehicle_id
                    )));
                }
            }
        }
        let extent_x = width_cells as f64 * cell_size_m;
        let extent_y = height_cells as f64 * cell_size_m;
        for area in &sensitive_areas {
            if !(area.radius_m > 0.0) {
                return Err(Error::Validation(format!(
                    "sensitive area radius must be positive, got {}",
                    area.radius_m
                )));
            }
            if area.center_x_m < 0.0
                || area.center_x_m > extent_x
                || area.center_y_m < 0.0
                || area.center_y_m > extent_y
            {
                return Err(Error::Validation(format!(
                    "sensitive area center ({}, {}) outside map extent {extent_x} x {extent_y}",
                    area.center_x_m, area.center_y_m
                )));
            }
        }

        let mut scenario = GridScenario {
            width_cells,
            height_cells,
            cell_size_m,
            obstacle_mask,
            traces,
            sensitive_areas,
            period_length_s,
            num_periods,
            coverage_radius_m,
            sensitive_vehicles: Vec::new(),
        };
        scenario.sensitive_vehicles = scenario.compute_sensitive_vehicles();
        Ok(scenario)
    }

    /// Number of potential RSU positions (= genome length).
    pub fn num_cells(&self) -> usize {
        self.width_cells * self.height_cells
    }

    pub fn num_vehicles(&self) -> usize {
        self.traces.len()
    }

    pub fn is_obstacle(&self, idx: usize) -> bool {
        self.obstacle_mask[idx]
    }

    /// Per-vehicle flag: enters a sensitive area in at least one period.
    pub fn sensitive_vehicles(&self) -> &[bool] {
        &self.sensitive_vehicles
    }

    fn compute_sensitive_vehicles(&self) -> Vec<bool> {
        self.traces
            .iter()
            .map(|trace| {
                trace.positions.iter().flatten().any(|&pos| {
                    let (x, y) = self.center(pos);
                    self.sensitive_areas.iter().any(|area| {
                        let dx = x - area.center_x_m;
                        let dy = y - area.center_y_m;
                        (dx * dx + dy * dy).sqrt() <= area.radius_m
                    })
                })
            })
            .collect()
    }

    /// Unchecked cell center; callers guarantee `idx < K`.
    #[inline]
    pub(crate) fn center(&self, idx: usize) -> (f64, f64) {
        debug_assert!(idx < self.num_cells());
        let col = idx % self.width_cells;
        let row = idx / self.width_cells;
        (
            (col as f64 + 0.5) * self.cell_size_m,
            (row as f64 + 0.5) * self.cell_size_m,
        )
    }

    /// Unchecked Euclidean distance between cell centers.
    #[inline]
    pub(crate) fn dist(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.center(a);
        let (bx, by) = self.center(b);
        ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
    }

    /// Center of cell `idx` in map coordinates.
    pub fn cell_center(&self, idx: usize) -> Result<(f64, f64)> {
        self.check_cell(idx)?;
        Ok(self.center(idx))
    }

    /// Euclidean distance between the centers of cells `a` and `b`.
    pub fn distance_m(&self, a: usize, b: usize) -> Result<f64> {
        self.check_cell(a)?;
        self.check_cell(b)?;
        Ok(self.dist(a, b))
    }

    /// Number of (vehicle, period) presences within `radius_m` of the center
    /// of cell `idx`, summed over all periods.
    pub fn traffic_volume(&self, idx: usize, radius_m: f64) -> Result<usize> {
        self.check_cell(idx)?;
        if !(radius_m > 0.0) {
            return Err(Error::Validation(format!(
                "traffic_volume radius must be positive, got {radius_m}"
            )));
        }
        let count = self
            .traces
            .iter()
            .flat_map(|t| t.positions.iter().flatten())
            .filter(|&&pos| self.dist(idx, pos) <= radius_m)
            .count();
        Ok(count)
    }

    fn check_cell(&self, idx: usize) -> Result<()> {
        if idx >= self.num_cells() {
            return Err(Error::Validation(format!(
                "cell index {idx} out of range, K = {}",
                self.num_cells()
            )));
        }
        Ok(())
    }

    /// True when at least one obstacle cell lies strictly between the centers
    /// of `a` and `b` (the endpoint cells themselves do not count). A cell
    /// counts only if the segment crosses its interior; grazing a corner does
    /// not.
    pub fn obstacle_between(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        let (ax, ay) = self.center(a);
        let (bx, by) = self.center(b);
        let cell = self.cell_size_m;

        // Parameter values where the segment crosses grid lines.
        let mut ts: Vec<f64> = vec![0.0, 1.0];
        let (dx, dy) = (bx - ax, by - ay);
        if dx.abs() > 0.0 {
            let (lo, hi) = if ax < bx { (ax, bx) } else { (bx, ax) };
            let mut k = (lo / cell).ceil() as i64;
            while (k as f64) * cell < hi {
                let x = k as f64 * cell;
                if x > lo {
                    ts.push((x - ax) / dx);
                }
                k += 1;
            }
        }
        if dy.abs() > 0.0 {
            let (lo, hi) = if ay < by { (ay, by) } else { (by, ay) };
            let mut k = (lo / cell).ceil() as i64;
            while (k as f64) * cell < hi {
                let y = k as f64 * cell;
                if y > lo {
                    ts.push((y - ay) / dy);
                }
                k += 1;
            }
        }
        ts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        ts.dedup_by(|p, q| (*p - *q).abs() < 1e-12);

        // Midpoint of each interval lands strictly inside whichever cell the
        // segment crosses there.
        for pair in ts.windows(2) {
            let t = 0.5 * (pair[0] + pair[1]);
            let x = ax + t * dx;
            let y = ay + t * dy;
            let col = ((x / cell).floor() as isize).clamp(0, self.width_cells as isize - 1);
            let row = ((y / cell).floor() as isize).clamp(0, self.height_cells as isize - 1);
            let idx = row as usize * self.width_cells + col as usize;
            if idx != a && idx != b && self.obstacle_mask[idx] {
                return true;
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// Scenario file format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    grid: GridSection,
    #[serde(default)]
    obstacles: Vec<usize>,
    periods: PeriodsSection,
    coverage_radius_m: f64,
    #[serde(default)]
    sensitive_areas: Vec<AreaSection>,
    #[serde(default)]
    traces: Vec<TraceSection>,
}

#[derive(Serialize, Deserialize)]
struct GridSection {
    width: usize,
    height: usize,
    cell_size_m: f64,
}

#[derive(Serialize, Deserialize)]
struct PeriodsSection {
    count: usize,
    length_s: f64,
}

#[derive(Serialize, Deserialize)]
struct AreaSection {
    x_m: f64,
    y_m: f64,
    radius_m: f64,
}

#[derive(Serialize, Deserialize)]
struct TraceSection {
    id: String,
    positions: Vec<Option<usize>>,
}

/// Parses and validates a scenario file (see the README for the schema).
pub fn load_scenario(path: impl AsRef<Path>) -> Result<GridScenario> {
    let text = fs::read_to_string(path.as_ref())?;
    scenario_from_json(&text)
}

/// Same as [`load_scenario`] but from an in-memory JSON document.
pub fn scenario_from_json(text: &str) -> Result<GridScenario> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    let k = file.grid.width.checked_mul(file.grid.height).unwrap_or(0);
    let mut mask = vec![false; k];
    for idx in &file.obstacles {
        if *idx >= k {
            return Err(Error::Validation(format!(
                "obstacle cell index {idx} out of range, K = {k}"
            )));
        }
        mask[*idx] = true;
    }
    GridScenario::new(
        file.grid.width,
        file.grid.height,
        file.grid.cell_size_m,
        mask,
        file.traces
            .into_iter()
            .map(|t| VehicleTrace {
                vehicle_id: t.id,
                positions: t.positions,
            })
            .collect(),
        file.sensitive_areas
            .into_iter()
            .map(|a| SensitiveArea {
                center_x_m: a.x_m,
                center_y_m: a.y_m,
                radius_m: a.radius_m,
            })
            .collect(),
        file.periods.length_s,
        file.periods.count,
        file.coverage_radius_m,
    )
}

/// Serializes a scenario back to the file schema (stable field order, so
/// equal scenarios produce byte-identical documents).
pub fn scenario_to_json(scenario: &GridScenario) -> String {
    let file = ScenarioFile {
        grid: GridSection {
            width: scenario.width_cells,
            height: scenario.height_cells,
            cell_size_m: scenario.cell_size_m,
        },
        obstacles: (0..scenario.num_cells())
            .filter(|&i| scenario.obstacle_mask[i])
            .collect(),
        periods: PeriodsSection {
            count: scenario.num_periods,
            length_s: scenario.period_length_s,
        },
        coverage_radius_m: scenario.coverage_radius_m,
        sensitive_areas: scenario
            .sensitive_areas
            .iter()
            .map(|a| AreaSection {
                x_m: a.center_x_m,
                y_m: a.center_y_m,
                radius_m: a.radius_m,
            })
            .collect(),
        traces: scenario
            .traces
            .iter()
            .map(|t| TraceSection {
                id: t.vehicle_id.clone(),
                positions: t.positions.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("scenario serialization cannot fail")
}

pub fn save_scenario(scenario: &GridScenario, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), scenario_to_json(scenario))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Synthetic scenarios
// ---------------------------------------------------------------------------

/// Parameters for the synthetic scenario generator, a desk-scale stand-in for
/// real trace data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub cell_size_m: f64,
    /// Rectangular obstacle blocks dropped at random positions.
    pub obstacle_blocks: usize,
    pub block_width: usize,
    pub block_height: usize,
    pub vehicles: usize,
    pub periods: usize,
    pub period_length_s: f64,
    pub coverage_radius_m: f64,
    /// Probability that a vehicle keeps its current heading each period;
    /// higher values produce straighter, road-like traces.
    pub move_bias: f64,
    pub sensitive_areas: usize,
    pub sensitive_radius_m: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            width: 20,
            height: 20,
            cell_size_m: 20.0,
            obstacle_blocks: 4,
            block_width: 3,
            block_height: 3,
            vehicles: 60,
            periods: 4,
            period_length_s: DEFAULT_PERIOD_LENGTH_S,
            coverage_radius_m: DEFAULT_COVERAGE_RADIUS_M,
            move_bias: 0.7,
            sensitive_areas: 2,
            sensitive_radius_m: DEFAULT_SENSITIVE_RADIUS_M,
        }
    }
}

const HEADINGS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Deterministically generates a scenario from `seed`: random obstacle
/// blocks, random-walk vehicle traces biased toward straight movement, and
/// sensitive areas centered on free cells. Vehicles never occupy obstacle
/// cells.
pub fn synth_scenario(seed: u64, spec: &SynthSpec) -> Result<GridScenario> {
    let mut rng = rng::stream(&[domain::SYNTH, seed]);
    let (w, h) = (spec.width, spec.height);
    if w == 0 || h == 0 {
        return Err(Error::Validation("grid dimensions must be positive".into()));
    }
    let k = w * h;

    let mut mask = vec![false; k];
    for _ in 0..spec.obstacle_blocks {
        let bw = spec.block_width.min(w);
        let bh = spec.block_height.min(h);
        let col0 = rng.random_range(0..=(w - bw));
        let row0 = rng.random_range(0..=(h - bh));
        for row in row0..row0 + bh {
            for col in col0..col0 + bw {
                mask[row * w + col] = true;
            }
        }
    }
    let free: Vec<usize> = (0..k).filter(|&i| !mask[i]).collect();
    if free.is_empty() {
        return Err(Error::Validation(
            "infeasible synthetic spec: obstacles cover every cell".into(),
        ));
    }

    let mut traces = Vec::with_capacity(spec.vehicles);
    for v in 0..spec.vehicles {
        let mut pos = *free.choose(&mut rng).expect("free cells exist");
        let mut heading = HEADINGS[rng.random_range(0..HEADINGS.len())];
        let mut positions = Vec::with_capacity(spec.periods);
        positions.push(Some(pos));
        for _ in 1..spec.periods {
            let keep = rng.random::<f64>() < spec.move_bias;
            let next = step(pos, heading, w, h).filter(|&n| !mask[n]);
            pos = match (keep, next) {
                (true, Some(n)) => n,
                _ => {
                    // Re-roll the heading among feasible moves; stay put when
                    // boxed in.
                    let options: Vec<(usize, (isize, isize))> = HEADINGS
                        .iter()
                        .filter_map(|&dir| {
                            step(pos, dir, w, h)
                                .filter(|&n| !mask[n])
                                .map(|n| (n, dir))
                        })
                        .collect();
                    match options.choose(&mut rng) {
                        Some(&(n, dir)) => {
                            heading = dir;
                            n
                        }
                        None => pos,
                    }
                }
            };
            positions.push(Some(pos));
        }
        traces.push(VehicleTrace {
            vehicle_id: format!("v{v}"),
            positions,
        });
    }

    let mut areas = Vec::with_capacity(spec.sensitive_areas);
    for _ in 0..spec.sensitive_areas {
        let cell = *free.choose(&mut rng).expect("free cells exist");
        let col = cell % w;
        let row = cell / w;
        areas.push(SensitiveArea {
            center_x_m: (col as f64 + 0.5) * spec.cell_size_m,
            center_y_m: (row as f64 + 0.5) * spec.cell_size_m,
            radius_m: spec.sensitive_radius_m,
        });
    }

    GridScenario::new(
        w,
        h,
        spec.cell_size_m,
        mask,
        traces,
        areas,
        spec.period_length_s,
        spec.periods,
        spec.coverage_radius_m,
    )
}

fn step(pos: usize, dir: (isize, isize), w: usize, h: usize) -> Option<usize> {
    let col = (pos % w) as isize + dir.0;
    let row = (pos / w) as isize + dir.1;
    if col < 0 || row < 0 || col >= w as isize || row >= h as isize {
        None
    } else {
        Some(row as usize * w + col as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> &'static str {
        r#"{
            "grid": {"width": 2, "height": 2, "cell_size_m": 20.0},
            "obstacles": [],
            "periods": {"count": 2, "length_s": 30.0},
            "coverage_radius_m": 300.0,
            "sensitive_areas": [],
            "traces": [{"id": "v0", "positions": [0, 0]}]
        }"#
    }

    #[test]
    fn loads_minimal_scenario() {
        let s = scenario_from_json(minimal_json()).unwrap();
        assert_eq!(s.num_cells(), 4);
        assert_eq!(s.num_periods, 2);
        assert_eq!(s.num_vehicles(), 1);
    }

    #[test]
    fn rejects_out_of_range_obstacle() {
        let bad = minimal_json().replace("\"obstacles\": []", "\"obstacles\": [4]");
        match scenario_from_json(&bad) {
            Err(Error::Validation(msg)) => assert!(msg.contains("obstacle")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_trace_out_of_range() {
        let bad = minimal_json().replace("[0, 0]", "[0, 9]");
        assert!(matches!(scenario_from_json(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_wrong_trace_length() {
        let bad = minimal_json().replace("[0, 0]", "[0]");
        assert!(matches!(scenario_from_json(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn square_km_grid_has_2500_cells() {
        let s = GridScenario::new(
            50,
            50,
            20.0,
            vec![false; 2500],
            vec![],
            vec![],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        assert_eq!(s.num_cells(), 2500);
    }

    #[test]
    fn cell_center_examples() {
        let s = GridScenario::new(
            50,
            50,
            20.0,
            vec![false; 2500],
            vec![],
            vec![],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        assert_eq!(s.cell_center(0).unwrap(), (10.0, 10.0));
        assert_eq!(s.cell_center(51).unwrap(), (30.0, 30.0));
        assert!(s.cell_center(2500).is_err());
    }

    #[test]
    fn distance_examples() {
        let s = GridScenario::new(
            50,
            50,
            20.0,
            vec![false; 2500],
            vec![],
            vec![],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        assert_eq!(s.distance_m(7, 7).unwrap(), 0.0);
        assert_eq!(s.distance_m(0, 1).unwrap(), 20.0);
        let diag = s.distance_m(0, 51).unwrap();
        assert!((diag - 28.284).abs() < 1e-3, "diagonal {diag}");
    }

    #[test]
    fn distance_is_a_metric_on_small_grid() {
        let s = GridScenario::new(
            3,
            3,
            10.0,
            vec![false; 9],
            vec![],
            vec![],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        for a in 0..9 {
            for b in 0..9 {
                let dab = s.dist(a, b);
                assert_eq!(dab, s.dist(b, a));
                assert_eq!(dab == 0.0, a == b);
                for c in 0..9 {
                    assert!(dab <= s.dist(a, c) + s.dist(c, b) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn traffic_volume_counts_presences() {
        let s = GridScenario::new(
            4,
            4,
            20.0,
            vec![false; 16],
            vec![VehicleTrace {
                vehicle_id: "v0".into(),
                positions: vec![Some(5), Some(5), Some(5)],
            }],
            vec![],
            30.0,
            3,
            300.0,
        )
        .unwrap();
        assert_eq!(s.traffic_volume(5, 0.1).unwrap(), 3);
        // Vehicle 100 m away (5 cells), radius 50 m.
        assert_eq!(s.traffic_volume(0, 25.0).unwrap(), 0);
        let empty = GridScenario::new(
            4,
            4,
            20.0,
            vec![false; 16],
            vec![],
            vec![],
            30.0,
            3,
            300.0,
        )
        .unwrap();
        assert_eq!(empty.traffic_volume(5, 100.0).unwrap(), 0);
    }

    #[test]
    fn traffic_volume_monotone_in_radius() {
        let s = synth_scenario(3, &SynthSpec::default()).unwrap();
        let mut prev = 0;
        for r in [10.0, 40.0, 80.0, 200.0, 1000.0] {
            let v = s.traffic_volume(25, r).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn synth_shape_and_determinism() {
        let spec = SynthSpec {
            obstacle_blocks: 0,
            vehicles: 50,
            periods: 4,
            ..SynthSpec::default()
        };
        let a = synth_scenario(1, &spec).unwrap();
        assert_eq!(a.num_vehicles(), 50);
        assert!(a.traces.iter().all(|t| t.positions.len() == 4));

        let b = synth_scenario(1, &spec).unwrap();
        assert_eq!(scenario_to_json(&a), scenario_to_json(&b));

        let c = synth_scenario(2, &spec).unwrap();
        assert_ne!(scenario_to_json(&a), scenario_to_json(&c));
    }

    #[test]
    fn synth_avoids_obstacles() {
        let spec = SynthSpec {
            obstacle_blocks: 8,
            ..SynthSpec::default()
        };
        let s = synth_scenario(9, &spec).unwrap();
        assert!(s.obstacle_mask.iter().any(|&o| o));
        for t in &s.traces {
            for pos in t.positions.iter().flatten() {
                assert!(!s.is_obstacle(*pos));
            }
        }
    }

    #[test]
    fn save_load_round_trip() {
        let s = synth_scenario(11, &SynthSpec::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scn.json");
        save_scenario(&s, &path).unwrap();
        let loaded = load_scenario(&path).unwrap();
        assert_eq!(s, loaded);
    }

    #[test]
    fn obstacle_between_straight_and_clear() {
        // 5x1 row, obstacle in the middle cell.
        let s = GridScenario::new(
            5,
            1,
            20.0,
            vec![false, false, true, false, false],
            vec![],
            vec![],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        assert!(s.obstacle_between(0, 4));
        assert!(s.obstacle_between(4, 0));
        assert!(!s.obstacle_between(0, 1));
        assert!(!s.obstacle_between(3, 4));
        assert!(!s.obstacle_between(2, 2));
    }

    #[test]
    fn obstacle_between_ignores_corner_grazes() {
        // Diagonal segment passes exactly through the corner shared by cells
        // 1 and 3 on a 2x2 grid; neither is crossed through its interior.
        let s = GridScenario::new(
            2,
            2,
            20.0,
            vec![false, true, true, false],
            vec![],
            vec![],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        assert!(!s.obstacle_between(0, 3));
    }

    #[test]
    fn obstacle_between_diagonal_block() {
        // 3x3 grid with the center cell blocked: the long diagonal crosses it.
        let mut mask = vec![false; 9];
        mask[4] = true;
        let s =
            GridScenario::new(3, 3, 20.0, mask, vec![], vec![], 30.0, 1, 300.0).unwrap();
        assert!(s.obstacle_between(0, 8));
        assert!(!s.obstacle_between(0, 2));
    }

    #[test]
    fn sensitive_vehicle_flags() {
        let s = GridScenario::new(
            4,
            4,
            20.0,
            vec![false; 16],
            vec![
                VehicleTrace {
                    vehicle_id: "in".into(),
                    positions: vec![Some(0)],
                },
                VehicleTrace {
                    vehicle_id: "out".into(),
                    positions: vec![Some(15)],
                },
                VehicleTrace {
                    vehicle_id: "absent".into(),
                    positions: vec![None],
                },
            ],
            vec![SensitiveArea {
                center_x_m: 10.0,
                center_y_m: 10.0,
                radius_m: 20.0,
            }],
            30.0,
            1,
            300.0,
        )
        .unwrap();
        assert_eq!(s.sensitive_vehicles(), &[true, false, false]);
    }
}
