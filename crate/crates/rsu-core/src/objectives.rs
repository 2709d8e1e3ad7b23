//! Objective and constraint evaluation for candidate deployments.
//!
//! A deployment is scored on three minimization objectives: total latency
//! over all vehicles and periods, worst cumulative latency among vehicles
//! that enter a sensitive area, and deployed RSU count. Constraints are
//! measured in meters: distance-to-edge for RSUs on obstacle cells and
//! pairwise spacing deficits below the configured minimum.

use crate::error::{Error, Result};
use crate::offloading::{self, OffloadConfig};
use crate::radio::{LinkBudgetParams, QueueParams};
use crate::scenario::GridScenario;

/// Binary genome over the K grid cells; bit `k` set deploys an RSU at cell
/// `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deployment {
    pub bits: Vec<bool>,
}

impl Deployment {
    pub fn empty(k: usize) -> Self {
        Deployment {
            bits: vec![false; k],
        }
    }

    pub fn from_cells(k: usize, cells: &[usize]) -> Result<Self> {
        let mut bits = vec![false; k];
        for &cell in cells {
            if cell >= k {
                return Err(Error::Validation(format!(
                    "deployment cell {cell} out of range, K = {k}"
                )));
            }
            bits[cell] = true;
        }
        Ok(Deployment { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of deployed RSUs (objective three).
    pub fn rsu_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Cells with an RSU, ascending.
    pub fn deployed_cells(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    /// Stable content hash, used to derive per-genome evaluation seeds.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for cell in self.deployed_cells() {
            h ^= cell as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= self.bits.len() as u64;
        h.wrapping_mul(0x0000_0100_0000_01b3)
    }
}

/// The three minimization objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector {
    pub f1_total_delay_s: f64,
    pub f2_max_sensitive_delay_s: f64,
    pub f3_rsu_count: u32,
}

impl ObjectiveVector {
    pub fn as_array(&self) -> [f64; 3] {
        [
            self.f1_total_delay_s,
            self.f2_max_sensitive_delay_s,
            self.f3_rsu_count as f64,
        ]
    }

    /// Plain Pareto dominance: no objective worse, at least one better.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        let a = self.as_array();
        let b = other.as_array();
        a.iter().zip(&b).all(|(x, y)| x <= y) && a.iter().zip(&b).any(|(x, y)| x < y)
    }
}

/// Per-constraint violation magnitudes and their aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationReport {
    pub obstacle_violation_m: f64,
    pub spacing_violation_m: f64,
    /// Aggregate violation: equal-weight sum of the two components, meters.
    pub phi: f64,
}

impl ViolationReport {
    pub fn new(obstacle_m: f64, spacing_m: f64) -> Self {
        ViolationReport {
            obstacle_violation_m: obstacle_m,
            spacing_violation_m: spacing_m,
            phi: overall_violation(obstacle_m, spacing_m),
        }
    }
}

/// Equal-weight aggregation of the two violation families.
pub fn overall_violation(obstacle_m: f64, spacing_m: f64) -> f64 {
    debug_assert!(obstacle_m >= 0.0 && spacing_m >= 0.0);
    obstacle_m + spacing_m
}

/// Feasibility is exact: both violation measures are built from geometry
/// with no round-off at zero.
pub fn is_feasible(report: &ViolationReport) -> bool {
    report.phi == 0.0
}

/// Runs the configured offloading strategy and evaluates the three
/// objectives. Deterministic for fixed scenario, deployment and seeds.
pub fn eval_objectives(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    q: &QueueParams,
    offload_cfg: &OffloadConfig,
) -> ObjectiveVector {
    let (assignment, _) = offloading::assign(scenario, deployment, params, q, offload_cfg);
    let per_vehicle = offloading::per_vehicle_delays(scenario, &assignment, params, q);
    let f1 = per_vehicle.iter().sum();
    let f2 = per_vehicle
        .iter()
        .zip(scenario.sensitive_vehicles())
        .filter(|(_, &sensitive)| sensitive)
        .map(|(&d, _)| d)
        .fold(0.0, f64::max);
    ObjectiveVector {
        f1_total_delay_s: f1,
        f2_max_sensitive_delay_s: f2,
        f3_rsu_count: deployment.rsu_count() as u32,
    }
}

/// Both constraints in one report.
pub fn eval_violations(
    scenario: &GridScenario,
    deployment: &Deployment,
    d_min_m: f64,
) -> ViolationReport {
    ViolationReport::new(
        obstacle_violation(scenario, deployment),
        spacing_violation(scenario, deployment, d_min_m),
    )
}

/// Sum over RSUs placed on obstacle cells of the distance from the RSU's
/// cell center to the nearest point on the obstacle region's boundary
/// (sides of obstacle cells not shared with another obstacle cell; the map
/// border counts as boundary).
pub fn obstacle_violation(scenario: &GridScenario, deployment: &Deployment) -> f64 {
    deployment
        .deployed_cells()
        .into_iter()
        .filter(|&cell| scenario.is_obstacle(cell))
        .map(|cell| distance_to_obstacle_edge(scenario, cell))
        .sum()
}

/// Distance from the center of obstacle cell `cell` to the nearest boundary
/// side of the obstacle union. The nearest side always belongs to the
/// connected region containing the cell, so scanning every obstacle cell's
/// exposed sides is equivalent.
fn distance_to_obstacle_edge(scenario: &GridScenario, cell: usize) -> f64 {
    let (px, py) = scenario.center(cell);
    let size = scenario.cell_size_m;
    let w = scenario.width_cells as isize;
    let h = scenario.height_cells as isize;
    let mut best = f64::INFINITY;
    for idx in 0..scenario.num_cells() {
        if !scenario.is_obstacle(idx) {
            continue;
        }
        let col = (idx % scenario.width_cells) as isize;
        let row = (idx / scenario.width_cells) as isize;
        let x0 = col as f64 * size;
        let y0 = row as f64 * size;
        // (neighbor col, neighbor row, segment endpoints)
        let sides = [
            (col - 1, row, (x0, y0), (x0, y0 + size)),
            (col + 1, row, (x0 + size, y0), (x0 + size, y0 + size)),
            (col, row - 1, (x0, y0), (x0 + size, y0)),
            (col, row + 1, (x0, y0 + size), (x0 + size, y0 + size)),
        ];
        for (ncol, nrow, a, b) in sides {
            let exposed = ncol < 0
                || nrow < 0
                || ncol >= w
                || nrow >= h
                || !scenario.is_obstacle((nrow * w + ncol) as usize);
            if exposed {
                best = best.min(point_segment_distance(px, py, a, b));
            }
        }
    }
    best
}

fn point_segment_distance(px: f64, py: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ax, ay) = a;
    let (bx, by) = b;
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// Sum over unordered RSU pairs closer than `d_min_m` of the deficit
/// `d_min_m - distance`.
pub fn spacing_violation(scenario: &GridScenario, deployment: &Deployment, d_min_m: f64) -> f64 {
    debug_assert!(d_min_m > 0.0);
    let cells = deployment.deployed_cells();
    let mut total = 0.0;
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let d = scenario.dist(cells[i], cells[j]);
            if d < d_min_m {
                total += d_min_m - d;
            }
        }
    }
    total
}
