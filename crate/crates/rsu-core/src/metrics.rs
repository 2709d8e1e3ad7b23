//! Front quality indicators: NPS/NFS counts, inverted generational distance,
//! exact 3-D hypervolume, Schott spacing, and cross-algorithm front merging.
//!
//! All indicators assume minimization. IGD, hypervolume and spacing operate
//! in a normalized objective space; [`normalize_by_extremes`] maps raw
//! objective vectors into it using a reference front's per-objective
//! extremes.

use crate::error::{Error, Result};
use crate::objectives::ObjectiveVector;

/// Default hypervolume reference point in normalized space.
pub const HV_REF_POINT: [f64; 3] = [1.1, 1.1, 1.1];

/// A labeled set of objective vectors, e.g. one algorithm's returned front.
#[derive(Debug, Clone, Default)]
pub struct Front {
    pub points: Vec<ObjectiveVector>,
    pub feasible: Vec<bool>,
    /// Source-algorithm label per point; empty strings when unused.
    pub labels: Vec<String>,
}

impl Front {
    pub fn push(&mut self, point: ObjectiveVector, feasible: bool, label: impl Into<String>) {
        self.points.push(point);
        self.feasible.push(feasible);
        self.labels.push(label.into());
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_arrays(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(|p| p.as_array()).collect()
    }
}

/// Indices of the non-dominated subset under plain Pareto dominance.
pub fn nondominated_indices(points: &[ObjectiveVector]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().enumerate().any(|(j, q)| j != i && q.dominates(&points[i])))
        .collect()
}

/// `(nps, nfs)`: the size of the non-dominated subset after removing exact
/// duplicates, and the number of feasible members within it.
pub fn count_nps_nfs(front: &Front) -> (usize, usize) {
    let mut seen: Vec<([f64; 3], bool)> = Vec::new();
    let mut points = Vec::new();
    let mut feasible = Vec::new();
    for (p, &f) in front.points.iter().zip(&front.feasible) {
        let key = (p.as_array(), f);
        if !seen.contains(&key) {
            seen.push(key);
            points.push(*p);
            feasible.push(f);
        }
    }
    let nd = nondominated_indices(&points);
    let nfs = nd.iter().filter(|&&i| feasible[i]).count();
    (nd.len(), nfs)
}

/// Maps `points` into [0, 1] per objective using the reference front's
/// extremes; degenerate ranges pass through unscaled.
pub fn normalize_by_extremes(points: &[[f64; 3]], reference: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for r in reference {
        for d in 0..3 {
            lo[d] = lo[d].min(r[d]);
            hi[d] = hi[d].max(r[d]);
        }
    }
    points
        .iter()
        .map(|p| {
            let mut out = [0.0; 3];
            for d in 0..3 {
                let denom = if hi[d] > lo[d] { hi[d] - lo[d] } else { 1.0 };
                out[d] = (p[d] - lo[d]) / denom;
            }
            out
        })
        .collect()
}

/// Inverted generational distance: mean over reference points of the
/// distance to the nearest front point, in the space normalized by the
/// reference front's extremes.
pub fn igd(front: &[[f64; 3]], reference: &[[f64; 3]]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::UndefinedInput("igd needs a non-empty reference front".into()));
    }
    let norm_front = normalize_by_extremes(front, reference);
    let norm_ref = normalize_by_extremes(reference, reference);
    let total: f64 = norm_ref
        .iter()
        .map(|r| {
            norm_front
                .iter()
                .map(|p| dist3(p, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / norm_ref.len() as f64)
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|d| (a[d] - b[d]).powi(2)).sum::<f64>().sqrt()
}

/// Exact hypervolume of the union of boxes `[point, ref_point]` in 3-D
/// (minimization). Points at or beyond the reference point in any coordinate
/// span no volume; they are clipped away with a warning on stderr.
pub fn hypervolume(points: &[[f64; 3]], ref_point: [f64; 3]) -> f64 {
    let kept: Vec<[f64; 3]> = points
        .iter()
        .copied()
        .filter(|p| (0..3).all(|d| p[d] < ref_point[d]))
        .collect();
    if kept.len() < points.len() {
        eprintln!(
            "hypervolume: clipped {} point(s) at or beyond the reference point",
            points.len() - kept.len()
        );
    }
    if kept.is_empty() {
        return 0.0;
    }

    // Sweep z slabs; each slab contributes (2-D staircase area) x height.
    let mut zs: Vec<f64> = kept.iter().map(|p| p[2]).collect();
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zs.dedup();
    zs.push(ref_point[2]);

    let mut volume = 0.0;
    for slab in zs.windows(2) {
        let (z0, z1) = (slab[0], slab[1]);
        let active: Vec<[f64; 2]> = kept
            .iter()
            .filter(|p| p[2] <= z0)
            .map(|p| [p[0], p[1]])
            .collect();
        volume += staircase_area(&active, ref_point[0], ref_point[1]) * (z1 - z0);
    }
    volume
}

fn staircase_area(points: &[[f64; 2]], ref_x: f64, ref_y: f64) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut area = 0.0;
    let mut best_y = f64::INFINITY;
    let mut stair: Vec<[f64; 2]> = Vec::new();
    for p in sorted {
        if p[1] < best_y {
            best_y = p[1];
            stair.push(p);
        }
    }
    for (i, p) in stair.iter().enumerate() {
        let next_x = stair.get(i + 1).map_or(ref_x, |n| n[0]);
        area += (next_x - p[0]) * (ref_y - p[1]);
    }
    area
}

/// Schott spacing: sample standard deviation of each point's
/// nearest-neighbor distance. Lower is more uniform. Undefined for fewer
/// than two points.
pub fn spacing(points: &[[f64; 3]]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::UndefinedInput("spacing needs at least two points".into()));
    }
    let nearest: Vec<f64> = (0..points.len())
        .map(|i| {
            (0..points.len())
                .filter(|&j| j != i)
                .map(|j| dist3(&points[i], &points[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mean = nearest.iter().sum::<f64>() / nearest.len() as f64;
    let var = nearest.iter().map(|d| (d - mean).powi(2)).sum::<f64>()
        / (nearest.len() - 1) as f64;
    Ok(var.sqrt())
}

/// Union of all feasible points across the input fronts, reduced to the
/// non-dominated subset; each survivor keeps its source label. Exact
/// duplicates are dropped (first occurrence wins).
pub fn merge_pareto(fronts: &[Front]) -> Front {
    let mut pool = Front::default();
    for front in fronts {
        for ((p, &feasible), label) in front.points.iter().zip(&front.feasible).zip(&front.labels)
        {
            if !feasible {
                continue;
            }
            let dup = pool
                .points
                .iter()
                .any(|q| q.as_array() == p.as_array());
            if !dup {
                pool.push(*p, true, label.clone());
            }
        }
    }
    let keep = nondominated_indices(&pool.points);
    let mut merged = Front::default();
    for i in keep {
        merged.push(pool.points[i], true, pool.labels[i].clone());
    }
    merged
}
