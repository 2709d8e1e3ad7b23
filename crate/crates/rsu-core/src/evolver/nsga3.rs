//! NSGA-III machinery: reference points, constrained non-dominated sorting
//! and niche-preserving environmental selection.

use super::epsilon::{epsilon_compare, Preference};
use super::Individual;

/// Das-Dennis simplex-lattice reference points for three objectives:
/// all non-negative integer triples summing to `divisions`, scaled to the
/// unit simplex. Yields C(divisions + 2, 2) points.
pub fn reference_points(divisions: usize) -> Vec<[f64; 3]> {
    let mut points = Vec::new();
    for i in 0..=divisions {
        for j in 0..=(divisions - i) {
            let k = divisions - i - j;
            points.push([
                i as f64 / divisions as f64,
                j as f64 / divisions as f64,
                k as f64 / divisions as f64,
            ]);
        }
    }
    points
}

/// Fast non-dominated sorting with pairwise precedence given by the
/// epsilon-level comparison at `eps`. Returns fronts of indices into `pool`,
/// best first.
pub fn nondominated_sort(pool: &[Individual], eps: f64) -> Vec<Vec<usize>> {
    let n = pool.len();
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominated_by = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            match epsilon_compare(&pool[i], &pool[j], eps) {
                Preference::ABetter => {
                    dominates[i].push(j);
                    dominated_by[j] += 1;
                }
                Preference::BBetter => {
                    dominates[j].push(i);
                    dominated_by[i] += 1;
                }
                Preference::Incomparable => {}
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// NSGA-III environmental selection: accept whole fronts while they fit,
/// then fill the remainder from the splitting front by reference-point
/// niching. Returns exactly `target` pool indices plus each selected
/// member's associated reference point.
pub fn nsga3_select(
    pool: &[Individual],
    fronts: &[Vec<usize>],
    ref_points: &[[f64; 3]],
    target: usize,
) -> Vec<(usize, usize)> {
    assert!(pool.len() >= target, "pool smaller than selection target");

    // Normalize by the pool's ideal and nadir points.
    let assoc = associations(pool, ref_points);

    let mut selected: Vec<(usize, usize)> = Vec::with_capacity(target);
    let mut front_iter = fronts.iter();
    let last_front = loop {
        let Some(front) = front_iter.next() else {
            // Every front fit exactly.
            return selected;
        };
        if selected.len() + front.len() <= target {
            selected.extend(front.iter().map(|&i| (i, assoc[i].0)));
            if selected.len() == target {
                return selected;
            }
        } else {
            break front;
        }
    };

    // Niche counts from the already-accepted members.
    let mut niche_count = vec![0usize; ref_points.len()];
    for &(_, r) in &selected {
        niche_count[r] += 1;
    }
    let mut candidates: Vec<usize> = last_front.clone();
    while selected.len() < target {
        // Reference point with the lowest niche count among those that still
        // have candidates; ties go to the lowest index.
        let mut live: Vec<usize> = candidates.iter().map(|&i| assoc[i].0).collect();
        live.sort_unstable();
        live.dedup();
        let target_ref = live
            .into_iter()
            .min_by_key(|&r| (niche_count[r], r))
            .expect("candidates remain");
        // Closest candidate on that reference line; ties go to the lowest
        // pool index.
        let (pos, &winner) = candidates
            .iter()
            .enumerate()
            .filter(|(_, &i)| assoc[i].0 == target_ref)
            .min_by(|(_, &a), (_, &b)| {
                assoc[a]
                    .1
                    .partial_cmp(&assoc[b].1)
                    .unwrap()
                    .then(a.cmp(&b))
            })
            .expect("reference point has candidates");
        selected.push((winner, target_ref));
        niche_count[target_ref] += 1;
        candidates.remove(pos);
    }
    selected
}

/// Reference association of every pool member after ideal/nadir
/// normalization: `(reference index, perpendicular distance)`.
pub(super) fn associations(pool: &[Individual], ref_points: &[[f64; 3]]) -> Vec<(usize, f64)> {
    normalize_pool(pool)
        .iter()
        .map(|z| associate(z, ref_points))
        .collect()
}

fn normalize_pool(pool: &[Individual]) -> Vec<[f64; 3]> {
    let mut ideal = [f64::INFINITY; 3];
    let mut nadir = [f64::NEG_INFINITY; 3];
    for member in pool {
        let f = member.objectives.as_array();
        for d in 0..3 {
            ideal[d] = ideal[d].min(f[d]);
            nadir[d] = nadir[d].max(f[d]);
        }
    }
    pool.iter()
        .map(|member| {
            let f = member.objectives.as_array();
            let mut z = [0.0; 3];
            for d in 0..3 {
                let denom = if nadir[d] > ideal[d] {
                    nadir[d] - ideal[d]
                } else {
                    1.0
                };
                z[d] = (f[d] - ideal[d]) / denom;
            }
            z
        })
        .collect()
}

/// Nearest reference line by perpendicular distance.
fn associate(z: &[f64; 3], ref_points: &[[f64; 3]]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (r_idx, r) in ref_points.iter().enumerate() {
        let norm2: f64 = r.iter().map(|c| c * c).sum();
        let dot: f64 = (0..3).map(|d| z[d] * r[d]).sum();
        let proj = dot / norm2;
        let dist2: f64 = (0..3).map(|d| (z[d] - proj * r[d]).powi(2)).sum();
        if dist2 < best.1 {
            best = (r_idx, dist2);
        }
    }
    (best.0, best.1.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Deployment, ObjectiveVector, ViolationReport};
    use rand::Rng;

    fn indiv(f: [f64; 3], phi: f64) -> Individual {
        Individual {
            genome: Deployment::empty(4),
            objectives: ObjectiveVector {
                f1_total_delay_s: f[0],
                f2_max_sensitive_delay_s: f[1],
                f3_rsu_count: f[2] as u32,
            },
            violation: ViolationReport::new(phi, 0.0),
            rank: 0,
            niche: None,
        }
    }

    #[test]
    fn das_dennis_counts() {
        assert_eq!(reference_points(1).len(), 3);
        assert_eq!(reference_points(12).len(), 91); // C(14, 2)
        for p in reference_points(12) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sorting_small_cases() {
        let single = vec![indiv([1.0, 1.0, 1.0], 0.0)];
        assert_eq!(nondominated_sort(&single, 0.0), vec![vec![0]]);

        let pair = vec![indiv([1.0, 2.0, 1.0], 0.0), indiv([2.0, 1.0, 1.0], 0.0)];
        assert_eq!(nondominated_sort(&pair, 0.0), vec![vec![0, 1]]);

        let chain = vec![indiv([2.0, 2.0, 2.0], 0.0), indiv([1.0, 1.0, 1.0], 0.0)];
        assert_eq!(nondominated_sort(&chain, 0.0), vec![vec![1], vec![0]]);
    }

    /// Brute-force oracle: repeatedly peel the members beaten by nobody.
    fn peel_fronts(pool: &[Individual], eps: f64) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..pool.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining.iter().any(|&j| {
                        j != i
                            && epsilon_compare(&pool[j], &pool[i], eps) == Preference::ABetter
                    })
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn sorting_matches_peeling_oracle() {
        let mut rng = crate::rng::stream(&[808]);
        for _ in 0..30 {
            let n = rng.random_range(5..40);
            let pool: Vec<Individual> = (0..n)
                .map(|_| {
                    indiv(
                        [
                            rng.random::<f64>() * 10.0,
                            rng.random::<f64>() * 10.0,
                            (rng.random::<f64>() * 5.0).floor(),
                        ],
                        if rng.random::<f64>() < 0.5 {
                            0.0
                        } else {
                            rng.random::<f64>() * 8.0
                        },
                    )
                })
                .collect();
            for eps in [0.0, 5.0] {
                let mut got = nondominated_sort(&pool, eps);
                let mut expected = peel_fronts(&pool, eps);
                for f in got.iter_mut().chain(expected.iter_mut()) {
                    f.sort_unstable();
                }
                assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn selection_size_contract() {
        let mut rng = crate::rng::stream(&[909]);
        let refs = reference_points(6);
        for _ in 0..10 {
            let n = rng.random_range(10..50);
            let pool: Vec<Individual> = (0..n)
                .map(|_| {
                    indiv(
                        [rng.random(), rng.random(), rng.random()],
                        if rng.random::<f64>() < 0.7 { 0.0 } else { 3.0 },
                    )
                })
                .collect();
            let fronts = nondominated_sort(&pool, 0.0);
            let target = n / 2;
            let picked = nsga3_select(&pool, &fronts, &refs, target);
            assert_eq!(picked.len(), target);
            let mut indices: Vec<usize> = picked.iter().map(|&(i, _)| i).collect();
            indices.sort_unstable();
            indices.dedup();
            assert_eq!(indices.len(), target, "duplicate selections");
        }
    }

    #[test]
    fn selection_takes_everything_when_pool_fits() {
        let pool = vec![
            indiv([1.0, 2.0, 3.0], 0.0),
            indiv([2.0, 1.0, 3.0], 0.0),
            indiv([3.0, 3.0, 1.0], 0.0),
        ];
        let fronts = nondominated_sort(&pool, 0.0);
        let refs = reference_points(4);
        let picked = nsga3_select(&pool, &fronts, &refs, 3);
        assert_eq!(picked.len(), 3);
    }

    #[test]
    fn selection_prefers_better_fronts() {
        // Two clear layers; the whole first front must be kept.
        let pool = vec![
            indiv([1.0, 2.0, 1.0], 0.0),
            indiv([2.0, 1.0, 1.0], 0.0),
            indiv([5.0, 5.0, 5.0], 0.0),
            indiv([6.0, 6.0, 6.0], 0.0),
        ];
        let fronts = nondominated_sort(&pool, 0.0);
        let refs = reference_points(4);
        let picked = nsga3_select(&pool, &fronts, &refs, 3);
        let indices: Vec<usize> = picked.iter().map(|&(i, _)| i).collect();
        assert!(indices.contains(&0) && indices.contains(&1));
        assert!(indices.contains(&2));
    }
}
