//! Genome operators: uniform crossover, bounded toggle mutation and the
//! spacing calibration repair.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::Deployment;
use crate::scenario::GridScenario;

/// Uniform crossover with probability `crossover_rate` (genes swap sides
/// independently), then per child one mutation event with probability
/// `mutation_rate` toggling `n_mut` distinct genes. Obstacle cells are never
/// set by mutation; a toggle landing on an unset obstacle cell is a no-op,
/// so a child's Hamming distance from its pre-mutation form is at most
/// `n_mut`.
pub fn variation(
    parent_a: &Deployment,
    parent_b: &Deployment,
    crossover_rate: f64,
    mutation_rate: f64,
    n_mut: usize,
    scenario: &GridScenario,
    rng: &mut ChaCha8Rng,
) -> (Deployment, Deployment) {
    let k = parent_a.len();
    debug_assert_eq!(k, parent_b.len());
    let mut child_a = parent_a.clone();
    let mut child_b = parent_b.clone();
    if rng.random::<f64>() < crossover_rate {
        for gene in 0..k {
            if rng.random::<f64>() < 0.5 {
                child_a.bits[gene] = parent_b.bits[gene];
                child_b.bits[gene] = parent_a.bits[gene];
            }
        }
    }
    for child in [&mut child_a, &mut child_b] {
        if rng.random::<f64>() < mutation_rate {
            mutate(child, n_mut, scenario, rng);
        }
    }
    (child_a, child_b)
}

fn mutate(genome: &mut Deployment, n_mut: usize, scenario: &GridScenario, rng: &mut ChaCha8Rng) {
    let k = genome.len();
    let picks = n_mut.min(k);
    // Sample distinct genes.
    let mut chosen: Vec<usize> = Vec::with_capacity(picks);
    while chosen.len() < picks {
        let gene = rng.random_range(0..k);
        if !chosen.contains(&gene) {
            chosen.push(gene);
        }
    }
    for gene in chosen {
        if genome.bits[gene] {
            genome.bits[gene] = false;
        } else if !scenario.is_obstacle(gene) {
            genome.bits[gene] = true;
        }
    }
}

/// Spacing repair: while any RSU pair sits closer than `d_min_m`, resolve
/// the closest violating pair by keeping the member with the higher traffic
/// volume inside the coverage radius and clearing the other (equal volumes
/// clear the higher cell index). Only ever clears bits; the result has
/// minimum pairwise distance >= `d_min_m`.
pub fn calibrate(genome: &Deployment, scenario: &GridScenario, d_min_m: f64) -> Deployment {
    let cells = genome.deployed_cells();
    let volumes: Vec<usize> = cells
        .iter()
        .map(|&cell| {
            scenario
                .traffic_volume(cell, scenario.coverage_radius_m)
                .expect("deployed cell is in range")
        })
        .collect();

    // All violating pairs, closest first. Distances never change as bits are
    // cleared, so one sorted pass resolves cascades in closest-pair order.
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..cells.len() {
        for j in (i + 1)..cells.len() {
            let d = scenario.dist(cells[i], cells[j]);
            if d < d_min_m {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(cells[a.1].cmp(&cells[b.1]))
            .then(cells[a.2].cmp(&cells[b.2]))
    });

    let mut alive = vec![true; cells.len()];
    for (_, i, j) in pairs {
        if !alive[i] || !alive[j] {
            continue;
        }
        let drop = if volumes[i] > volumes[j] {
            j
        } else if volumes[j] > volumes[i] {
            i
        } else {
            // Tie: the higher cell index is cleared.
            j.max(i)
        };
        alive[drop] = false;
    }

    let mut out = Deployment::empty(genome.len());
    for (idx, &cell) in cells.iter().enumerate() {
        if alive[idx] {
            out.bits[cell] = true;
        }
    }
    out
}
