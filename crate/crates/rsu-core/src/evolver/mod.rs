//! Island-model NSGA-III with epsilon-level constraint handling, adaptive
//! crossover/mutation rates, periodic migration and optional offspring
//! calibration.
//!
//! Islands evolve independently between migration barriers. Every stochastic
//! choice draws from a stream derived from the master seed plus generation,
//! island and slot indices, and per-genome evaluation seeds derive from the
//! genome content, so results are bit-identical across runs and worker
//! counts.

mod epsilon;
mod nsga3;
mod variation;

pub use epsilon::{epsilon_compare, epsilon_initial, epsilon_update, EpsilonState, Preference};
pub use nsga3::{nondominated_sort, nsga3_select, reference_points};
pub use variation::{calibrate, variation};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, HV_REF_POINT};
use crate::objectives::{
    eval_objectives, eval_violations, Deployment, ObjectiveVector, ViolationReport,
};
use crate::offloading::OffloadConfig;
use crate::radio::{LinkBudgetParams, QueueParams};
use crate::rng::{self, domain};
use crate::scenario::GridScenario;

/// All evolver knobs. Defaults mirror the reference parameterization:
/// population 360 over 3 islands, 50 generations, adaptive rates within
/// [0.2, 1.0] and [0, 0.1], theta 18, alpha 0.95, tau 0.1, 10% emigrants
/// and a 30 m spacing constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolverConfig {
    pub population: usize,
    pub islands: usize,
    pub generations: usize,
    pub crossover_init: f64,
    pub crossover_min: f64,
    pub crossover_max: f64,
    pub mutation_init: f64,
    pub mutation_min: f64,
    pub mutation_max: f64,
    pub delta_crossover: f64,
    pub delta_mutation: f64,
    /// Members whose violations sum into the initial epsilon.
    pub theta: usize,
    /// Feasible-ratio threshold steering the epsilon schedule.
    pub alpha: f64,
    /// Epsilon schedule step factor.
    pub tau: f64,
    pub emigrant_fraction: f64,
    pub d_min_m: f64,
    /// Repair offspring spacing (the "-c" variant).
    pub calibrate: bool,
    /// Expected RSU count of a random initial genome.
    pub init_density: f64,
    /// Genes toggled per mutation event.
    pub n_mut: usize,
    pub reference_point_divisions: usize,
    pub master_seed: u64,
    /// Disable together with `epsilon_schedule` (and one island) for a plain
    /// NSGA-III baseline.
    pub adaptive_rates: bool,
    pub epsilon_schedule: bool,
}

impl Default for EvolverConfig {
    fn default() -> Self {
        EvolverConfig {
            population: 360,
            islands: 3,
            generations: 50,
            crossover_init: 0.5,
            crossover_min: 0.2,
            crossover_max: 1.0,
            mutation_init: 0.05,
            mutation_min: 0.0,
            mutation_max: 0.1,
            delta_crossover: 0.1,
            delta_mutation: 0.01,
            theta: 18,
            alpha: 0.95,
            tau: 0.1,
            emigrant_fraction: 0.10,
            d_min_m: 30.0,
            calibrate: true,
            init_density: 30.0,
            n_mut: 3,
            reference_point_divisions: 12,
            master_seed: 0,
            adaptive_rates: true,
            epsilon_schedule: true,
        }
    }
}

impl EvolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 || self.islands == 0 {
            return Err(Error::Config("population and islands must be positive".into()));
        }
        if self.population % self.islands != 0 {
            return Err(Error::Config(format!(
                "population {} not divisible by islands {}",
                self.population, self.islands
            )));
        }
        let ordered = |lo: f64, init: f64, hi: f64| lo <= init && init <= hi;
        if !ordered(self.crossover_min, self.crossover_init, self.crossover_max)
            || !ordered(self.mutation_min, self.mutation_init, self.mutation_max)
        {
            return Err(Error::Config("rate bounds must satisfy min <= init <= max".into()));
        }
        if self.theta > self.population {
            return Err(Error::Config("theta must not exceed the population".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) || !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Config("alpha and tau must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.emigrant_fraction) {
            return Err(Error::Config("emigrant_fraction must lie in [0, 1]".into()));
        }
        if !(self.d_min_m > 0.0) {
            return Err(Error::Config("d_min_m must be positive".into()));
        }
        if self.init_density < 0.0 {
            return Err(Error::Config("init_density must be non-negative".into()));
        }
        if self.reference_point_divisions == 0 {
            return Err(Error::Config("reference_point_divisions must be positive".into()));
        }
        if self.islands >= 2 {
            let island = self.population / self.islands;
            let n_em = self.emigrant_count();
            if (self.islands - 1) * n_em > island {
                return Err(Error::Config(format!(
                    "migration overflow: {} immigrants exceed island size {island}",
                    (self.islands - 1) * n_em
                )));
            }
        }
        Ok(())
    }

    pub fn island_size(&self) -> usize {
        self.population / self.islands
    }

    pub fn emigrant_count(&self) -> usize {
        (self.emigrant_fraction * self.island_size() as f64).round() as usize
    }

    /// Label used in result CSVs.
    pub fn variant_label(&self) -> &'static str {
        if !self.adaptive_rates && !self.epsilon_schedule && self.islands == 1 {
            "nsga3"
        } else if self.calibrate {
            "am-nsga3-c"
        } else {
            "am-nsga3"
        }
    }
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Deployment,
    pub objectives: ObjectiveVector,
    pub violation: ViolationReport,
    /// Front index from the last environmental selection.
    pub rank: usize,
    /// Associated reference point from the last selection.
    pub niche: Option<usize>,
}

/// One island: members plus its own operator rates, epsilon level and
/// improvement history.
#[derive(Debug, Clone)]
pub struct SubPopulation {
    pub members: Vec<Individual>,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub epsilon: f64,
    pub phi_max: f64,
    /// Last generation's feasible non-dominated objectives.
    pub prev_front: Vec<ObjectiveVector>,
    pub prev_min_phi: f64,
}

/// Everything the radio/offloading side of an evaluation needs.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub scenario: &'a GridScenario,
    pub params: &'a LinkBudgetParams,
    pub q: &'a QueueParams,
    pub offload: &'a OffloadConfig,
}

/// Per-generation, per-island telemetry snapshot: the epsilon and rates in
/// effect while the generation was produced, and the state of the island
/// after selection.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryRow {
    pub generation: usize,
    pub island: usize,
    pub epsilon: f64,
    pub rho: f64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub feasible_count: usize,
    pub best_f1: f64,
    pub best_f2: f64,
    pub best_f3: f64,
    pub hypervolume: f64,
}

#[derive(Debug, Clone)]
pub struct ParetoResult {
    /// Feasible non-dominated subset of the final pooled population, sorted
    /// by objectives then genome, duplicates (by genome) removed.
    pub pareto: Vec<Individual>,
    pub final_population: Vec<Individual>,
    pub telemetry: Vec<TelemetryRow>,
}

fn evaluate(ctx: &EvalContext, config: &EvolverConfig, genome: Deployment) -> Individual {
    let seed = rng::mix(&[domain::EVAL, config.master_seed, genome.content_hash()]);
    let offload = OffloadConfig {
        seed,
        ..ctx.offload.clone()
    };
    let objectives = eval_objectives(ctx.scenario, &genome, ctx.params, ctx.q, &offload);
    let violation = eval_violations(ctx.scenario, &genome, config.d_min_m);
    Individual {
        genome,
        objectives,
        violation,
        rank: 0,
        niche: None,
    }
}

/// Builds and evaluates the initial islands: random genomes (density
/// `init_density / K` per non-obstacle cell), per-island rates and initial
/// epsilon levels.
pub fn initialize(
    config: &EvolverConfig,
    ctx: &EvalContext,
) -> Result<Vec<SubPopulation>> {
    config.validate()?;
    let scenario = ctx.scenario;
    let k = scenario.num_cells();
    if (0..k).all(|i| scenario.is_obstacle(i)) {
        return Err(Error::Config("obstacles cover every cell".into()));
    }
    let island_size = config.island_size();
    let density = (config.init_density / k as f64).min(1.0);

    let genomes: Vec<Vec<Deployment>> = (0..config.islands)
        .map(|island| {
            (0..island_size)
                .map(|slot| {
                    let mut rng = rng::stream(&[
                        domain::EVOLVER_INIT,
                        config.master_seed,
                        island as u64,
                        slot as u64,
                    ]);
                    let mut bits = vec![false; k];
                    for (cell, bit) in bits.iter_mut().enumerate() {
                        if !scenario.is_obstacle(cell) && rng.random::<f64>() < density {
                            *bit = true;
                        }
                    }
                    Deployment { bits }
                })
                .collect()
        })
        .collect();

    let islands = genomes
        .into_iter()
        .map(|genomes| {
            let members: Vec<Individual> = genomes
                .into_par_iter()
                .map(|genome| evaluate(ctx, config, genome))
                .collect();
            let phis: Vec<f64> = members.iter().map(|m| m.violation.phi).collect();
            let epsilon = if config.epsilon_schedule {
                epsilon_initial(&phis, config.theta)
            } else {
                0.0
            };
            let prev_front = feasible_front(&members);
            let prev_min_phi = phis.iter().copied().fold(f64::INFINITY, f64::min);
            let phi_max = phis.iter().copied().fold(0.0, f64::max);
            SubPopulation {
                members,
                crossover_rate: config.crossover_init,
                mutation_rate: config.mutation_init,
                epsilon,
                phi_max,
                prev_front,
              prev_min_phi,
            }
        })
        .collect();
    Ok(islands)
}

/// Rate adaptation: reward improvement with more crossover and less
/// mutation, stagnation with the opposite; clamp to the configured bounds.
pub fn adapt_rates(
    sub: &SubPopulation,
    improved: bool,
    config: &EvolverConfig,
) -> (f64, f64) {
    let (dc, dm) = (config.delta_crossover, config.delta_mutation);
    let (mut cr, mut mr) = (sub.crossover_rate, sub.mutation_rate);
    if improved {
        cr += dc;
        mr -= dm;
    } else {
        cr -= dc;
        mr += dm;
    }
    (
        cr.clamp(config.crossover_min, config.crossover_max),
        mr.clamp(config.mutation_min, config.mutation_max),
    )
}

/// Did the island improve this generation? True when the feasible
/// non-dominated front's hypervolume strictly grew (both fronts normalized
/// over their union), or, while no feasible member exists, when the minimum
/// violation strictly dropped.
pub fn improvement_test(sub: &SubPopulation) -> bool {
    let current = feasible_front(&sub.members);
    if current.is_empty() {
        let min_phi = sub
            .members
            .iter()
            .map(|m| m.violation.phi)
            .fold(f64::INFINITY, f64::min);
        return min_phi < sub.prev_min_phi;
    }
    let cur_arrays: Vec<[f64; 3]> = current.iter().map(|o| o.as_array()).collect();
    let prev_arrays: Vec<[f64; 3]> = sub.prev_front.iter().map(|o| o.as_array()).collect();
    let union: Vec<[f64; 3]> = cur_arrays.iter().chain(&prev_arrays).copied().collect();
    let cur_hv = metrics::hypervolume(
        &metrics::normalize_by_extremes(&cur_arrays, &union),
        HV_REF_POINT,
    );
    let prev_hv = metrics::hypervolume(
        &metrics::normalize_by_extremes(&prev_arrays, &union),
        HV_REF_POINT,
    );
    cur_hv > prev_hv
}

fn feasible_front(members: &[Individual]) -> Vec<ObjectiveVector> {
    let feasible: Vec<ObjectiveVector> = members
        .iter()
        .filter(|m| m.violation.phi == 0.0)
        .map(|m| m.objectives)
        .collect();
    metrics::nondominated_indices(&feasible)
        .into_iter()
        .map(|i| feasible[i])
        .collect()
}

/// Total order for picking emigrants and replacement victims:
/// epsilon-constrained rank, then violation, then NSGA-III's diversity
/// measure (members of crowded niches order behind lone ones, farther from
/// their reference line behind closer), then slot. Breaking ties by an
/// objective instead empties whole regions of the front: replacing "worst by
/// f1" evicts every low-RSU-count member within a few migrations.
fn ranked_order(members: &[Individual], eps: f64, ref_points: &[[f64; 3]]) -> Vec<usize> {
    let fronts = nondominated_sort(members, eps);
    let mut rank = vec![0usize; members.len()];
    for (front_idx, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = front_idx;
        }
    }
    let assoc = nsga3::associations(members, ref_points);
    let mut niche_count = vec![0usize; ref_points.len()];
    for &(r, _) in &assoc {
        niche_count[r] += 1;
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        rank[a]
            .cmp(&rank[b])
            .then(members[a].violation.phi.partial_cmp(&members[b].violation.phi).unwrap())
            .then(niche_count[assoc[a].0].cmp(&niche_count[assoc[b].0]))
            .then(assoc[a].1.partial_cmp(&assoc[b].1).unwrap())
            .then(a.cmp(&b))
    });
    order
}

/// Copies each island's best emigrants into every other island, replacing
/// the worst members. Island sizes are unchanged; sources keep their best
/// members (emigrants are copies, not removals).
pub fn migrate(islands: &mut [SubPopulation], config: &EvolverConfig) -> Result<()> {
    let m = islands.len();
    if m < 2 {
        return Ok(());
    }
    let n_em = config.emigrant_count();
    if n_em == 0 {
        return Ok(());
    }
    let island_size = islands[0].members.len();
    if (m - 1) * n_em > island_size {
        return Err(Error::Config(format!(
            "migration overflow: {} immigrants exceed island size {island_size}",
            (m - 1) * n_em
        )));
    }

    let refs = reference_points(config.reference_point_divisions);
    let orders: Vec<Vec<usize>> = islands
        .iter()
        .map(|sub| ranked_order(&sub.members, sub.epsilon, &refs))
        .collect();
    let emigrants: Vec<Vec<Individual>> = islands
        .iter()
        .zip(&orders)
        .map(|(sub, order)| {
            order
                .iter()
                .take(n_em)
                .map(|&i| sub.members[i].clone())
                .collect()
        })
        .collect();

    for (i, sub) in islands.iter_mut().enumerate() {
        let immigrants: Vec<Individual> = emigrants
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, set)| set.iter().cloned())
            .collect();
        let victims: Vec<usize> = orders[i]
            .iter()
            .rev()
            .take(immigrants.len())
            .copied()
            .collect();
        for (victim, immigrant) in victims.into_iter().zip(immigrants) {
            sub.members[victim] = immigrant;
        }
    }
    Ok(())
}

/// Runs the full optimization and returns the feasible non-dominated set,
/// the final population and per-generation telemetry.
pub fn run(
    config: &EvolverConfig,
    scenario: &GridScenario,
    params: &LinkBudgetParams,
    q: &QueueParams,
    offload: &OffloadConfig,
) -> Result<ParetoResult> {
    let ctx = EvalContext {
        scenario,
        params,
        q,
        offload,
    };
    let mut islands = initialize(config, &ctx)?;
    let refs = reference_points(config.reference_point_divisions);
    let island_size = config.island_size();
    let mut telemetry = Vec::new();
    for (i, sub) in islands.iter().enumerate() {
        telemetry.push(telemetry_row(0, i, sub));
    }

    for g in 1..=config.generations {
        for (i, sub) in islands.iter_mut().enumerate() {
            let eps_used = sub.epsilon;
            let rates_used = (sub.crossover_rate, sub.mutation_rate);

            // Offspring: random parent pairs, uniform crossover, bounded
            // mutation, optional spacing repair.
            let mut var_rng = rng::stream(&[
                domain::VARIATION,
                config.master_seed,
                g as u64,
                i as u64,
            ]);
            let mut genomes: Vec<Deployment> = Vec::with_capacity(island_size);
            while genomes.len() < island_size {
                let a = var_rng.random_range(0..sub.members.len());
                let b = var_rng.random_range(0..sub.members.len());
                let (c1, c2) = variation(
                    &sub.members[a].genome,
                    &sub.members[b].genome,
                    sub.crossover_rate,
                    sub.mutation_rate,
                    config.n_mut,
                    scenario,
                    &mut var_rng,
                );
                genomes.push(c1);
                if genomes.len() < island_size {
                    genomes.push(c2);
                }
            }
            if config.calibrate {
                genomes = genomes
                    .into_iter()
                    .map(|genome| calibrate(&genome, scenario, config.d_min_m))
                    .collect();
            }
            let offspring: Vec<Individual> = genomes
                .into_par_iter()
                .map(|genome| evaluate(&ctx, config, genome))
                .collect();

            // Environmental selection over parents + offspring. Exact
            // duplicate genomes (migration copies, children calibrated onto
            // the same survivor set) waste selection slots; keep first
            // occurrences and pad only when uniques run short.
            let mut pool = sub.members.clone();
            pool.extend(offspring);
            let pool = dedup_pool(pool, island_size);
            let fronts = nondominated_sort(&pool, eps_used);
            let mut rank = vec![0usize; pool.len()];
            for (front_idx, front) in fronts.iter().enumerate() {
                for &idx in front {
                    rank[idx] = front_idx;
                }
            }
            let selected = nsga3_select(&pool, &fronts, &refs, island_size);
            let phi_max_pool = pool
                .iter()
                .map(|m| m.violation.phi)
                .fold(sub.phi_max, f64::max);
            sub.members = selected
                .into_iter()
                .map(|(idx, niche)| Individual {
                    rank: rank[idx],
                    niche: Some(niche),
                    ..pool[idx].clone()
                })
                .collect();

            let improved = improvement_test(sub);
            if config.adaptive_rates {
                let (cr, mr) = adapt_rates(sub, improved, config);
                sub.crossover_rate = cr;
                sub.mutation_rate = mr;
            }
            sub.prev_front = feasible_front(&sub.members);
            sub.prev_min_phi = sub
                .members
                .iter()
                .map(|m| m.violation.phi)
                .fold(f64::INFINITY, f64::min);
            sub.phi_max = phi_max_pool;
            let rho = sub
                .members
                .iter()
                .filter(|m| m.violation.phi == 0.0)
                .count() as f64
                / sub.members.len() as f64;
            sub.epsilon = if config.epsilon_schedule {
                let state = EpsilonState {
                    epsilon: eps_used,
                    phi_max: sub.phi_max,
                    rho,
                };
                epsilon_update(&state, g, config)
            } else {
                0.0
            };

            // The row reports the epsilon and rates in effect while this
            // generation was produced, and the island state after selection.
            let mut row = telemetry_row(g, i, sub);
            row.epsilon = eps_used;
            row.crossover_rate = rates_used.0;
            row.mutation_rate = rates_used.1;
            telemetry.push(row);
        }
        migrate(&mut islands, config)?;
    }

    let final_population: Vec<Individual> = islands
        .into_iter()
        .flat_map(|sub| sub.members)
        .collect();
    let pareto = pareto_subset(&final_population);
    Ok(ParetoResult {
        pareto,
        final_population,
        telemetry,
    })
}

/// Drops exact-duplicate genomes (first occurrence wins) while keeping at
/// least `min_size` members.
fn dedup_pool(pool: Vec<Individual>, min_size: usize) -> Vec<Individual> {
    let mut seen: std::collections::HashSet<Vec<bool>> = std::collections::HashSet::new();
    let mut unique = Vec::with_capacity(pool.len());
    let mut duplicates = Vec::new();
    for member in pool {
        if seen.insert(member.genome.bits.clone()) {
            unique.push(member);
        } else {
            duplicates.push(member);
        }
    }
    let shortfall = min_size.saturating_sub(unique.len());
    unique.extend(duplicates.into_iter().take(shortfall));
    unique
}

/// Feasible non-dominated subset, deduplicated by genome, sorted by
/// objectives then deployed cells.
fn pareto_subset(population: &[Individual]) -> Vec<Individual> {
    let feasible: Vec<&Individual> = population
        .iter()
        .filter(|m| m.violation.phi == 0.0)
        .collect();
    let objectives: Vec<ObjectiveVector> = feasible.iter().map(|m| m.objectives).collect();
    let keep = metrics::nondominated_indices(&objectives);
    let mut out: Vec<Individual> = Vec::new();
    for i in keep {
        if !out.iter().any(|m| m.genome == feasible[i].genome) {
            out.push(feasible[i].clone());
        }
    }
    out.sort_by(|a, b| {
        a.objectives
            .as_array()
            .partial_cmp(&b.objectives.as_array())
            .unwrap()
            .then_with(|| a.genome.deployed_cells().cmp(&b.genome.deployed_cells()))
    });
    out
}

fn telemetry_row(generation: usize, island: usize, sub: &SubPopulation) -> TelemetryRow {
    let feasible: Vec<&Individual> = sub
        .members
        .iter()
        .filter(|m| m.violation.phi == 0.0)
        .collect();
    let feasible_count = feasible.len();
    let pool: Vec<&Individual> = if feasible.is_empty() {
        sub.members.iter().collect()
    } else {
        feasible
    };
    let best = |f: fn(&Individual) -> f64| pool.iter().map(|m| f(m)).fold(f64::INFINITY, f64::min);
    let front = feasible_front(&sub.members);
    let arrays: Vec<[f64; 3]> = front.iter().map(|o| o.as_array()).collect();
    let hv = if arrays.is_empty() {
        0.0
    } else {
        metrics::hypervolume(
            &metrics::normalize_by_extremes(&arrays, &arrays),
            HV_REF_POINT,
        )
    };
    TelemetryRow {
        generation,
        island,
        epsilon: sub.epsilon,
        rho: feasible_count as f64 / sub.members.len() as f64,
        crossover_rate: sub.crossover_rate,
        mutation_rate: sub.mutation_rate,
        feasible_count,
        best_f1: best(|m| m.objectives.f1_total_delay_s),
        best_f2: best(|m| m.objectives.f2_max_sensitive_delay_s),
        best_f3: best(|m| m.objectives.f3_rsu_count as f64),
        hypervolume: hv,
    }
}
