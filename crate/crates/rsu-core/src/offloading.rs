//! Data offloading: assigns every present vehicle in every period to an RSU
//! or the cellular fallback.
//!
//! Four strategies are provided: the iterative best-response sequential game
//! (IBRSG), nearest-RSU ("Mindis"), strongest-signal ("MinPL") and uniform
//! random. Periods are independent: queue state does not persist across them,
//! so each period is solved on its own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Deployment;
use crate::radio::{
    link_transmission_delay, path_loss_db, queuing_delay, DelayOutcome, LinkBudgetParams,
    QueueParams,
};
use crate::rng::{self, domain};
use crate::scenario::GridScenario;

/// Link target of one vehicle in one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Connected to the RSU deployed at this cell.
    Rsu(usize),
    Cellular,
}

/// A complete offloading decision: per-period, per-vehicle targets plus the
/// derived per-RSU arrival counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Deployed RSU cells in ascending order; arrival counts use this order.
    pub rsu_cells: Vec<usize>,
    /// `targets[period][vehicle]`; `None` marks an absent vehicle.
    pub targets: Vec<Vec<Option<Target>>>,
    /// `arrivals[period][slot]`: vehicles assigned to `rsu_cells[slot]`.
    pub arrivals: Vec<Vec<usize>>,
}

impl Assignment {
    /// Arrival count at the RSU deployed on `cell` during `period`.
    pub fn arrivals_at(&self, period: usize, cell: usize) -> usize {
        match self.rsu_cells.binary_search(&cell) {
            Ok(slot) => self.arrivals[period][slot],
            Err(_) => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Ibrsg,
    /// Nearest RSU.
    Mindis,
    /// Minimum total path loss.
    Minpl,
    Random,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Ibrsg => "ibrsg",
            Strategy::Mindis => "mindis",
            Strategy::Minpl => "minpl",
            Strategy::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OffloadConfig {
    pub strategy: Strategy,
    /// Sweep-to-sweep Hamming distance below which IBRSG stops; 0 demands an
    /// exact fixed point.
    pub error_threshold: usize,
    pub max_sweeps: usize,
    /// Seeds the initial random strategy (IBRSG) or the random baseline.
    pub seed: u64,
}

impl Default for OffloadConfig {
    fn default() -> Self {
        OffloadConfig {
            strategy: Strategy::Ibrsg,
            error_threshold: 0,
            max_sweeps: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IbrsgStats {
    /// Sweeps executed, summed over periods.
    pub sweeps: usize,
}

/// Runs the configured strategy.
pub fn assign(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    q: &QueueParams,
    cfg: &OffloadConfig,
) -> (Assignment, IbrsgStats) {
    match cfg.strategy {
        Strategy::Ibrsg => assign_ibrsg(scenario, deployment, params, q, cfg),
        Strategy::Mindis => (assign_nearest(scenario, deployment, params, q), IbrsgStats::default()),
        Strategy::Minpl => (assign_strongest(scenario, deployment, params, q), IbrsgStats::default()),
        Strategy::Random => (
            assign_random(scenario, deployment, cfg.seed),
            IbrsgStats::default(),
        ),
    }
}

// ---------------------------------------------------------------------------
// Per-period problem layout
// ---------------------------------------------------------------------------

/// A present vehicle with its in-range RSU slots (ascending). Strategies
/// that need per-link radio math compute it themselves; the cheap ones
/// (nearest, random) never touch it.
struct PresentVehicle {
    vehicle: usize,
    cell: usize,
    candidates: Vec<usize>,
}

fn present_vehicles(
    scenario: &GridScenario,
    rsu_cells: &[usize],
    period: usize,
) -> Vec<PresentVehicle> {
    scenario
        .traces
        .iter()
        .enumerate()
        .filter_map(|(vehicle, trace)| trace.positions[period].map(|cell| (vehicle, cell)))
        .map(|(vehicle, cell)| {
            let candidates = rsu_cells
                .iter()
                .enumerate()
                .filter(|(_, &rsu)| scenario.dist(cell, rsu) <= scenario.coverage_radius_m)
                .map(|(slot, _)| slot)
                .collect();
            PresentVehicle {
                vehicle,
                cell,
                candidates,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// IBRSG
// ---------------------------------------------------------------------------

/// Mutable state of one period's game: who is where, and the latency bill.
struct GameState<'a> {
    params: &'a LinkBudgetParams,
    q: &'a QueueParams,
    /// Per present vehicle: candidate slot index or `None` for cellular.
    choice: Vec<Option<usize>>,
    lambda: Vec<usize>,
    trans_sum: Vec<f64>,
    n_cellular: usize,
}

impl<'a> GameState<'a> {
    fn new(params: &'a LinkBudgetParams, q: &'a QueueParams, vehicles: usize, slots: usize) -> Self {
        GameState {
            params,
            q,
            choice: vec![None; vehicles],
            lambda: vec![0; slots],
            trans_sum: vec![0.0; slots],
            n_cellular: vehicles,
        }
    }

    /// Latency contributed by RSU `slot` at the given queue length and
    /// transmission-delay sum: every arrived vehicle pays its own
    /// transmission delay plus the shared queue delay. A saturated queue
    /// under the cellular policy reroutes all of them.
    fn slot_cost(&self, lambda: usize, trans_sum: f64) -> f64 {
        match queuing_delay(self.q, lambda) {
            DelayOutcome::Seconds(qd) => trans_sum + lambda as f64 * qd,
            DelayOutcome::ToCellular => lambda as f64 * self.params.cellular_delay_s,
        }
    }

    fn total(&self) -> f64 {
        let rsus: f64 = (0..self.lambda.len())
            .map(|s| self.slot_cost(self.lambda[s], self.trans_sum[s]))
            .sum();
        rsus + self.n_cellular as f64 * self.params.cellular_delay_s
    }

    fn remove(&mut self, idx: usize, links: &[Vec<(usize, f64)>]) {
        match self.choice[idx] {
            Some(slot) => {
                let trans = links[idx]
                    .iter()
                    .find(|(s, _)| *s == slot)
                    .expect("assigned slot is a candidate")
                    .1;
                self.lambda[slot] -= 1;
                self.trans_sum[slot] -= trans;
            }
            None => self.n_cellular -= 1,
        }
    }

    fn place(&mut self, idx: usize, target: Option<usize>, links: &[Vec<(usize, f64)>]) {
        match target {
            Some(slot) => {
                let trans = links[idx]
                    .iter()
                    .find(|(s, _)| *s == slot)
                    .expect("target slot is a candidate")
                    .1;
                self.lambda[slot] += 1;
                self.trans_sum[slot] += trans;
            }
            None => self.n_cellular += 1,
        }
        self.choice[idx] = target;
    }

    /// Marginal system latency of adding the vehicle to `target`, with the
    /// vehicle currently removed from the state.
    fn add_cost(&self, target: Option<(usize, f64)>) -> f64 {
        match target {
            Some((slot, trans)) => {
                let with =
                    self.slot_cost(self.lambda[slot] + 1, self.trans_sum[slot] + trans);
                with - self.slot_cost(self.lambda[slot], self.trans_sum[slot])
            }
            None => self.params.cellular_delay_s,
        }
    }
}

/// Iterative best-response sequential game. Each sweep updates vehicles in
/// index order; vehicle `i` picks the target (its in-range RSUs or cellular)
/// that minimizes the total latency of all vehicles given the others'
/// current choices, keeping its current target on ties. Sweeps repeat until
/// fewer than `max(error_threshold, 1)` assignments changed or `max_sweeps`
/// is reached.
pub fn assign_ibrsg(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    q: &QueueParams,
    cfg: &OffloadConfig,
) -> (Assignment, IbrsgStats) {
    let (assignment, stats, _) = ibrsg_inner(scenario, deployment, params, q, cfg, false);
    (assignment, stats)
}

/// [`assign_ibrsg`] plus, per period, the total-latency sequence starting at
/// the initial strategy and appended after every single best-response
/// update. Used to audit the descent property.
pub fn assign_ibrsg_traced(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    q: &QueueParams,
    cfg: &OffloadConfig,
) -> (Assignment, IbrsgStats, Vec<Vec<f64>>) {
    ibrsg_inner(scenario, deployment, params, q, cfg, true)
}

fn ibrsg_inner(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    q: &QueueParams,
    cfg: &OffloadConfig,
    trace: bool,
) -> (Assignment, IbrsgStats, Vec<Vec<f64>>) {
    let rsu_cells = deployment.deployed_cells();
    let mut builder = AssignmentBuilder::new(scenario, &rsu_cells);
    let mut stats = IbrsgStats::default();
    let mut traces = Vec::new();
    let stop_below = cfg.error_threshold.max(1);

    for period in 0..scenario.num_periods {
        let vehicles = present_vehicles(scenario, &rsu_cells, period);
        // Transmission delay per (vehicle, candidate slot).
        let links: Vec<Vec<(usize, f64)>> = vehicles
            .iter()
            .map(|v| {
                v.candidates
                    .iter()
                    .map(|&slot| {
                        (
                            slot,
                            link_transmission_delay(scenario, params, v.cell, rsu_cells[slot]),
                        )
                    })
                    .collect()
            })
            .collect();
        let mut state = GameState::new(params, q, vehicles.len(), rsu_cells.len());

        // Random initial strategy: a uniform in-range RSU, cellular when out
        // of coverage.
        let mut init_rng = rng::stream(&[domain::OFFLOAD_INIT, cfg.seed, period as u64]);
        for (idx, v) in vehicles.iter().enumerate() {
            state.remove(idx, &links); // leaves the cellular default
            let target = if v.candidates.is_empty() {
                None
            } else {
                use rand::Rng;
                Some(v.candidates[init_rng.random_range(0..v.candidates.len())])
            };
            state.place(idx, target, &links);
        }

        let mut period_trace = Vec::new();
        if trace {
            period_trace.push(state.total());
        }

        for _sweep in 0..cfg.max_sweeps {
            stats.sweeps += 1;
            let before = state.choice.clone();
            for idx in 0..vehicles.len() {
                let current = state.choice[idx];
                state.remove(idx, &links);
                // Benchmark: keeping the current target.
                let current_with_trans = current.map(|slot| {
                    let trans = links[idx]
                        .iter()
                        .find(|(s, _)| *s == slot)
                        .expect("assigned slot is a candidate")
                        .1;
                    (slot, trans)
                });
                let mut best = current;
                let mut best_cost = state.add_cost(current_with_trans);
                for &(slot, trans) in &links[idx] {
                    let cost = state.add_cost(Some((slot, trans)));
                    if cost < best_cost {
                        best = Some(slot);
                        best_cost = cost;
                    }
                }
                if state.add_cost(None) < best_cost {
                    best = None;
                }
                state.place(idx, best, &links);
                if trace {
                    period_trace.push(state.total());
                }
            }
            let changed = before
                .iter()
                .zip(&state.choice)
                .filter(|(a, b)| a != b)
                .count();
            if changed < stop_below {
                break;
            }
        }

        builder.record_period(period, &vehicles, &state.choice);
        if trace {
            traces.push(period_trace);
        }
    }

    (builder.finish(), stats, traces)
}

// ---------------------------------------------------------------------------
// Baseline strategies
// ---------------------------------------------------------------------------

/// Nearest in-range RSU ("Mindis"); ties broken by lowest cell index;
/// cellular when nothing is in range.
pub fn assign_nearest(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    _q: &QueueParams,
) -> Assignment {
    assign_by_key(scenario, deployment, params, |scenario, _params, vcell, rcell| {
        scenario.dist(vcell, rcell)
    })
}

/// In-range RSU with the smallest total path loss ("MinPL"); ties broken by
/// lowest cell index; cellular when nothing is in range.
pub fn assign_strongest(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    _q: &QueueParams,
) -> Assignment {
    assign_by_key(scenario, deployment, params, path_loss_db)
}

fn assign_by_key(
    scenario: &GridScenario,
    deployment: &Deployment,
    params: &LinkBudgetParams,
    key: impl Fn(&GridScenario, &LinkBudgetParams, usize, usize) -> f64,
) -> Assignment {
    let rsu_cells = deployment.deployed_cells();
    let mut builder = AssignmentBuilder::new(scenario, &rsu_cells);
    for period in 0..scenario.num_periods {
        let vehicles = present_vehicles(scenario, &rsu_cells, period);
        let choice: Vec<Option<usize>> = vehicles
            .iter()
            .map(|v| {
                v.candidates
                    .iter()
                    .map(|&slot| (key(scenario, params, v.cell, rsu_cells[slot]), slot))
                    .min_by(|a, b| a.partial_cmp(b).unwrap())
                    .map(|(_, slot)| slot)
            })
            .collect();
        builder.record_period(period, &vehicles, &choice);
    }
    builder.finish()
}

/// Uniform random in-range RSU; deterministic per seed; cellular when
/// nothing is in range.
pub fn assign_random(scenario: &GridScenario, deployment: &Deployment, seed: u64) -> Assignment {
    let rsu_cells = deployment.deployed_cells();
    let mut builder = AssignmentBuilder::new(scenario, &rsu_cells);
    for period in 0..scenario.num_periods {
        let vehicles = present_vehicles(scenario, &rsu_cells, period);
        let mut rng = rng::stream(&[domain::OFFLOAD_RANDOM, seed, period as u64]);
        let choice: Vec<Option<usize>> = vehicles
            .iter()
            .map(|v| {
                if v.candidates.is_empty() {
                    None
                } else {
                    use rand::Rng;
                    Some(v.candidates[rng.random_range(0..v.candidates.len())])
                }
            })
            .collect();
        builder.record_period(period, &vehicles, &choice);
    }
    builder.finish()
}

struct AssignmentBuilder {
    rsu_cells: Vec<usize>,
    targets: Vec<Vec<Option<Target>>>,
    arrivals: Vec<Vec<usize>>,
}

impl AssignmentBuilder {
    fn new(scenario: &GridScenario, rsu_cells: &[usize]) -> Self {
        AssignmentBuilder {
            rsu_cells: rsu_cells.to_vec(),
            targets: vec![vec![None; scenario.num_vehicles()]; scenario.num_periods],
            arrivals: vec![vec![0; rsu_cells.len()]; scenario.num_periods],
        }
    }

    fn record_period(
        &mut self,
        period: usize,
        vehicles: &[PresentVehicle],
        choice: &[Option<usize>],
    ) {
        for (v, target) in vehicles.iter().zip(choice) {
            self.targets[period][v.vehicle] = Some(match target {
                Some(slot) => {
                    self.arrivals[period][*slot] += 1;
                    Target::Rsu(self.rsu_cells[*slot])
                }
                None => Target::Cellular,
            });
        }
    }

    fn finish(self) -> Assignment {
        Assignment {
            rsu_cells: self.rsu_cells,
            targets: self.targets,
            arrivals: self.arrivals,
        }
    }
}

// ---------------------------------------------------------------------------
// Assignment evaluation
// ---------------------------------------------------------------------------

/// Cumulative delay of each vehicle over all periods. RSU targets pay the
/// link delay at the assignment's arrival counts, cellular targets pay the
/// constant fallback, absent periods contribute nothing.
pub fn per_vehicle_delays(
    scenario: &GridScenario,
    assignment: &Assignment,
    params: &LinkBudgetParams,
    q: &QueueParams,
) -> Vec<f64> {
    let mut totals = vec![0.0; scenario.num_vehicles()];
    for period in 0..scenario.num_periods {
        for (vehicle, target) in assignment.targets[period].iter().enumerate() {
            let Some(target) = target else { continue };
            let cell = scenario.traces[vehicle].positions[period].expect("present vehicle");
            totals[vehicle] += match target {
                Target::Rsu(rsu_cell) => {
                    let arrivals = assignment.arrivals_at(period, *rsu_cell);
                    crate::radio::link_delay(scenario, params, q, cell, *rsu_cell, arrivals)
                        .seconds_or(params.cellular_delay_s)
                }
                Target::Cellular => params.cellular_delay_s,
            };
        }
    }
    totals
}

/// Total latency of the assignment, summed over vehicles and periods.
pub fn total_assignment_delay(
    scenario: &GridScenario,
    assignment: &Assignment,
    params: &LinkBudgetParams,
    q: &QueueParams,
) -> f64 {
    per_vehicle_delays(scenario, assignment, params, q).iter().sum()
}

/// Per-period standard deviation of per-RSU loads, averaged over periods.
/// `num_rsus` must match the assignment's deployed RSU count and be at least
/// one.
pub fn load_balance(assignment: &Assignment, num_rsus: usize) -> Result<f64> {
    if num_rsus == 0 {
        return Err(Error::UndefinedInput(
            "load_balance is undefined for zero RSUs".into(),
        ));
    }
    if num_rsus != assignment.rsu_cells.len() {
        return Err(Error::Validation(format!(
            "num_rsus = {num_rsus} but the assignment deploys {}",
            assignment.rsu_cells.len()
        )));
    }
    let per_period: Vec<f64> = assignment
        .arrivals
        .iter()
        .map(|loads| {
            let mean = loads.iter().sum::<usize>() as f64 / num_rsus as f64;
            let var = loads
                .iter()
                .map(|&l| (l as f64 - mean).powi(2))
                .sum::<f64>()
                / num_rsus as f64;
            var.sqrt()
        })
        .collect();
    Ok(per_period.iter().sum::<f64>() / per_period.len() as f64)
}

/// True when no single vehicle can strictly reduce the total delay by
/// unilaterally switching to another in-range RSU or to cellular (the
/// sequential game's stability condition).
pub fn one_deviation_stable(
    scenario: &GridScenario,
    assignment: &Assignment,
    params: &LinkBudgetParams,
    q: &QueueParams,
) -> bool {
    let base = total_assignment_delay(scenario, assignment, params, q);
    for period in 0..scenario.num_periods {
        for vehicle in 0..scenario.num_vehicles() {
            let Some(current) = assignment.targets[period][vehicle] else {
                continue;
            };
            let cell = scenario.traces[vehicle].positions[period].expect("present vehicle");
            let mut options: Vec<Target> = assignment
                .rsu_cells
                .iter()
                .filter(|&&rsu| scenario.dist(cell, rsu) <= scenario.coverage_radius_m)
                .map(|&rsu| Target::Rsu(rsu))
                .collect();
            options.push(Target::Cellular);
            for option in options {
                if option == current {
                    continue;
                }
                let mut variant = assignment.clone();
                retarget(&mut variant, period, vehicle, option);
                let cost = total_assignment_delay(scenario, &variant, params, q);
                if cost < base - 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

fn retarget(assignment: &mut Assignment, period: usize, vehicle: usize, target: Target) {
    if let Some(Target::Rsu(old)) = assignment.targets[period][vehicle] {
        let slot = assignment.rsu_cells.binary_search(&old).unwrap();
        assignment.arrivals[period][slot] -= 1;
    }
    if let Target::Rsu(new) = target {
        let slot = assignment.rsu_cells.binary_search(&new).unwrap();
        assignment.arrivals[period][slot] += 1;
    }
    assignment.targets[period][vehicle] = Some(target);
}
