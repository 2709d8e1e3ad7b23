//! Epsilon-level constraint handling: the relaxed comparison rule and the
//! per-generation epsilon schedule.

use crate::objectives::ObjectiveVector;

use super::{EvolverConfig, Individual};

/// Outcome of a pairwise epsilon-level comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    ABetter,
    BBetter,
    Incomparable,
}

/// Per-island schedule state.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonState {
    pub epsilon: f64,
    /// Maximum overall violation seen so far.
    pub phi_max: f64,
    /// Feasible ratio of the current generation.
    pub rho: f64,
}

/// Epsilon-level comparison: violations at or below `eps` are treated as
/// feasible and compared by Pareto dominance; equal violations also fall
/// back to dominance; otherwise the smaller violation wins. With `eps = 0`
/// this is the classic feasibility-first constrained dominance.
pub fn epsilon_compare(a: &Individual, b: &Individual, eps: f64) -> Preference {
    compare_scored(
        &a.objectives,
        a.violation.phi,
        &b.objectives,
        b.violation.phi,
        eps,
    )
}

pub(crate) fn compare_scored(
    a: &ObjectiveVector,
    phi_a: f64,
    b: &ObjectiveVector,
    phi_b: f64,
    eps: f64,
) -> Preference {
    if (phi_a <= eps && phi_b <= eps) || phi_a == phi_b {
        if a.dominates(b) {
            Preference::ABetter
        } else if b.dominates(a) {
            Preference::BBetter
        } else {
            Preference::Incomparable
        }
    } else if phi_a < phi_b {
        Preference::ABetter
    } else {
        Preference::BBetter
    }
}

/// Schedule rule 1: the initial epsilon is the violation sum of the theta
/// members with the smallest violations.
pub fn epsilon_initial(phis: &[f64], theta: usize) -> f64 {
    let mut sorted = phis.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.iter().take(theta).sum()
}

/// Schedule rules 2-4 for generations `g >= 1`: shrink geometrically while
/// the feasible ratio is below alpha, rebound to `(1 + tau) * phi_max` once
/// enough of the island is feasible, and drop to exactly zero from
/// generation `G` on.
pub fn epsilon_update(state: &EpsilonState, g: usize, config: &EvolverConfig) -> f64 {
    if g >= config.generations {
        0.0
    } else if state.rho < config.alpha {
        (1.0 - config.tau) * state.epsilon
    } else {
        (1.0 + config.tau) * state.phi_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Deployment, ObjectiveVector, ViolationReport};

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
    fn feasible_beats_infeasible_at_eps_zero() {
        let a = indiv([5.0, 5.0, 5.0], 0.0);
        let b = indiv([1.0, 1.0, 1.0], 5.0);
        assert_eq!(epsilon_compare(&a, &b, 0.0), Preference::ABetter);
        assert_eq!(epsilon_compare(&b, &a, 0.0), Preference::BBetter);
    }

    #[test]
    fn both_under_eps_fall_back_to_dominance() {
        let a = indiv([1.0, 1.0, 1.0], 2.0);
        let b = indiv([2.0, 2.0, 2.0], 3.0);
        assert_eq!(epsilon_compare(&a, &b, 10.0), Preference::ABetter);

        let c = indiv([1.0, 3.0, 1.0], 2.0);
        let d = indiv([2.0, 2.0, 2.0], 3.0);
        assert_eq!(epsilon_compare(&c, &d, 10.0), Preference::Incomparable);
    }

    #[test]
    fn above_eps_smaller_violation_wins() {
        let a = indiv([1.0, 1.0, 1.0], 4.0);
        let b = indiv([9.0, 9.0, 9.0], 2.0);
        assert_eq!(epsilon_compare(&a, &b, 1.0), Preference::BBetter);
    }

    #[test]
    fn equal_violations_use_dominance() {
        let a = indiv([1.0, 1.0, 1.0], 7.0);
        let b = indiv([2.0, 2.0, 2.0], 7.0);
        assert_eq!(epsilon_compare(&a, &b, 1.0), Preference::ABetter);
    }

    #[test]
    fn comparison_is_asymmetric() {
        let mut rng = crate::rng::stream(&[55]);
        use rand::Rng;
        for _ in 0..500 {
            let a = indiv(
                [rng.random(), rng.random(), rng.random::<f64>() * 4.0],
                if rng.random::<f64>() < 0.4 { 0.0 } else { rng.random::<f64>() * 8.0 },
            );
            let b = indiv(
                [rng.random(), rng.random(), rng.random::<f64>() * 4.0],
                if rng.random::<f64>() < 0.4 { 0.0 } else { rng.random::<f64>() * 8.0 },
            );
            for eps in [0.0, 2.5] {
                let fwd = epsilon_compare(&a, &b, eps);
                let rev = epsilon_compare(&b, &a, eps);
                match fwd {
                    Preference::ABetter => assert_eq!(rev, Preference::BBetter),
                    Preference::BBetter => assert_eq!(rev, Preference::ABetter),
                    Preference::Incomparable => assert_eq!(rev, Preference::Incomparable),
                }
            }
        }
    }

    #[test]
    fn agrees_with_plain_dominance_when_feasible() {
        let mut rng = crate::rng::stream(&[56]);
        use rand::Rng;
        for _ in 0..200 {
            let a = indiv([rng.random(), rng.random(), rng.random::<f64>() * 4.0], 0.0);
            let b = indiv([rng.random(), rng.random(), rng.random::<f64>() * 4.0], 0.0);
            let expected = if a.objectives.dominates(&b.objectives) {
                Preference::ABetter
            } else if b.objectives.dominates(&a.objectives) {
                Preference::BBetter
            } else {
                Preference::Incomparable
            };
            assert_eq!(epsilon_compare(&a, &b, 0.0), expected);
        }
    }

    #[test]
    fn schedule_rules() {
        // Rule 1: sum of the two smallest violations.
        assert_eq!(epsilon_initial(&[1.0, 3.0, 5.0], 2), 4.0);
        // theta larger than the population sums everything.
        assert_eq!(epsilon_initial(&[1.0, 3.0], 5), 4.0);

        let config = EvolverConfig::default();
        // Rule 2: geometric shrink while rho < alpha.
        let state = EpsilonState {
            epsilon: 4.0,
            phi_max: 50.0,
            rho: 0.5,
        };
        assert!((epsilon_update(&state, 10, &config) - 3.6).abs() < 1e-12);
        // Rule 3: rebound once rho >= alpha.
        let relaxed = EpsilonState {
            epsilon: 4.0,
            phi_max: 50.0,
            rho: 0.99,
        };
        assert!((epsilon_update(&relaxed, 10, &config) - 55.0).abs() < 1e-12);
        // Rule 4: zero at and after G.
        assert_eq!(epsilon_update(&state, config.generations, &config), 0.0);
        assert_eq!(epsilon_update(&state, config.generations + 7, &config), 0.0);
    }

    #[test]
    fn rule_two_is_monotone_decreasing() {
        let config = EvolverConfig::default();
        let mut state = EpsilonState {
            epsilon: 100.0,
            phi_max: 500.0,
            rho: 0.0,
        };
        for g in 1..config.generations {
            let next = epsilon_update(&state, g, &config);
            assert!(next <= state.epsilon);
            assert!(next >= 0.0);
            state.epsilon = next;
        }
    }
}
