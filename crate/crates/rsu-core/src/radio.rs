//! Per-link delay model: free-space path loss, seeded log-normal shadowing,
//! Shannon-rate transmission delay and M/M/1 queuing delay.
//!
//! Everything here is a pure function of its inputs. Shadowing samples are
//! drawn from a stream keyed by `(shadow_seed, vehicle cell, RSU cell)` so a
//! given link sees the same attenuation in every evaluation.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::{self, domain};
use crate::scenario::GridScenario;

/// Radio-link constants. Defaults follow the simulation set-up: 1 Mb packets,
/// 10 MHz bandwidth, 23 dBm transmit power, -174 dBm/Hz noise density,
/// 5.9 GHz carrier, 4 dB shadowing deviation, 2 s cellular fallback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkBudgetParams {
    pub packet_bits: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm_per_hz: f64,
    pub carrier_hz: f64,
    pub shadow_sigma_db: f64,
    pub cellular_delay_s: f64,
    pub shadow_seed: u64,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        LinkBudgetParams {
            packet_bits: 1e6,
            bandwidth_hz: 1e7,
            tx_power_dbm: 23.0,
            noise_dbm_per_hz: -174.0,
            carrier_hz: 5.9e9,
            shadow_sigma_db: 4.0,
            cellular_delay_s: 2.0,
            shadow_seed: 0,
        }
    }
}

/// What an RSU does when its queue saturates (arrivals >= service rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaturationPolicy {
    /// Charge a fixed delay; an overloaded RSU is never better than cellular.
    Penalty(f64),
    /// Tell the caller to route the vehicle through the cellular network.
    Cellular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QueueParams {
    /// Service rate in packets per period.
    pub service_rate: f64,
    pub saturation_policy: SaturationPolicy,
}

impl Default for QueueParams {
    fn default() -> Self {
        QueueParams {
            service_rate: 20.0,
            saturation_policy: SaturationPolicy::Penalty(2.0),
        }
    }
}

/// Result of a delay computation that may defer to the cellular fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayOutcome {
    Seconds(f64),
    /// Queue saturated under [`SaturationPolicy::Cellular`].
    ToCellular,
}

impl DelayOutcome {
    /// Collapses to plain seconds, substituting `cellular_delay_s` for the
    /// cellular route.
    pub fn seconds_or(self, cellular_delay_s: f64) -> f64 {
        match self {
            DelayOutcome::Seconds(s) => s,
            DelayOutcome::ToCellular => cellular_delay_s,
        }
    }
}

/// Free-space path loss in dB: `20 log10(dis) + 20 log10(f) - 147.55`.
pub fn free_space_path_loss(dis_m: f64, carrier_hz: f64) -> f64 {
    assert!(dis_m > 0.0, "distance must be positive (callers clamp to 1 m)");
    assert!(carrier_hz > 0.0, "carrier frequency must be positive");
    20.0 * dis_m.log10() + 20.0 * carrier_hz.log10() - 147.55
}

/// Log-normal shadowing attenuation in dB: `10 * sigma * z` for a standard
/// normal sample `z`.
pub fn shadowing_loss(sigma_db: f64, z: f64) -> f64 {
    10.0 * sigma_db * z
}

/// The standard normal sample used for the `(vehicle cell, RSU cell)` link.
pub fn shadow_sample(params: &LinkBudgetParams, vehicle_cell: usize, rsu_cell: usize) -> f64 {
    let mut rng = rng::stream(&[
        domain::SHADOW,
        params.shadow_seed,
        vehicle_cell as u64,
        rsu_cell as u64,
    ]);
    rng.sample(StandardNormal)
}

/// Total link attenuation in dB: free-space loss at the clamped distance plus
/// shadowing when an obstacle cell lies on the segment between the two cell
/// centers.
pub fn path_loss_db(
    scenario: &GridScenario,
    params: &LinkBudgetParams,
    vehicle_cell: usize,
    rsu_cell: usize,
) -> f64 {
    let dis = scenario.dist(vehicle_cell, rsu_cell).max(1.0);
    let mut loss = free_space_path_loss(dis, params.carrier_hz);
    if scenario.obstacle_between(vehicle_cell, rsu_cell) {
        let z = shadow_sample(params, vehicle_cell, rsu_cell);
        loss += shadowing_loss(params.shadow_sigma_db, z);
    }
    loss
}

/// Shannon rate in bits/s for the given total loss, using the standard dB
/// link budget: received power = tx - loss, noise = density + 10 log10(B).
pub fn transmission_rate(params: &LinkBudgetParams, loss_db: f64) -> f64 {
    let received_dbm = params.tx_power_dbm - loss_db;
    let noise_dbm = params.noise_dbm_per_hz + 10.0 * params.bandwidth_hz.log10();
    let snr = 10f64.powf((received_dbm - noise_dbm) / 10.0);
    // ln_1p keeps the rate strictly positive even when snr underflows 1+snr.
    params.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

/// Packet transmission time. A non-positive rate marks an unreachable link;
/// the caller falls back to cellular.
pub fn transmission_delay(packet_bits: f64, rate_bits_per_s: f64) -> f64 {
    if rate_bits_per_s <= 0.0 {
        return f64::INFINITY;
    }
    packet_bits / rate_bits_per_s
}

/// Mean M/M/1 sojourn time `1 / (mu - lambda)`, with the configured policy
/// applied once arrivals reach the service rate. Output is always finite.
pub fn queuing_delay(q: &QueueParams, arrivals: usize) -> DelayOutcome {
    let lambda = arrivals as f64;
    if lambda < q.service_rate {
        DelayOutcome::Seconds(1.0 / (q.service_rate - lambda))
    } else {
        match q.saturation_policy {
            SaturationPolicy::Penalty(penalty_s) => DelayOutcome::Seconds(penalty_s),
            SaturationPolicy::Cellular => DelayOutcome::ToCellular,
        }
    }
}

/// Transmission delay over the link plus queuing delay at the RSU.
pub fn link_delay(
    scenario: &GridScenario,
    params: &LinkBudgetParams,
    q: &QueueParams,
    vehicle_cell: usize,
    rsu_cell: usize,
    arrivals_at_rsu: usize,
) -> DelayOutcome {
    let trans = link_transmission_delay(scenario, params, vehicle_cell, rsu_cell);
    match queuing_delay(q, arrivals_at_rsu) {
        DelayOutcome::Seconds(queue) => DelayOutcome::Seconds(trans + queue),
        DelayOutcome::ToCellular => DelayOutcome::ToCellular,
    }
}

/// Just the transmission component of [`link_delay`].
pub fn link_transmission_delay(
    scenario: &GridScenario,
    params: &LinkBudgetParams,
    vehicle_cell: usize,
    rsu_cell: usize,
) -> f64 {
    let loss = path_loss_db(scenario, params, vehicle_cell, rsu_cell);
    transmission_delay(params.packet_bits, transmission_rate(params, loss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::GridScenario;

    fn open_grid(n: usize, cell: f64) -> GridScenario {
        GridScenario::new(n, n, cell, vec![false; n * n], vec![], vec![], 30.0, 1, 300.0)
            .unwrap()
    }

    #[test]
    fn fspl_reference_values() {
        let at1 = free_space_path_loss(1.0, 5.9e9);
        let at100 = free_space_path_loss(100.0, 5.9e9);
        assert!((at1 - 47.867).abs() < 0.01, "1 m: {at1}");
        assert!((at100 - 87.867).abs() < 0.01, "100 m: {at100}");
        // One decade of distance adds exactly 20 dB.
        let at1000 = free_space_path_loss(1000.0, 5.9e9);
        assert!((at1000 - at100 - 20.0).abs() < 1e-9);
    }

    #[test]
    #[should_panic]
    fn fspl_rejects_zero_distance() {
        free_space_path_loss(0.0, 5.9e9);
    }

    #[test]
    fn shadowing_is_linear_in_z() {
        assert_eq!(shadowing_loss(4.0, 0.0), 0.0);
        assert_eq!(shadowing_loss(4.0, 1.0), 40.0);
        assert_eq!(shadowing_loss(4.0, -0.5), -20.0);
    }

    #[test]
    fn rate_matches_linear_domain_budget() {
        let params = LinkBudgetParams::default();
        let loss = 87.867;
        // Independent route: work entirely in milliwatts.
        let rx_mw = 10f64.powf((params.tx_power_dbm - loss) / 10.0);
        let noise_mw = 10f64.powf(params.noise_dbm_per_hz / 10.0) * params.bandwidth_hz;
        let expected = params.bandwidth_hz * (1.0 + rx_mw / noise_mw).log2();
        let got = transmission_rate(&params, loss);
        assert!((got - expected).abs() < 1e-6 * expected);
        assert!((got - 1.30e8).abs() < 0.02 * 1.30e8, "rate {got}");
    }

    #[test]
    fn rate_vanishes_and_is_monotone() {
        let params = LinkBudgetParams::default();
        assert!(transmission_rate(&params, 1000.0) < 1.0);
        let mut prev = f64::INFINITY;
        for loss in [40.0, 60.0, 80.0, 100.0, 150.0, 300.0] {
            let r = transmission_rate(&params, loss);
            assert!(r > 0.0 && r < prev);
            prev = r;
        }
    }

    #[test]
    fn transmission_delay_cases() {
        assert_eq!(transmission_delay(1e6, 1e6), 1.0);
        let params = LinkBudgetParams::default();
        let rate = transmission_rate(&params, 87.867);
        let d = transmission_delay(1e6, rate);
        assert!((d - 7.7e-3).abs() < 0.02 * 7.7e-3, "delay {d}");
        assert_eq!(transmission_delay(2e6, 1e6), 2.0 * transmission_delay(1e6, 1e6));
        assert_eq!(transmission_delay(1e6, 0.0), f64::INFINITY);
    }

    #[test]
    fn queue_delay_cases() {
        let q = QueueParams::default();
        assert_eq!(queuing_delay(&q, 10), DelayOutcome::Seconds(0.1));
        assert_eq!(queuing_delay(&q, 0), DelayOutcome::Seconds(0.05));
        assert_eq!(queuing_delay(&q, 20), DelayOutcome::Seconds(2.0));
        assert_eq!(queuing_delay(&q, 35), DelayOutcome::Seconds(2.0));
        let route = QueueParams {
            saturation_policy: SaturationPolicy::Cellular,
            ..QueueParams::default()
        };
        assert_eq!(queuing_delay(&route, 20), DelayOutcome::ToCellular);
        // Never infinite.
        for arrivals in 0..60 {
            match queuing_delay(&q, arrivals) {
                DelayOutcome::Seconds(s) => assert!(s.is_finite() && s > 0.0),
                DelayOutcome::ToCellular => {}
            }
        }
    }

    #[test]
    fn link_delay_same_cell_composes_parts() {
        let s = open_grid(4, 20.0);
        let params = LinkBudgetParams::default();
        let q = QueueParams::default();
        let loss = free_space_path_loss(1.0, params.carrier_hz); // clamped floor
        let expected =
            transmission_delay(params.packet_bits, transmission_rate(&params, loss)) + 0.05;
        match link_delay(&s, &params, &q, 5, 5, 0) {
            DelayOutcome::Seconds(d) => assert!((d - expected).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn link_delay_deterministic_and_monotone_in_distance() {
        let s = open_grid(10, 20.0);
        let params = LinkBudgetParams {
            shadow_seed: 42,
            ..LinkBudgetParams::default()
        };
        let q = QueueParams::default();
        let a = link_delay(&s, &params, &q, 0, 7, 3);
        let b = link_delay(&s, &params, &q, 0, 7, 3);
        assert_eq!(a, b);
        // No obstacles, so delay grows with distance along a row.
        let mut prev = 0.0;
        for rsu in 1..10 {
            let d = link_delay(&s, &params, &q, 0, rsu, 0).seconds_or(2.0);
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn obstructed_link_applies_shadowing() {
        let mut mask = vec![false; 25];
        mask[12] = true; // center of a 5x5 grid
        let blocked =
            GridScenario::new(5, 5, 20.0, mask, vec![], vec![], 30.0, 1, 300.0).unwrap();
        let clear = open_grid(5, 20.0);
        let params = LinkBudgetParams {
            shadow_seed: 7,
            ..LinkBudgetParams::default()
        };
        let z = shadow_sample(&params, 10, 14);
        assert_ne!(z, 0.0);
        let with = path_loss_db(&blocked, &params, 10, 14);
        let without = path_loss_db(&clear, &params, 10, 14);
        assert!((with - without - shadowing_loss(params.shadow_sigma_db, z)).abs() < 1e-9);
    }
}
