//! Core library for multi-objective roadside-unit (RSU) deployment on gridded
//! urban maps.
//!
//! The pipeline: a [`scenario::GridScenario`] describes the world (grid,
//! obstacles, vehicle traces, latency-sensitive areas); [`radio`] computes
//! per-link transmission and M/M/1 queuing delays; [`offloading`] assigns each
//! vehicle to an RSU or the cellular fallback (best-response game plus three
//! baselines); [`objectives`] turns a candidate deployment into a three-way
//! objective vector and constraint-violation report; [`evolver`] runs the
//! island-model NSGA-III with epsilon-level constraint handling, adaptive
//! operator rates and optional offspring calibration; [`metrics`] scores the
//! resulting fronts (NPS/NFS, IGD, hypervolume, spacing).

pub mod error;
pub mod evolver;
pub mod metrics;
pub mod objectives;
pub mod offloading;
pub mod radio;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
