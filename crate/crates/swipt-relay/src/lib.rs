//! Deterministic simulator and flight-time optimizer for a rotary-wing UAV
//! relaying data from a disaster-area network (NET1) to a base station
//! (NET2), with optional power-splitting SWIPT energy harvesting on the
//! uplink.
//!
//! The crate is organized along the pipeline:
//!
//! * [`deployment`] scatters NET1 users by a seeded Poisson point process;
//! * [`channel`] turns geometry into LOS probabilities, link budgets, rates
//!   and collection times;
//! * [`uav_power`] models rotary-wing propulsion power and cycle energy;
//! * [`swipt`] holds the power-splitting receiver math and the battery law;
//! * [`scenario`] composes full relay cycles (plain scenario A, harvesting
//!   scenario B) and answers capacity questions;
//! * [`optimizer`] reduces the mission to a small program over the
//!   harvesting parameters and solves it three independent ways;
//! * [`config`] and [`experiment`] provide the flat config schema and the
//!   seeded, reproducible sweep/figure harness behind the CLI.
//!
//! Everything is seeded: equal inputs give byte-equal outputs.

pub mod channel;
pub mod config;
pub mod deployment;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod scenario;
pub mod swipt;
pub mod uav_power;

pub use config::Config;
pub use error::{Error, Result};
pub use scenario::{CycleReport, MissionConfig, Scenario};
