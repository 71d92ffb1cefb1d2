//! Relay-cycle composition.
//!
//! One cycle: the UAV hovers over NET1 and collects a fixed amount of data
//! from every user, credits any harvested energy, flies to NET2, and
//! delivers to the base station. Scenario A is the plain relay; scenario B
//! adds power-splitting energy harvesting on the uplink. Feasibility walks
//! the battery through the ordered phases collect, move, deliver and
//! requires it never to dip below zero.

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelModel};
use crate::deployment::{sample_users, Region, UserDeployment};
use crate::error::{Error, Result};
use crate::swipt::{BatteryLaw, HarvestAccounting, SwiptConfig, ThresholdPolicy};
use crate::uav_power::{mission_energy, moving_time, EnergyLedger, UavAero};

/// Which relay scenario a cycle runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Plain relay without energy harvesting.
    A,
    /// Power-splitting SWIPT relay.
    B,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::A => write!(f, "A"),
            Scenario::B => write!(f, "B"),
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Scenario::A),
            "B" | "b" => Ok(Scenario::B),
            other => Err(Error::Config(format!(
                "unknown scenario `{other}` (expected A or B)"
            ))),
        }
    }
}

/// Geometry, traffic and transmit-power parameters of one mission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionConfig {
    /// Hover altitude over NET1, m.
    pub altitude_net1: f64,
    /// Hover altitude over NET2; doubles as the UAV-to-BS distance, m.
    pub altitude_net2: f64,
    /// Straight-line distance between the two hover points, m.
    pub inter_network_distance: f64,
    /// Data collected from (and delivered for) each user, bits.
    pub data_threshold: f64,
    /// NET1 user density, users/m².
    pub user_density: f64,
    pub region: Region,
    /// Transmit power of each NET1 uplink user, W.
    pub p_t_users: f64,
    /// Transmit power of the UAV on the downlink, W.
    pub p_t_uav: f64,
    pub seed: u64,
}

impl MissionConfig {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 7] = [
            (
                "altitude_net1",
                self.altitude_net1,
                self.altitude_net1 > 0.0 && self.altitude_net1.is_finite(),
            ),
            (
                "altitude_net2",
                self.altitude_net2,
                self.altitude_net2 > 0.0 && self.altitude_net2.is_finite(),
            ),
            (
                "inter_network_distance",
                self.inter_network_distance,
                self.inter_network_distance >= 0.0 && self.inter_network_distance.is_finite(),
            ),
            (
                "data_threshold",
                self.data_threshold,
                self.data_threshold >= 0.0 && self.data_threshold.is_finite(),
            ),
            (
                "user_density",
                self.user_density,
                self.user_density >= 0.0 && self.user_density.is_finite(),
            ),
            ("p_t_users", self.p_t_users, self.p_t_users >= 0.0),
            ("p_t_uav", self.p_t_uav, self.p_t_uav >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "outside the valid mission domain",
                });
            }
        }
        Ok(())
    }

    /// Deployment drawn from this mission's density, region, altitude, seed.
    pub fn deploy(&self) -> Result<UserDeployment> {
        sample_users(
            self.user_density,
            &self.region,
            self.altitude_net1,
            self.seed,
        )
    }
}

/// Link outcome for one served user.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerUserReport {
    pub slant_range: f64,
    pub rate: f64,
    pub collection_time: f64,
    pub harvested_energy: f64,
}

/// Everything one relay cycle produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub scenario: Scenario,
    pub user_count: usize,
    pub per_user: Vec<PerUserReport>,
    /// Delivery time to the NET2 base station, s.
    pub t_bs: f64,
    pub ledger: EnergyLedger,
    pub battery_before: f64,
    pub battery_after: f64,
    pub feasible: bool,
}

impl CycleReport {
    pub fn total_harvested(&self) -> f64 {
        self.per_user.iter().map(|u| u.harvested_energy).sum()
    }

    pub fn total_rate(&self) -> f64 {
        self.per_user.iter().map(|u| u.rate).sum()
    }
}

/// Run one relay cycle on a freshly sampled deployment.
pub fn run_cycle(
    mission: &MissionConfig,
    channel: &ChannelModel,
    aero: &UavAero,
    swipt: &SwiptConfig,
    scenario: Scenario,
) -> Result<CycleReport> {
    let deployment = mission.deploy()?;
    cycle_with_deployment(mission, channel, aero, swipt, scenario, &deployment)
}

/// Run one relay cycle on an explicit deployment (used for prefix searches).
pub fn cycle_with_deployment(
    mission: &MissionConfig,
    channel: &ChannelModel,
    aero: &UavAero,
    swipt: &SwiptConfig,
    scenario: Scenario,
    deployment: &UserDeployment,
) -> Result<CycleReport> {
    mission.validate()?;
    channel.validate()?;
    aero.validate()?;
    swipt.validate()?;

    let split = match scenario {
        Scenario::A => None,
        Scenario::B => Some(swipt.eta_ps),
    };

    let mut per_user = Vec::with_capacity(deployment.len());
    let mut collection_times = Vec::with_capacity(deployment.len());
    for &slant in &deployment.slant_ranges {
        let budget = channel::uplink_budget(
            channel,
            mission.p_t_users,
            mission.altitude_net1,
            slant,
            split,
        )?;
        let t_k = channel::collection_time(mission.data_threshold, budget.rate)?;
        let harvested_energy = match scenario {
            Scenario::A => 0.0,
            Scenario::B => {
                let harvested_power =
                    crate::swipt::harvested_power_ps(swipt.eta_ps, budget.received_power);
                match swipt.harvest_accounting {
                    HarvestAccounting::CycleDuration => harvested_power * swipt.cycle_duration,
                    HarvestAccounting::CollectionTime => harvested_power * t_k,
                }
            }
        };
        per_user.push(PerUserReport {
            slant_range: slant,
            rate: budget.rate,
            collection_time: t_k,
            harvested_energy,
        });
        collection_times.push(t_k);
    }

    let bs_budget = channel::downlink_budget(channel, mission.p_t_uav, mission.altitude_net2)?;
    let t_bs = channel::collection_time(mission.data_threshold, bs_budget.rate)?;
    let t_moving = moving_time(mission.inter_network_distance, aero.cruise_speed)?;
    let ledger = mission_energy(&collection_times, t_bs, t_moving, aero);

    let harvest_total: f64 = per_user.iter().map(|u| u.harvested_energy).sum();
    let battery = BatteryWalk::new(scenario, swipt, &ledger, harvest_total);

    Ok(CycleReport {
        scenario,
        user_count: deployment.len(),
        per_user,
        t_bs,
        ledger,
        battery_before: swipt.battery_initial,
        battery_after: battery.after,
        feasible: battery.feasible,
    })
}

/// Battery trajectory through collect, credit, move, deliver.
struct BatteryWalk {
    after: f64,
    feasible: bool,
}

impl BatteryWalk {
    fn new(scenario: Scenario, swipt: &SwiptConfig, ledger: &EnergyLedger, harvest: f64) -> Self {
        let before = swipt.battery_initial;
        match scenario {
            // Raw consumption, no harvest.
            Scenario::A => {
                let b1 = before - ledger.e_net1;
                let b2 = b1 - ledger.e_moving;
                let b3 = b2 - ledger.e_net2;
                BatteryWalk {
                    after: before - ledger.e_total,
                    feasible: b1 >= 0.0 && b2 >= 0.0 && b3 >= 0.0,
                }
            }
            // The battery law drives the debits; the harvest is credited
            // after the collection phase, before the move.
            Scenario::B => {
                let e_threshold = match swipt.threshold_policy {
                    ThresholdPolicy::Fixed => swipt.e_threshold,
                    ThresholdPolicy::CycleEnergy => ledger.e_total,
                };
                let (debit_scale, credit, after_raw) = match swipt.battery_law {
                    BatteryLaw::EfficiencyOnNet => (
                        swipt.eta_bat,
                        swipt.eta_bat * harvest,
                        before + swipt.eta_bat * (harvest - e_threshold),
                    ),
                    BatteryLaw::EfficiencyOnHarvest => (
                        1.0,
                        swipt.eta_bat * harvest,
                        before + swipt.eta_bat * harvest - e_threshold,
                    ),
                };
                // Distribute the threshold debit across the phases in
                // proportion to the actual consumption profile.
                let (s1, s2, s3) = if ledger.e_total > 0.0 {
                    (
                        ledger.e_net1 / ledger.e_total,
                        ledger.e_moving / ledger.e_total,
                        ledger.e_net2 / ledger.e_total,
                    )
                } else {
                    (1.0, 0.0, 0.0)
                };
                let cap = |level: f64| match swipt.battery_capacity {
                    Some(c) => level.min(c),
                    None => level,
                };
                let b1 = before - debit_scale * s1 * e_threshold;
                let b_credit = cap(b1 + credit);
                let b2 = b_credit - debit_scale * s2 * e_threshold;
                let b3 = b2 - debit_scale * s3 * e_threshold;
                BatteryWalk {
                    after: cap(after_raw),
                    feasible: b1 >= 0.0 && b2 >= 0.0 && b3 >= 0.0,
                }
            }
        }
    }
}

/// Largest user count the relay can serve in one feasible cycle.
///
/// Users are placed deterministically by the mission seed, sorted by slant
/// range, and served as a prefix; serving a longer prefix costs at least as
/// much, so feasibility is monotone in the prefix length and a binary search
/// finds the boundary.
pub fn max_users_served(
    mission: &MissionConfig,
    channel: &ChannelModel,
    aero: &UavAero,
    swipt: &SwiptConfig,
    scenario: Scenario,
) -> Result<usize> {
    let pool = mission.deploy()?.sorted_by_slant_range();
    let feasible = |n: usize| -> Result<bool> {
        let report =
            cycle_with_deployment(mission, channel, aero, swipt, scenario, &pool.prefix(n))?;
        Ok(report.feasible)
    };

    if !feasible(0)? {
        return Ok(0);
    }
    let mut lo = 0usize;
    let mut hi = pool.len();
    if feasible(hi)? {
        return Ok(hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest hover altitude within `bounds` at which a full cycle serving all
/// users stays feasible, found by bisection to within `tol` meters.
///
/// Both hover altitudes are driven together. Returns `None` when even the
/// lower bound is infeasible.
pub fn max_feasible_altitude(
    mission: &MissionConfig,
    channel: &ChannelModel,
    aero: &UavAero,
    swipt: &SwiptConfig,
    scenario: Scenario,
    bounds: (f64, f64),
    tol: f64,
) -> Result<Option<f64>> {
    let (lo_bound, hi_bound) = bounds;
    if !(lo_bound > 0.0 && hi_bound >= lo_bound && tol > 0.0) {
        return Err(Error::Config(format!(
            "invalid altitude bounds ({lo_bound}, {hi_bound}) or tolerance {tol}"
        )));
    }
    let feasible_at = |h: f64| -> Result<bool> {
        let mut at_altitude = mission.clone();
        at_altitude.altitude_net1 = h;
        at_altitude.altitude_net2 = h;
        match run_cycle(&at_altitude, channel, aero, swipt, scenario) {
            Ok(report) => Ok(report.feasible),
            Err(Error::UnreachableUser { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };

    if !feasible_at(lo_bound)? {
        return Ok(None);
    }
    if feasible_at(hi_bound)? {
        return Ok(Some(hi_bound));
    }
    let mut lo = lo_bound;
    let mut hi = hi_bound;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swipt::BatteryLaw;

    fn test_mission(seed: u64) -> MissionConfig {
        MissionConfig {
            altitude_net1: 800.0,
            altitude_net2: 800.0,
            inter_network_distance: 5000.0,
            data_threshold: 4e5,
            user_density: 3e-5,
            region: Region::new(1000.0).unwrap(),
            p_t_users: 5.0,
            p_t_uav: 3.0,
            seed,
        }
    }

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn empty_network_cycle_only_moves_and_delivers() {
        let mut mission = test_mission(1);
        mission.user_density = 0.0;
        let report = run_cycle(
            &mission,
            &ChannelModel::default(),
            &UavAero::default(),
            &SwiptConfig::default(),
            Scenario::A,
        )
        .unwrap();
        assert_eq!(report.user_count, 0);
        assert_eq!(report.ledger.e_net1, 0.0);
        assert_eq!(report.ledger.t_total, report.ledger.t_moving + report.t_bs);
    }

    #[test]
    fn scenario_b_is_slower_but_follows_its_battery_law() {
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig {
            threshold_policy: ThresholdPolicy::Fixed,
            ..SwiptConfig::default()
        };
        for seed in 0..8 {
            let mission = test_mission(seed);
            let a = run_cycle(&mission, &channel, &aero, &swipt, Scenario::A).unwrap();
            let b = run_cycle(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
            assert!(b.ledger.t_total >= a.ledger.t_total);
            assert!(b.total_harvested() >= 0.0);
            // Scenario A drains raw consumption.
            assert_eq!(a.battery_after, a.battery_before - a.ledger.e_total);
            assert!(a.per_user.iter().all(|u| u.harvested_energy == 0.0));
            // Scenario B follows the efficiency-on-net battery law.
            let expected =
                b.battery_before + swipt.eta_bat * (b.total_harvested() - swipt.e_threshold);
            assert!(rel_close(b.battery_after, expected, 1e-12));
        }
    }

    #[test]
    fn degenerate_swipt_reproduces_scenario_a() {
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig {
            eta_ps: 0.0,
            eta_bat: 0.0,
            battery_law: BatteryLaw::EfficiencyOnHarvest,
            threshold_policy: ThresholdPolicy::CycleEnergy,
            ..SwiptConfig::default()
        };
        let mission = test_mission(17);
        let a = run_cycle(&mission, &channel, &aero, &swipt, Scenario::A).unwrap();
        let b = run_cycle(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
        assert_eq!(a.user_count, b.user_count);
        assert_eq!(a.per_user, b.per_user);
        assert_eq!(a.t_bs, b.t_bs);
        assert_eq!(a.ledger, b.ledger);
        assert_eq!(a.battery_before, b.battery_before);
        assert!(rel_close(b.battery_after, a.battery_after, 1e-12));
        assert_eq!(a.feasible, b.feasible);
    }

    #[test]
    fn cycle_report_serialization_is_deterministic() {
        let mission = test_mission(4);
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig::default();
        let a = run_cycle(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
        let b = run_cycle(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn t_total_and_e_total_strictly_increase_with_data_threshold() {
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig::default();
        let mut prev: Option<(f64, f64)> = None;
        for d_th in [1e5, 2e5, 4e5, 8e5] {
            let mut mission = test_mission(9);
            mission.data_threshold = d_th;
            let r = run_cycle(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
            if let Some((t, e)) = prev {
                assert!(r.ledger.t_total > t);
                assert!(r.ledger.e_total > e);
            }
            prev = Some((r.ledger.t_total, r.ledger.e_total));
        }
    }

    #[test]
    fn e_total_increases_with_altitude() {
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig::default();
        let mut prev: Option<f64> = None;
        for h in [500.0, 700.0, 900.0] {
            let mut mission = test_mission(9);
            mission.altitude_net1 = h;
            mission.altitude_net2 = h;
            let r = run_cycle(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
            if let Some(e) = prev {
                assert!(r.ledger.e_total > e);
            }
            prev = Some(r.ledger.e_total);
        }
    }

    #[test]
    fn max_users_zero_battery_serves_nobody() {
        let mission = test_mission(2);
        let swipt = SwiptConfig {
            battery_initial: 0.0,
            ..SwiptConfig::default()
        };
        let n = max_users_served(
            &mission,
            &ChannelModel::default(),
            &UavAero::default(),
            &swipt,
            Scenario::A,
        )
        .unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn max_users_scenario_b_beats_scenario_a() {
        // With the efficiency-on-net law the battery funds eta_bat times the
        // cycle energy, so harvesting serves more users despite the slower
        // split rates.
        let mission = test_mission(3);
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig {
            battery_initial: 3e8,
            ..SwiptConfig::default()
        };
        let a = max_users_served(&mission, &channel, &aero, &swipt, Scenario::A).unwrap();
        let b = max_users_served(&mission, &channel, &aero, &swipt, Scenario::B).unwrap();
        assert!(a > 0);
        assert!(b > a, "expected B ({b}) to serve more than A ({a})");
    }

    #[test]
    fn max_users_nondecreasing_in_transmit_power() {
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig {
            battery_initial: 3e8,
            ..SwiptConfig::default()
        };
        let mut prev = 0usize;
        for p_t in [1.0, 3.0, 5.0] {
            let mut mission = test_mission(3);
            mission.p_t_users = p_t;
            let n = max_users_served(&mission, &channel, &aero, &swipt, Scenario::A).unwrap();
            assert!(n >= prev, "p_t = {p_t}: {n} < {prev}");
            prev = n;
        }
    }

    #[test]
    fn max_users_prefix_feasibility_is_monotone() {
        let mission = test_mission(6);
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig {
            battery_initial: 3e8,
            ..SwiptConfig::default()
        };
        let pool = mission.deploy().unwrap().sorted_by_slant_range();
        let n = max_users_served(&mission, &channel, &aero, &swipt, Scenario::A).unwrap();
        assert!(
            n < pool.len(),
            "test config should not serve the whole pool"
        );
        for k in [0, n / 2, n] {
            let r = cycle_with_deployment(
                &mission,
                &channel,
                &aero,
                &swipt,
                Scenario::A,
                &pool.prefix(k),
            )
            .unwrap();
            assert!(r.feasible, "prefix {k} should be feasible");
        }
        let r = cycle_with_deployment(
            &mission,
            &channel,
            &aero,
            &swipt,
            Scenario::A,
            &pool.prefix(n + 1),
        )
        .unwrap();
        assert!(!r.feasible, "prefix {} should be infeasible", n + 1);
    }

    #[test]
    fn altitude_search_returns_none_when_power_collapses() {
        let mut mission = test_mission(5);
        mission.p_t_users = 1e-9;
        let swipt = SwiptConfig {
            battery_initial: 3e8,
            ..SwiptConfig::default()
        };
        let result = max_feasible_altitude(
            &mission,
            &ChannelModel::default(),
            &UavAero::default(),
            &swipt,
            Scenario::B,
            (600.0, 3000.0),
            1.0,
        )
        .unwrap();
        assert!(result.is_none());
    }

    #[test]
    fn altitude_search_nondecreasing_in_power_and_decreasing_in_density() {
        let channel = ChannelModel::default();
        let aero = UavAero::default();
        let swipt = SwiptConfig {
            battery_initial: 3e8,
            ..SwiptConfig::default()
        };
        let mut base = test_mission(5);
        base.region = Region::new(500.0).unwrap();
        let mut prev = 0.0f64;
        for p_t in [1.0, 3.0, 5.0] {
            let mut mission = base.clone();
            mission.p_t_users = p_t;
            let h = max_feasible_altitude(
                &mission,
                &channel,
                &aero,
                &swipt,
                Scenario::B,
                (600.0, 3000.0),
                1.0,
            )
            .unwrap()
            .expect("feasible at these powers");
            assert!(h >= prev, "p_t = {p_t}: {h} < {prev}");
            prev = h;
        }
        // Doubling the density cannot raise the ceiling.
        let sparse = base.clone();
        let mut dense = base;
        dense.user_density *= 2.0;
        let h_sparse = max_feasible_altitude(
            &sparse,
            &channel,
            &aero,
            &swipt,
            Scenario::B,
            (600.0, 3000.0),
            1.0,
        )
        .unwrap()
        .unwrap();
        let h_dense = max_feasible_altitude(
            &dense,
            &channel,
            &aero,
            &swipt,
            Scenario::B,
            (600.0, 3000.0),
            1.0,
        )
        .unwrap()
        .unwrap();
        assert!(h_dense <= h_sparse);
    }
}
