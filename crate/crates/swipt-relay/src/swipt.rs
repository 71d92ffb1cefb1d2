//! SWIPT receiver mathematics.
//!
//! Power-splitting and time-switching formulas for simultaneous wireless
//! information and power transfer, plus the per-cycle battery update law.
//! The separate-receiver and antenna-switching architectures carry no
//! equations here; they exist as documented variants only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four standard SWIPT receiver architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverArchitecture {
    /// Splits the incoming signal power between the energy harvester and the
    /// information decoder at a tunable ratio. Works with a single antenna,
    /// harvests and decodes at the same instant, but needs the split ratio
    /// optimized per link.
    PowerSplitting,
    /// One antenna alternates in time between harvesting and decoding.
    /// Simple hardware, but the two modes must be scheduled and the
    /// alternation introduces delay.
    TimeSwitching,
    /// Dedicated harvesting and decoding receivers with their own antennas
    /// and channels. Buildable from off-the-shelf parts; bulkier, and the
    /// harvesting chain is exposed to interference in low-power regions.
    /// No rate or harvest formulas are modeled for this variant.
    SeparateReceiver,
    /// An antenna array is partitioned between harvesting and decoding by a
    /// switch. Harvests and decodes simultaneously with low complexity, but
    /// needs multiple antennas and the partition itself is a discrete
    /// optimization. No rate or harvest formulas are modeled for this
    /// variant.
    AntennaSwitching,
}

/// How per-user harvested power is converted to per-cycle energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarvestAccounting {
    /// Multiply harvested power by the fixed cycle duration. With the
    /// default duration of one second the harvested energy is numerically
    /// the harvested power, which keeps the optimizer constants aligned
    /// with the harvesting constraint.
    CycleDuration,
    /// Multiply harvested power by the user's actual collection time;
    /// physical accounting.
    CollectionTime,
}

/// Where the battery charging efficiency applies in the cycle update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatteryLaw {
    /// Efficiency multiplies the net of harvest minus threshold:
    /// `E+ = E + eta_bat * (sum_harvest - e_threshold)`.
    EfficiencyOnNet,
    /// Efficiency multiplies the harvest only; the threshold draw bypasses
    /// it: `E+ = E + eta_bat * sum_harvest - e_threshold`.
    EfficiencyOnHarvest,
}

/// How the scenario engine picks the threshold energy for the battery law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Use the configured `e_threshold` value as-is.
    Fixed,
    /// Use the running cycle's own total consumed energy as the threshold.
    CycleEnergy,
}

/// Harvesting, battery, and accounting parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwiptConfig {
    /// Power-splitting coefficient: fraction of received power harvested.
    pub eta_ps: f64,
    /// Battery charging efficiency.
    pub eta_bat: f64,
    /// Threshold energy debited per cycle by the battery law, J.
    pub e_threshold: f64,
    /// Battery level at the start of the cycle, J.
    pub battery_initial: f64,
    /// Normalization interval converting harvested power to energy, s.
    pub cycle_duration: f64,
    /// Optional battery ceiling, J. `None` leaves the battery unbounded.
    pub battery_capacity: Option<f64>,
    pub harvest_accounting: HarvestAccounting,
    pub battery_law: BatteryLaw,
    pub threshold_policy: ThresholdPolicy,
}

impl Default for SwiptConfig {
    fn default() -> Self {
        Self {
            eta_ps: 0.2,
            eta_bat: 0.5,
            e_threshold: 1e6,
            battery_initial: 1e9,
            cycle_duration: 1.0,
            battery_capacity: None,
            harvest_accounting: HarvestAccounting::CycleDuration,
            battery_law: BatteryLaw::EfficiencyOnNet,
            threshold_policy: ThresholdPolicy::CycleEnergy,
        }
    }
}

impl SwiptConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("eta_ps", self.eta_ps), ("eta_bat", self.eta_bat)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must lie in [0, 1]",
                });
            }
        }
        if !self.e_threshold.is_finite() || self.e_threshold < 0.0 {
            return Err(Error::InvalidParameter {
                name: "e_threshold",
                value: self.e_threshold,
                reason: "must be finite and >= 0",
            });
        }
        if !self.battery_initial.is_finite() || self.battery_initial < 0.0 {
            return Err(Error::InvalidParameter {
                name: "battery_initial",
                value: self.battery_initial,
                reason: "must be finite and >= 0",
            });
        }
        if !crate::error::positive(self.cycle_duration) {
            return Err(Error::InvalidParameter {
                name: "cycle_duration",
                value: self.cycle_duration,
                reason: "must be > 0",
            });
        }
        if let Some(cap) = self.battery_capacity {
            if !cap.is_finite() || cap < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "battery_capacity",
                    value: cap,
                    reason: "must be >= 0 when set",
                });
            }
        }
        Ok(())
    }
}

/// Power diverted to the energy harvester by a power-splitting receiver.
pub fn harvested_power_ps(eta_ps: f64, received_power: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&eta_ps) && received_power >= 0.0);
    eta_ps * received_power
}

/// Power left for the information decoder by a power-splitting receiver.
///
/// Computed as the exact complement of [`harvested_power_ps`], so the two
/// always partition the received power to the last ulp.
pub fn id_power_ps(eta_ps: f64, received_power: f64) -> f64 {
    received_power - harvested_power_ps(eta_ps, received_power)
}

/// Harvested power of a time-switching receiver in its harvesting slot.
pub fn ts_harvested_power(eta: f64, source_power: f64, channel_gain: f64) -> f64 {
    debug_assert!(eta >= 0.0 && source_power >= 0.0 && channel_gain >= 0.0);
    eta * source_power * channel_gain * channel_gain
}

/// Decoder rate of a time-switching receiver in its decoding slot.
pub fn ts_id_rate(
    bandwidth: f64,
    source_power: f64,
    channel_gain: f64,
    noise: f64,
    interference: f64,
) -> Result<f64> {
    if !crate::error::positive(noise) {
        return Err(Error::InvalidParameter {
            name: "noise",
            value: noise,
            reason: "must be > 0",
        });
    }
    debug_assert!(source_power >= 0.0 && channel_gain >= 0.0 && interference >= 0.0);
    let snr = source_power * channel_gain * channel_gain / (noise + interference);
    Ok(bandwidth * (1.0 + snr).log2())
}

/// Decoder rate of a power-splitting receiver, with separate signal
/// processing noise and interference terms.
pub fn ps_id_rate_generic(
    bandwidth: f64,
    eta: f64,
    source_power: f64,
    channel_gain: f64,
    n_sp: f64,
    noise: f64,
    interference: f64,
) -> Result<f64> {
    let denom = n_sp + noise + interference;
    if !crate::error::positive(n_sp + noise) || !denom.is_finite() {
        return Err(Error::InvalidParameter {
            name: "n_sp + noise",
            value: n_sp + noise,
            reason: "must be > 0 and finite",
        });
    }
    debug_assert!((0.0..=1.0).contains(&eta));
    let snr = (1.0 - eta) * source_power * channel_gain * channel_gain / denom;
    Ok(bandwidth * (1.0 + snr).log2())
}

/// End-of-cycle battery level.
///
/// `E+ = battery_initial + eta_bat * (sum(harvested) - e_threshold)`, with
/// the charging efficiency applied to the whole net term exactly as the
/// update law is written. The level may fall below the initial value when
/// the harvest misses the threshold; a negative level is reported as a
/// battery-depleted signal rather than silently returned. An optional
/// capacity caps the result.
pub fn battery_update(config: &SwiptConfig, harvested_energies: &[f64]) -> Result<f64> {
    debug_assert!(harvested_energies.iter().all(|&e| e >= 0.0));
    let total: f64 = harvested_energies.iter().sum();
    let mut level = config.battery_initial + config.eta_bat * (total - config.e_threshold);
    if let Some(cap) = config.battery_capacity {
        level = level.min(cap);
    }
    if level < 0.0 {
        return Err(Error::BatteryDepleted { level });
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn ps_split_known_values() {
        assert_eq!(harvested_power_ps(0.3, 10.0), 3.0);
        assert_eq!(harvested_power_ps(0.0, 123.0), 0.0);
        assert_eq!(id_power_ps(0.3, 10.0), 7.0);
        assert_eq!(id_power_ps(1.0, 10.0), 0.0);
    }

    #[test]
    fn ps_split_partitions_received_power() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let eta: f64 = rng.gen_range(0.0..=1.0);
            let p: f64 = rng.gen_range(0.0..1e3);
            let h = harvested_power_ps(eta, p);
            let id = id_power_ps(eta, p);
            assert!((h + id - p).abs() <= 2.0 * f64::EPSILON * p);
            assert!(h >= 0.0 && id >= 0.0);
        }
    }

    #[test]
    fn ts_harvest_known_values() {
        assert_eq!(ts_harvested_power(0.5, 2.0, 1.0), 1.0);
        assert_eq!(ts_harvested_power(0.5, 2.0, 0.0), 0.0);
        // Quadratic in the gain.
        assert_eq!(
            ts_harvested_power(0.5, 2.0, 2.0),
            4.0 * ts_harvested_power(0.5, 2.0, 1.0)
        );
    }

    #[test]
    fn ts_rate_known_values() {
        assert_eq!(ts_id_rate(1.0, 1.0, 1.0, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(ts_id_rate(1.0, 0.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        // Rate collapses as interference grows without bound.
        let r = ts_id_rate(1.0, 1.0, 1.0, 1.0, 1e12).unwrap();
        assert!(r < 1e-11);
        assert!(ts_id_rate(1.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ps_rate_reduces_to_ts_rate() {
        // With no split, no processing noise and no interference the
        // power-splitting decoder rate is the time-switching rate.
        let a = ps_id_rate_generic(2.5, 0.0, 3.0, 0.7, 0.0, 1.3, 0.0).unwrap();
        let b = ts_id_rate(2.5, 3.0, 0.7, 1.3, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ps_rate_known_values() {
        assert_eq!(
            ps_id_rate_generic(1.0, 1.0, 2.0, 1.0, 0.0, 1.0, 0.0).unwrap(),
            0.0
        );
        // (1 - 0.5) * 2 * 1 / (0 + 1 + 0) = 1 => one bit per second per hertz.
        assert_eq!(
            ps_id_rate_generic(1.0, 0.5, 2.0, 1.0, 0.0, 1.0, 0.0).unwrap(),
            1.0
        );
        assert!(ps_id_rate_generic(1.0, 0.5, 2.0, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn battery_update_known_values() {
        let config = SwiptConfig {
            eta_bat: 0.9,
            e_threshold: 30.0,
            battery_initial: 100.0,
            ..SwiptConfig::default()
        };
        assert_eq!(battery_update(&config, &[20.0, 30.0]).unwrap(), 118.0);
        // Harvest exactly at the threshold leaves the level unchanged.
        assert_eq!(battery_update(&config, &[30.0]).unwrap(), 100.0);
        // Zero efficiency freezes the battery regardless of harvest.
        let frozen = SwiptConfig {
            eta_bat: 0.0,
            ..config
        };
        assert_eq!(battery_update(&frozen, &[1e9]).unwrap(), 100.0);
        assert_eq!(battery_update(&frozen, &[]).unwrap(), 100.0);
    }

    #[test]
    fn battery_update_signals_depletion() {
        let config = SwiptConfig {
            eta_bat: 1.0,
            e_threshold: 200.0,
            battery_initial: 100.0,
            ..SwiptConfig::default()
        };
        match battery_update(&config, &[]) {
            Err(Error::BatteryDepleted { level }) => assert_eq!(level, -100.0),
            other => panic!("expected depletion, got {other:?}"),
        }
    }

    #[test]
    fn battery_update_monotone_in_harvest_and_efficiency() {
        let base = SwiptConfig {
            eta_bat: 0.5,
            e_threshold: 10.0,
            battery_initial: 50.0,
            ..SwiptConfig::default()
        };
        let low = battery_update(&base, &[20.0]).unwrap();
        let high = battery_update(&base, &[25.0]).unwrap();
        assert!(high > low);
        // With the harvest above threshold, higher efficiency stores more.
        let eager = SwiptConfig {
            eta_bat: 0.9,
            ..base
        };
        assert!(battery_update(&eager, &[20.0]).unwrap() > low);
    }

    #[test]
    fn battery_capacity_caps_the_level() {
        let config = SwiptConfig {
            eta_bat: 1.0,
            e_threshold: 0.0,
            battery_initial: 100.0,
            battery_capacity: Some(120.0),
            ..SwiptConfig::default()
        };
        assert_eq!(battery_update(&config, &[500.0]).unwrap(), 120.0);
    }

    #[test]
    fn receiver_architectures_cover_the_four_designs() {
        let all = [
            ReceiverArchitecture::PowerSplitting,
            ReceiverArchitecture::TimeSwitching,
            ReceiverArchitecture::SeparateReceiver,
            ReceiverArchitecture::AntennaSwitching,
        ];
        let names: Vec<String> = all
            .iter()
            .map(|a| serde_json::to_string(a).unwrap())
            .collect();
        assert_eq!(
            names,
            vec![
                "\"power_splitting\"",
                "\"time_switching\"",
                "\"separate_receiver\"",
                "\"antenna_switching\"",
            ]
        );
    }

    #[test]
    fn validate_rejects_out_of_range_fractions() {
        let broken = [
            SwiptConfig {
                eta_ps: 1.5,
                ..SwiptConfig::default()
            },
            SwiptConfig {
                eta_bat: -0.1,
                ..SwiptConfig::default()
            },
            SwiptConfig {
                cycle_duration: 0.0,
                ..SwiptConfig::default()
            },
        ];
        for config in broken {
            assert!(config.validate().is_err());
        }
        assert!(SwiptConfig::default().validate().is_ok());
    }
}
