//! Flat key/value configuration.
//!
//! The on-disk format is one `section.key = value` pair per line, `#`
//! comments, blank lines allowed. Every key has a shipped default, so an
//! empty file (or no file) yields the default parameter set; unknown keys
//! are rejected outright. Optional keys accept the literal `none`.
//!
//! Defaults with no established source (inter-network distance, bandwidth,
//! user density, battery sizing, LOS sigmoid constants) are invented,
//! documented values — override them per experiment rather than trusting
//! them as measurements.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::ChannelModel;
use crate::deployment::Region;
use crate::error::{Error, Result};
use crate::scenario::MissionConfig;
use crate::swipt::{BatteryLaw, HarvestAccounting, SwiptConfig, ThresholdPolicy};
use crate::uav_power::UavAero;

/// Environment variable naming a default config file.
pub const CONFIG_ENV_VAR: &str = "SWIPT_RELAY_CONFIG";

/// The complete parameter set of the simulator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub mission: MissionConfig,
    pub channel: ChannelModel,
    pub aero: UavAero,
    pub swipt: SwiptConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            mission: MissionConfig {
                altitude_net1: 800.0,
                altitude_net2: 800.0,
                inter_network_distance: 5000.0,
                data_threshold: 4e5,
                user_density: 3e-5,
                region: Region::new(1000.0).expect("positive default radius"),
                p_t_users: 5.0,
                p_t_uav: 3.0,
                seed: 1,
            },
            channel: ChannelModel::default(),
            aero: UavAero::default(),
            swipt: SwiptConfig::default(),
        }
    }
}

/// Schema: every key, in canonical order.
pub const CONFIG_KEYS: &[&str] = &[
    "mission.altitude_net1",
    "mission.altitude_net2",
    "mission.inter_network_distance",
    "mission.data_threshold",
    "mission.user_density",
    "mission.region_radius",
    "mission.p_t_users",
    "mission.p_t_uav",
    "mission.seed",
    "channel.los_b",
    "channel.los_c",
    "channel.nlos_attenuation",
    "channel.path_loss_exponent",
    "channel.noise_uplink",
    "channel.noise_downlink",
    "channel.bandwidth",
    "channel.bs_los_probability",
    "aero.tip_speed",
    "aero.fuselage_drag_ratio",
    "aero.air_density",
    "aero.rotor_solidity",
    "aero.rotor_disc_area",
    "aero.rotor_radius",
    "aero.induced_power_factor",
    "aero.blade_angular_velocity",
    "aero.profile_drag_coeff",
    "aero.weight",
    "aero.cruise_speed",
    "swipt.eta_ps",
    "swipt.eta_bat",
    "swipt.e_threshold",
    "swipt.battery_initial",
    "swipt.cycle_duration",
    "swipt.battery_capacity",
    "swipt.harvest_accounting",
    "swipt.battery_law",
    "swipt.threshold_policy",
];

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key `{key}`: `{value}` is not a number")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value.parse::<u64>().map_err(|_| {
        Error::Config(format!(
            "key `{key}`: `{value}` is not a nonnegative integer"
        ))
    })
}

fn parse_optional_f64(key: &str, value: &str) -> Result<Option<f64>> {
    if value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_f64(key, value).map(Some)
    }
}

fn format_optional(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "none".to_string(),
    }
}

impl Config {
    /// Set one key from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "mission.altitude_net1" => self.mission.altitude_net1 = parse_f64(key, value)?,
            "mission.altitude_net2" => self.mission.altitude_net2 = parse_f64(key, value)?,
            "mission.inter_network_distance" => {
                self.mission.inter_network_distance = parse_f64(key, value)?
            }
            "mission.data_threshold" => self.mission.data_threshold = parse_f64(key, value)?,
            "mission.user_density" => self.mission.user_density = parse_f64(key, value)?,
            "mission.region_radius" => self.mission.region = Region::new(parse_f64(key, value)?)?,
            "mission.p_t_users" => self.mission.p_t_users = parse_f64(key, value)?,
            "mission.p_t_uav" => self.mission.p_t_uav = parse_f64(key, value)?,
            "mission.seed" => self.mission.seed = parse_u64(key, value)?,
            "channel.los_b" => self.channel.los_b = parse_f64(key, value)?,
            "channel.los_c" => self.channel.los_c = parse_f64(key, value)?,
            "channel.nlos_attenuation" => self.channel.nlos_attenuation = parse_f64(key, value)?,
            "channel.path_loss_exponent" => {
                self.channel.path_loss_exponent = parse_f64(key, value)?
            }
            "channel.noise_uplink" => self.channel.noise_uplink = parse_f64(key, value)?,
            "channel.noise_downlink" => self.channel.noise_downlink = parse_f64(key, value)?,
            "channel.bandwidth" => self.channel.bandwidth = parse_f64(key, value)?,
            "channel.bs_los_probability" => {
                self.channel.bs_los_probability = parse_optional_f64(key, value)?
            }
            "aero.tip_speed" => self.aero.tip_speed = parse_f64(key, value)?,
            "aero.fuselage_drag_ratio" => self.aero.fuselage_drag_ratio = parse_f64(key, value)?,
            "aero.air_density" => self.aero.air_density = parse_f64(key, value)?,
            "aero.rotor_solidity" => self.aero.rotor_solidity = parse_f64(key, value)?,
            "aero.rotor_disc_area" => self.aero.rotor_disc_area = parse_f64(key, value)?,
            "aero.rotor_radius" => self.aero.rotor_radius = parse_f64(key, value)?,
            "aero.induced_power_factor" => self.aero.induced_power_factor = parse_f64(key, value)?,
            "aero.blade_angular_velocity" => {
                self.aero.blade_angular_velocity = parse_f64(key, value)?
            }
            "aero.profile_drag_coeff" => self.aero.profile_drag_coeff = parse_f64(key, value)?,
            "aero.weight" => self.aero.weight = parse_f64(key, value)?,
            "aero.cruise_speed" => self.aero.cruise_speed = parse_f64(key, value)?,
            "swipt.eta_ps" => self.swipt.eta_ps = parse_f64(key, value)?,
            "swipt.eta_bat" => self.swipt.eta_bat = parse_f64(key, value)?,
            "swipt.e_threshold" => self.swipt.e_threshold = parse_f64(key, value)?,
            "swipt.battery_initial" => self.swipt.battery_initial = parse_f64(key, value)?,
            "swipt.cycle_duration" => self.swipt.cycle_duration = parse_f64(key, value)?,
            "swipt.battery_capacity" => {
                self.swipt.battery_capacity = parse_optional_f64(key, value)?
            }
            "swipt.harvest_accounting" => {
                self.swipt.harvest_accounting = match value {
                    "cycle_duration" => HarvestAccounting::CycleDuration,
                    "collection_time" => HarvestAccounting::CollectionTime,
                    other => {
                        return Err(Error::Config(format!(
                            "key `{key}`: `{other}` is not one of cycle_duration, collection_time"
                        )))
                    }
                }
            }
            "swipt.battery_law" => self.swipt.battery_law = match value {
                "efficiency_on_net" => BatteryLaw::EfficiencyOnNet,
                "efficiency_on_harvest" => BatteryLaw::EfficiencyOnHarvest,
                other => return Err(Error::Config(format!(
                    "key `{key}`: `{other}` is not one of efficiency_on_net, efficiency_on_harvest"
                ))),
            },
            "swipt.threshold_policy" => {
                self.swipt.threshold_policy = match value {
                    "fixed" => ThresholdPolicy::Fixed,
                    "cycle_energy" => ThresholdPolicy::CycleEnergy,
                    other => {
                        return Err(Error::Config(format!(
                            "key `{key}`: `{other}` is not one of fixed, cycle_energy"
                        )))
                    }
                }
            }
            _ => {
                return Err(Error::UnknownConfigKey {
                    key: key.to_string(),
                    valid: CONFIG_KEYS.join(", "),
                })
            }
        }
        Ok(())
    }

    /// Textual form of one key's current value.
    pub fn get(&self, key: &str) -> Result<String> {
        let value = match key {
            "mission.altitude_net1" => format!("{}", self.mission.altitude_net1),
            "mission.altitude_net2" => format!("{}", self.mission.altitude_net2),
            "mission.inter_network_distance" => {
                format!("{}", self.mission.inter_network_distance)
            }
            "mission.data_threshold" => format!("{}", self.mission.data_threshold),
            "mission.user_density" => format!("{}", self.mission.user_density),
            "mission.region_radius" => format!("{}", self.mission.region.radius()),
            "mission.p_t_users" => format!("{}", self.mission.p_t_users),
            "mission.p_t_uav" => format!("{}", self.mission.p_t_uav),
            "mission.seed" => format!("{}", self.mission.seed),
            "channel.los_b" => format!("{}", self.channel.los_b),
            "channel.los_c" => format!("{}", self.channel.los_c),
            "channel.nlos_attenuation" => format!("{}", self.channel.nlos_attenuation),
            "channel.path_loss_exponent" => format!("{}", self.channel.path_loss_exponent),
            "channel.noise_uplink" => format!("{}", self.channel.noise_uplink),
            "channel.noise_downlink" => format!("{}", self.channel.noise_downlink),
            "channel.bandwidth" => format!("{}", self.channel.bandwidth),
            "channel.bs_los_probability" => format_optional(self.channel.bs_los_probability),
            "aero.tip_speed" => format!("{}", self.aero.tip_speed),
            "aero.fuselage_drag_ratio" => format!("{}", self.aero.fuselage_drag_ratio),
            "aero.air_density" => format!("{}", self.aero.air_density),
            "aero.rotor_solidity" => format!("{}", self.aero.rotor_solidity),
            "aero.rotor_disc_area" => format!("{}", self.aero.rotor_disc_area),
            "aero.rotor_radius" => format!("{}", self.aero.rotor_radius),
            "aero.induced_power_factor" => format!("{}", self.aero.induced_power_factor),
            "aero.blade_angular_velocity" => format!("{}", self.aero.blade_angular_velocity),
            "aero.profile_drag_coeff" => format!("{}", self.aero.profile_drag_coeff),
            "aero.weight" => format!("{}", self.aero.weight),
            "aero.cruise_speed" => format!("{}", self.aero.cruise_speed),
            "swipt.eta_ps" => format!("{}", self.swipt.eta_ps),
            "swipt.eta_bat" => format!("{}", self.swipt.eta_bat),
            "swipt.e_threshold" => format!("{}", self.swipt.e_threshold),
            "swipt.battery_initial" => format!("{}", self.swipt.battery_initial),
            "swipt.cycle_duration" => format!("{}", self.swipt.cycle_duration),
            "swipt.battery_capacity" => format_optional(self.swipt.battery_capacity),
            "swipt.harvest_accounting" => match self.swipt.harvest_accounting {
                HarvestAccounting::CycleDuration => "cycle_duration".to_string(),
                HarvestAccounting::CollectionTime => "collection_time".to_string(),
            },
            "swipt.battery_law" => match self.swipt.battery_law {
                BatteryLaw::EfficiencyOnNet => "efficiency_on_net".to_string(),
                BatteryLaw::EfficiencyOnHarvest => "efficiency_on_harvest".to_string(),
            },
            "swipt.threshold_policy" => match self.swipt.threshold_policy {
                ThresholdPolicy::Fixed => "fixed".to_string(),
                ThresholdPolicy::CycleEnergy => "cycle_energy".to_string(),
            },
            _ => {
                return Err(Error::UnknownConfigKey {
                    key: key.to_string(),
                    valid: CONFIG_KEYS.join(", "),
                })
            }
        };
        Ok(value)
    }

    /// Apply override text in the flat `key = value` format.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::UnknownConfigKey { .. } => e,
                other => Error::ConfigParse {
                    line: line_no,
                    message: other.to_string(),
                },
            })?;
        }
        Ok(())
    }

    /// Shipped defaults merged with the overrides in `path`.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Config::default();
        config.apply_text(&text)?;
        config.validate()?;
        Ok(config)
    }

    /// Load from an explicit path, else from [`CONFIG_ENV_VAR`], else the
    /// shipped defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Config> {
        match path {
            Some(p) => Config::load(p),
            None => match std::env::var_os(CONFIG_ENV_VAR) {
                Some(env_path) => Config::load(Path::new(&env_path)),
                None => Ok(Config::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mission.validate()?;
        self.channel.validate()?;
        self.aero.validate()?;
        self.swipt.validate()
    }

    /// Sorted `key = value` dump; the canonical form backing the hash.
    pub fn canonical_text(&self) -> String {
        let mut map = BTreeMap::new();
        for key in CONFIG_KEYS {
            map.insert(*key, self.get(key).expect("schema keys are gettable"));
        }
        let mut out = String::new();
        for (key, value) in map {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the canonical text, hex-encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn empty_override_reproduces_the_defaults() {
        let mut config = Config::default();
        config.apply_text("").unwrap();
        assert_eq!(config, Config::default());
        // Spot-check the shipped airframe and channel values.
        assert_eq!(config.aero.tip_speed, 120.0);
        assert_eq!(config.aero.cruise_speed, 70.0);
        assert_eq!(config.aero.fuselage_drag_ratio, 0.6);
        assert_eq!(config.aero.air_density, 1.225);
        assert_eq!(config.channel.path_loss_exponent, 2.0);
        assert_eq!(config.aero.rotor_solidity, 0.05);
        assert_eq!(config.aero.rotor_disc_area, 0.503);
        assert_eq!(config.aero.rotor_radius, 0.4);
        assert_eq!(config.aero.induced_power_factor, 0.1);
        assert_eq!(config.aero.blade_angular_velocity, 13.0);
        assert_eq!(config.aero.profile_drag_coeff, 0.012);
        assert_eq!(config.aero.weight, 20.0);
        assert_eq!(config.channel.noise_uplink, 1.0);
        assert_eq!(config.channel.noise_downlink, 1.0);
        assert_eq!(config.mission.altitude_net1, 800.0);
    }

    #[test]
    fn overrides_apply_and_comments_are_ignored() {
        let mut config = Config::default();
        config
            .apply_text(
                "# lower hover\nmission.altitude_net1 = 700\n\nswipt.eta_ps = 0.4 # inline\n",
            )
            .unwrap();
        assert_eq!(config.mission.altitude_net1, 700.0);
        assert_eq!(config.swipt.eta_ps, 0.4);
        assert_eq!(config.mission.altitude_net2, 800.0);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let mut config = Config::default();
        let err = config
            .apply_text("mission.seed = 3\nwhat is this\n")
            .unwrap_err();
        match err {
            Error::ConfigParse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
        let err = config
            .apply_text("mission.altitude_net1 = not_a_number\n")
            .unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 1, .. }));
    }

    #[test]
    fn unknown_key_lists_the_schema() {
        let mut config = Config::default();
        let err = config.apply_text("mission.altitude = 700\n").unwrap_err();
        match err {
            Error::UnknownConfigKey { key, valid } => {
                assert_eq!(key, "mission.altitude");
                assert!(valid.contains("mission.altitude_net1"));
                assert!(valid.contains("swipt.threshold_policy"));
            }
            other => panic!("expected unknown-key error, got {other}"),
        }
    }

    #[test]
    fn every_schema_key_round_trips_through_get_and_set() {
        let mut config = Config::default();
        for key in CONFIG_KEYS {
            let value = config.get(key).unwrap();
            config.set(key, &value).unwrap();
        }
        assert_eq!(config, Config::default());
    }

    #[test]
    fn optional_keys_accept_none() {
        let mut config = Config::default();
        config.set("swipt.battery_capacity", "1e9").unwrap();
        assert_eq!(config.swipt.battery_capacity, Some(1e9));
        config.set("swipt.battery_capacity", "none").unwrap();
        assert_eq!(config.swipt.battery_capacity, None);
        config.set("channel.bs_los_probability", "0.9").unwrap();
        assert_eq!(config.channel.bs_los_probability, Some(0.9));
    }

    #[test]
    fn enum_keys_reject_unknown_variants() {
        let mut config = Config::default();
        assert!(config.set("swipt.battery_law", "something_else").is_err());
        assert!(config.set("swipt.threshold_policy", "adaptive").is_err());
        assert!(config.set("swipt.harvest_accounting", "hourly").is_err());
    }

    #[test]
    fn hash_is_stable_and_tracks_content() {
        let a = Config::default();
        let b = Config::default();
        assert_eq!(a.hash(), b.hash());
        let mut c = Config::default();
        c.set("mission.seed", "2").unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn load_reads_files_and_validates() {
        let dir = std::env::temp_dir().join("swipt_relay_config_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("override.cfg");
        let mut file = std::fs::File::create(&path).unwrap();
        writeln!(file, "mission.altitude_net1 = 700").unwrap();
        writeln!(file, "mission.user_density = 5e-5").unwrap();
        drop(file);
        let config = Config::load(&path).unwrap();
        assert_eq!(config.mission.altitude_net1, 700.0);
        assert_eq!(config.mission.user_density, 5e-5);
        // A file that breaks an invariant fails validation.
        let bad = dir.join("bad.cfg");
        std::fs::write(&bad, "swipt.eta_ps = 1.5\n").unwrap();
        assert!(Config::load(&bad).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
