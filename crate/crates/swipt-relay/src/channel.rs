//! Air-to-ground channel model.
//!
//! Elevation-angle dependent LOS probability, probabilistic path loss, SNR,
//! Shannon rate and per-user collection time, for the uplink (NET1 user to
//! UAV) and the downlink (UAV to NET2 base station). The probabilistic LOS
//! mixture is applied as an expected attenuation factor rather than a
//! per-link Bernoulli draw.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Propagation constants for both link directions.
///
/// `los_b` and `los_c` are the sigmoid parameters of the LOS-probability
/// curve; `los_c` appears both as the scale of the exponential and as the
/// angle offset. `nlos_attenuation` is the extra linear attenuation applied
/// to the non-LOS fraction of the power. `bandwidth` is the channel
/// bandwidth in Hz (distinct from the aircraft weight, which shares the
/// symbol W in some texts).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub los_b: f64,
    pub los_c: f64,
    pub nlos_attenuation: f64,
    pub path_loss_exponent: f64,
    /// Noise power at the UAV on the uplink, in watts.
    pub noise_uplink: f64,
    /// Noise power at the NET2 base station, in watts.
    pub noise_downlink: f64,
    pub bandwidth: f64,
    /// Fixed LOS probability for the UAV-to-BS leg. When `None` the BS is
    /// taken to sit directly below the NET2 hover point and the probability
    /// is evaluated at a 90 degree elevation angle.
    pub bs_los_probability: Option<f64>,
}

impl Default for ChannelModel {
    fn default() -> Self {
        // Urban sigmoid constants; noise of 1 W corresponds to 0 dBW.
        Self {
            los_b: 0.16,
            los_c: 9.61,
            nlos_attenuation: 0.2,
            path_loss_exponent: 2.0,
            noise_uplink: 1.0,
            noise_downlink: 1.0,
            bandwidth: 1e6,
            bs_los_probability: None,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 7] = [
            (
                "los_b",
                self.los_b,
                self.los_b.is_finite() && self.los_b >= 0.0,
            ),
            (
                "los_c",
                self.los_c,
                self.los_c.is_finite() && self.los_c >= 0.0,
            ),
            (
                "nlos_attenuation",
                self.nlos_attenuation,
                self.nlos_attenuation > 0.0 && self.nlos_attenuation <= 1.0,
            ),
            (
                "path_loss_exponent",
                self.path_loss_exponent,
                self.path_loss_exponent >= 1.0 && self.path_loss_exponent.is_finite(),
            ),
            ("noise_uplink", self.noise_uplink, self.noise_uplink > 0.0),
            (
                "noise_downlink",
                self.noise_downlink,
                self.noise_downlink > 0.0,
            ),
            ("bandwidth", self.bandwidth, self.bandwidth > 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "outside the valid channel-model domain",
                });
            }
        }
        if let Some(p) = self.bs_los_probability {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter {
                    name: "bs_los_probability",
                    value: p,
                    reason: "must lie in [0, 1]",
                });
            }
        }
        Ok(())
    }

    /// LOS probability used for the UAV-to-BS leg.
    pub fn bs_p_los(&self) -> f64 {
        self.bs_los_probability
            .unwrap_or_else(|| los_probability(90.0, self))
    }
}

/// Computed uplink or downlink budget for one link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub p_los: f64,
    pub received_power: f64,
    pub snr: f64,
    pub rate: f64,
}

/// Elevation angle in degrees seen from the ground terminal towards the UAV.
pub fn elevation_angle_deg(altitude: f64, slant_range: f64) -> Result<f64> {
    if !crate::error::positive(altitude) {
        return Err(Error::InvalidParameter {
            name: "altitude",
            value: altitude,
            reason: "must be finite and > 0",
        });
    }
    if altitude > slant_range {
        return Err(Error::InvalidGeometry(format!(
            "altitude {altitude} m exceeds slant range {slant_range} m"
        )));
    }
    Ok((altitude / slant_range).asin().to_degrees())
}

/// Probability of a line-of-sight link at elevation angle `theta_deg`.
///
/// Sigmoid in the elevation angle; collapses to 1 when `los_c` is zero.
/// The NLOS probability is the complement.
pub fn los_probability(theta_deg: f64, model: &ChannelModel) -> f64 {
    debug_assert!((0.0..=90.0).contains(&theta_deg));
    1.0 / (1.0 + model.los_c * (-model.los_b * (theta_deg - model.los_c)).exp())
}

/// Expected received power at the UAV from an uplink user.
///
/// The LOS and NLOS components are mixed by probability, with the NLOS part
/// scaled by the extra attenuation factor, then subjected to power-law path
/// loss over the slant range.
pub fn received_power_uplink(p_los: f64, p_t: f64, slant_range: f64, model: &ChannelModel) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_los) && p_t >= 0.0 && slant_range > 0.0);
    let mixture = p_los + model.nlos_attenuation * (1.0 - p_los);
    mixture * p_t * slant_range.powf(-model.path_loss_exponent)
}

/// Expected received power at the NET2 base station from the UAV.
///
/// The hover altitude doubles as the UAV-to-BS distance: the BS is modeled
/// directly below the NET2 hover point.
pub fn received_power_downlink(
    p_los_bs: f64,
    p_t_uav: f64,
    altitude: f64,
    model: &ChannelModel,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_los_bs) && p_t_uav >= 0.0 && altitude > 0.0);
    let mixture = p_los_bs + model.nlos_attenuation * (1.0 - p_los_bs);
    mixture * p_t_uav * altitude.powf(-model.path_loss_exponent)
}

/// Signal-to-noise ratio of a link.
pub fn snr(received_power: f64, noise: f64) -> Result<f64> {
    if !crate::error::positive(noise) {
        return Err(Error::InvalidParameter {
            name: "noise",
            value: noise,
            reason: "must be > 0",
        });
    }
    Ok(received_power / noise)
}

/// SNR seen by the information decoder when a power-splitting receiver
/// diverts the fraction `eta_ps` of the received power to the harvester.
pub fn snr_scenario_b(eta_ps: f64, received_power: f64, noise: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta_ps) {
        return Err(Error::InvalidParameter {
            name: "eta_ps",
            value: eta_ps,
            reason: "must lie in [0, 1]",
        });
    }
    if !crate::error::positive(noise) {
        return Err(Error::InvalidParameter {
            name: "noise",
            value: noise,
            reason: "must be > 0",
        });
    }
    Ok((1.0 - eta_ps) * received_power / noise)
}

/// Shannon rate in bit/s.
pub fn shannon_rate(snr: f64, bandwidth: f64) -> f64 {
    debug_assert!(snr >= 0.0 && bandwidth > 0.0);
    bandwidth * (1.0 + snr).log2()
}

/// Time to move `data_threshold` bits over a link of the given rate.
///
/// A zero (or negative) rate with data outstanding means the relay can never
/// finish; that is reported as an unreachable-user error.
pub fn collection_time(data_threshold: f64, rate: f64) -> Result<f64> {
    debug_assert!(data_threshold >= 0.0);
    if data_threshold == 0.0 {
        return Ok(0.0);
    }
    if rate <= 0.0 {
        return Err(Error::UnreachableUser {
            rate,
            data_threshold,
        });
    }
    Ok(data_threshold / rate)
}

/// Full uplink budget for one user at the given slant range.
///
/// With `eta_ps = Some(split)` the information-decoder SNR of the
/// power-splitting receiver is used; `None` gives the plain (scenario A)
/// budget.
pub fn uplink_budget(
    model: &ChannelModel,
    p_t: f64,
    altitude: f64,
    slant: f64,
    eta_ps: Option<f64>,
) -> Result<LinkBudget> {
    let theta = elevation_angle_deg(altitude, slant)?;
    let p_los = los_probability(theta, model);
    let received_power = received_power_uplink(p_los, p_t, slant, model);
    let snr_value = match eta_ps {
        Some(split) => snr_scenario_b(split, received_power, model.noise_uplink)?,
        None => snr(received_power, model.noise_uplink)?,
    };
    Ok(LinkBudget {
        p_los,
        received_power,
        snr: snr_value,
        rate: shannon_rate(snr_value, model.bandwidth),
    })
}

/// Downlink budget for the UAV-to-BS leg at the given hover altitude.
pub fn downlink_budget(model: &ChannelModel, p_t_uav: f64, altitude: f64) -> Result<LinkBudget> {
    let p_los = self::p_los_checked(model)?;
    let received_power = received_power_downlink(p_los, p_t_uav, altitude, model);
    let snr_value = snr(received_power, model.noise_downlink)?;
    Ok(LinkBudget {
        p_los,
        received_power,
        snr: snr_value,
        rate: shannon_rate(snr_value, model.bandwidth),
    })
}

fn p_los_checked(model: &ChannelModel) -> Result<f64> {
    let p = model.bs_p_los();
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "bs_los_probability",
            value: p,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(p)
}
