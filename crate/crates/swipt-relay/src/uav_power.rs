//! Rotary-wing propulsion power and mission energy bookkeeping.
//!
//! Propulsion power at forward speed v is the sum of a blade-profile term,
//! an induced-lift term and a parasite (fuselage drag) term. Hover power is
//! the v = 0 value; the UAV is modeled as hovering while collecting from
//! NET1 users and while talking to the NET2 base station. Communication
//! circuit energy is negligible next to propulsion and is not modeled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aerodynamic constants of the rotary-wing power model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UavAero {
    /// Rotor blade tip speed, m/s.
    pub tip_speed: f64,
    /// Fuselage drag ratio (dimensionless).
    pub fuselage_drag_ratio: f64,
    /// Air density, kg/m³.
    pub air_density: f64,
    /// Rotor solidity (dimensionless).
    pub rotor_solidity: f64,
    /// Rotor disc area, m².
    pub rotor_disc_area: f64,
    /// Rotor radius, m.
    pub rotor_radius: f64,
    /// Incremental correction factor on induced power (dimensionless).
    pub induced_power_factor: f64,
    /// Blade angular velocity, rad/s.
    ///
    /// Note: the default of 13 rad/s gives a blade-profile power of only a
    /// few milliwatts, far below typical rotary-wing values; supply a
    /// realistic angular velocity if profile power matters to you.
    pub blade_angular_velocity: f64,
    /// Profile drag coefficient (dimensionless).
    pub profile_drag_coeff: f64,
    /// Aircraft weight, N.
    pub weight: f64,
    /// Cruise speed used for the NET1-to-NET2 transit, m/s.
    pub cruise_speed: f64,
}

impl Default for UavAero {
    fn default() -> Self {
        Self {
            tip_speed: 120.0,
            fuselage_drag_ratio: 0.6,
            air_density: 1.225,
            rotor_solidity: 0.05,
            rotor_disc_area: 0.503,
            rotor_radius: 0.4,
            induced_power_factor: 0.1,
            blade_angular_velocity: 13.0,
            profile_drag_coeff: 0.012,
            weight: 20.0,
            cruise_speed: 70.0,
        }
    }
}

impl UavAero {
    pub fn validate(&self) -> Result<()> {
        let positives: [(&'static str, f64); 10] = [
            ("tip_speed", self.tip_speed),
            ("fuselage_drag_ratio", self.fuselage_drag_ratio),
            ("air_density", self.air_density),
            ("rotor_solidity", self.rotor_solidity),
            ("rotor_disc_area", self.rotor_disc_area),
            ("rotor_radius", self.rotor_radius),
            ("blade_angular_velocity", self.blade_angular_velocity),
            ("profile_drag_coeff", self.profile_drag_coeff),
            ("weight", self.weight),
            ("cruise_speed", self.cruise_speed),
        ];
        for (name, value) in positives {
            if !crate::error::positive(value) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                });
            }
        }
        if !self.induced_power_factor.is_finite() || self.induced_power_factor < 0.0 {
            return Err(Error::InvalidParameter {
                name: "induced_power_factor",
                value: self.induced_power_factor,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// Mean rotor induced velocity in hover, sqrt(weight / (2 rho A)).
    pub fn hover_induced_velocity(&self) -> f64 {
        (self.weight / (2.0 * self.air_density * self.rotor_disc_area)).sqrt()
    }
}

/// Which induced-power radicand the power model uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaVariant {
    /// Canonical form: the inner radicand is 1 + v^4 / (4 v0^4).
    Standard,
    /// Variant with 1 + v^4 / (4 v0^2) inside the inner square root. This is
    /// dimensionally inconsistent and the outer radicand can go negative at
    /// speed; retained only for fidelity comparisons.
    QuadraticRadicand,
}

impl std::fmt::Display for FormulaVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormulaVariant::Standard => write!(f, "standard"),
            FormulaVariant::QuadraticRadicand => write!(f, "quadratic_radicand"),
        }
    }
}

/// Blade profile power at hover: (delta / 8) rho s A Omega^3 R^3.
pub fn blade_profile_power(aero: &UavAero) -> f64 {
    let omega3 = aero.blade_angular_velocity.powi(3);
    let r3 = aero.rotor_radius.powi(3);
    aero.profile_drag_coeff / 8.0
        * aero.air_density
        * aero.rotor_solidity
        * aero.rotor_disc_area
        * omega3
        * r3
}

/// Induced power at hover: (1 + k) W^{3/2} / sqrt(2 rho A).
pub fn induced_hover_power(aero: &UavAero) -> f64 {
    (1.0 + aero.induced_power_factor) * aero.weight.powf(1.5)
        / (2.0 * aero.air_density * aero.rotor_disc_area).sqrt()
}

/// Hover power P(0) = blade profile + induced.
pub fn hover_power(aero: &UavAero) -> f64 {
    blade_profile_power(aero) + induced_hover_power(aero)
}

/// Propulsion power at forward speed `v`.
pub fn propulsion_power(v: f64, aero: &UavAero, variant: FormulaVariant) -> Result<f64> {
    debug_assert!(v >= 0.0);
    let p0 = blade_profile_power(aero);
    let pi = induced_hover_power(aero);
    let v0 = aero.hover_induced_velocity();
    let v0_sq = v0 * v0;
    let v_sq = v * v;

    let blade = p0 * (1.0 + 3.0 * v_sq / (aero.tip_speed * aero.tip_speed));
    let induced = match variant {
        FormulaVariant::Standard => {
            // sqrt(1 + x^2) - x with x = v^2 / (2 v0^2), evaluated as
            // 1 / (sqrt(1 + x^2) + x) to avoid cancellation at speed.
            let x = v_sq / (2.0 * v0_sq);
            pi * (1.0 / ((1.0 + x * x).sqrt() + x)).sqrt()
        }
        FormulaVariant::QuadraticRadicand => {
            let radicand = (1.0 + v_sq * v_sq / (4.0 * v0_sq)).sqrt() - v_sq / (2.0 * v0_sq);
            if radicand < 0.0 {
                return Err(Error::ModelDomain {
                    variant: "quadratic_radicand",
                    speed: v,
                });
            }
            pi * radicand.sqrt()
        }
    };
    let parasite = 0.5
        * aero.fuselage_drag_ratio
        * aero.air_density
        * aero.rotor_solidity
        * aero.rotor_disc_area
        * v_sq
        * v;

    Ok(blade + induced + parasite)
}

/// Standard-variant power, total on v >= 0.
pub(crate) fn propulsion_power_standard(v: f64, aero: &UavAero) -> f64 {
    propulsion_power(v, aero, FormulaVariant::Standard)
        .expect("standard variant is defined for all speeds")
}

/// Transit time for a straight leg flown at cruise speed.
pub fn moving_time(distance: f64, cruise_speed: f64) -> Result<f64> {
    if !crate::error::positive(cruise_speed) {
        return Err(Error::InvalidParameter {
            name: "cruise_speed",
            value: cruise_speed,
            reason: "must be > 0",
        });
    }
    debug_assert!(distance >= 0.0);
    Ok(distance / cruise_speed)
}

/// Energy and time totals for one relay cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    /// Hover energy spent collecting from NET1 users, J.
    pub e_net1: f64,
    /// Hover energy spent delivering to the NET2 base station, J.
    pub e_net2: f64,
    /// Propulsion energy spent on the transit leg, J.
    pub e_moving: f64,
    /// Total energy, always the exact sum of the three components, J.
    pub e_total: f64,
    /// Transit time, s.
    pub t_moving: f64,
    /// Total cycle time: collection + transit + delivery, s.
    pub t_total: f64,
}

impl EnergyLedger {
    pub fn zero() -> Self {
        Self {
            e_net1: 0.0,
            e_net2: 0.0,
            e_moving: 0.0,
            e_total: 0.0,
            t_moving: 0.0,
            t_total: 0.0,
        }
    }
}

/// Energy and time bookkeeping for one cycle.
///
/// The UAV hovers at P(0) through every collection interval and through the
/// base-station delivery, and flies the transit leg at cruise speed using
/// the standard power variant.
pub fn mission_energy(
    collection_times: &[f64],
    t_bs: f64,
    t_moving: f64,
    aero: &UavAero,
) -> EnergyLedger {
    debug_assert!(t_bs >= 0.0 && t_moving >= 0.0);
    debug_assert!(collection_times.iter().all(|&t| t >= 0.0));
    let p_hover = hover_power(aero);
    let t_collect: f64 = collection_times.iter().sum();
    let e_net1 = p_hover * t_collect;
    let e_net2 = p_hover * t_bs;
    let e_moving = propulsion_power_standard(aero.cruise_speed, aero) * t_moving;
    EnergyLedger {
        e_net1,
        e_net2,
        e_moving,
        e_total: e_net1 + e_net2 + e_moving,
        t_moving,
        t_total: t_collect + t_bs + t_moving,
    }
}
