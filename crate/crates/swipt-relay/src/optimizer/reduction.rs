//! The reduction chain from flight-time minimization to the canonical
//! harvesting program.
//!
//! Each step is an evaluable problem form, so tests can confirm that every
//! transformation preserves what it claims to preserve: exact equality for
//! substitutions, ordering for the min-to-max flip, and approximate
//! agreement for the two named approximations (unit LOS mixture in the
//! link gains, and the high-SNR replacement of log rates by raw SNRs).

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelModel};
use crate::deployment::UserDeployment;
use crate::error::Result;
use crate::scenario::MissionConfig;
use crate::swipt::SwiptConfig;

/// Ordered labels of the reduction chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepLabel {
    /// Minimize total flight time subject to the end-of-cycle battery level
    /// staying above the threshold.
    FlightTime,
    /// Battery-update and total-time laws substituted; the constraint is the
    /// expanded harvest-minus-threshold form.
    BatterySubstituted,
    /// Collection times reduced to reciprocal rates (the fixed data volume
    /// and transit time shift the objective affinely); harvest written via
    /// the power split.
    ReciprocalRates,
    /// LOS mixture factors replaced by one, turning received powers into
    /// bare power-law gains.
    UnitLosFactor,
    /// Log rates replaced by raw SNR reciprocals (high-SNR step).
    HighSnrReciprocal,
    /// Reciprocal-sum minimization recast as SNR-sum maximization.
    SnrMaximization,
    /// Link budgets substituted explicitly into the maximization.
    ExplicitSnr,
    /// Constant downlink term dropped; constraint folded into the G1/G2
    /// constants. This is the program the solvers operate on.
    Canonical,
}

/// Approximations a step introduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approximation {
    /// LOS/NLOS mixture factor taken as one.
    UnitLosMixture,
    /// `log2(1 + snr)` terms replaced by `snr` reciprocals.
    HighSnr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

/// One problem form in the chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub label: StepLabel,
    /// What was substituted or rearranged to reach this form.
    pub substitutions: String,
    /// Approximations introduced at this step (cumulative ones are not
    /// repeated).
    pub approximations: Vec<Approximation>,
    pub direction: Direction,
}

/// Mission-derived quantities every form evaluates against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceContext {
    /// True expected received powers per user (LOS mixture applied).
    pub received_powers: Vec<f64>,
    /// Bare power-law gains per user.
    pub gains: Vec<f64>,
    /// True downlink SNR.
    pub snr_bs: f64,
    /// Downlink SNR under the unit-LOS-mixture assumption.
    pub snr_bs_unit: f64,
    pub data_threshold: f64,
    pub bandwidth: f64,
    pub noise_uplink: f64,
    pub p_t_users: f64,
    pub battery_initial: f64,
    pub e_threshold: f64,
}

/// The full chain plus its evaluation context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub context: TraceContext,
    pub steps: Vec<ReductionStep>,
}

/// Build the chain for a deployed mission.
pub fn reduction_trace(
    mission: &MissionConfig,
    channel_model: &ChannelModel,
    deployment: &UserDeployment,
    swipt: &SwiptConfig,
) -> Result<ReductionTrace> {
    mission.validate()?;
    channel_model.validate()?;
    swipt.validate()?;

    let mut received_powers = Vec::with_capacity(deployment.len());
    let mut gains = Vec::with_capacity(deployment.len());
    for &slant in &deployment.slant_ranges {
        let theta = channel::elevation_angle_deg(mission.altitude_net1, slant)?;
        let p_los = channel::los_probability(theta, channel_model);
        received_powers.push(channel::received_power_uplink(
            p_los,
            mission.p_t_users,
            slant,
            channel_model,
        ));
        gains.push(slant.powf(-channel_model.path_loss_exponent));
    }
    let bs_budget =
        channel::downlink_budget(channel_model, mission.p_t_uav, mission.altitude_net2)?;
    let snr_bs_unit = mission.p_t_uav
        * mission
            .altitude_net2
            .powf(-channel_model.path_loss_exponent)
        / channel_model.noise_downlink;

    let context = TraceContext {
        received_powers,
        gains,
        snr_bs: bs_budget.snr,
        snr_bs_unit,
        data_threshold: mission.data_threshold,
        bandwidth: channel_model.bandwidth,
        noise_uplink: channel_model.noise_uplink,
        p_t_users: mission.p_t_users,
        battery_initial: swipt.battery_initial,
        e_threshold: swipt.e_threshold,
    };
    let steps = vec![
        ReductionStep {
            label: StepLabel::FlightTime,
            substitutions: "original program: total time against the battery-level floor".into(),
            approximations: vec![],
            direction: Direction::Minimize,
        },
        ReductionStep {
            label: StepLabel::BatterySubstituted,
            substitutions: "battery update and total-time laws expanded in place".into(),
            approximations: vec![],
            direction: Direction::Minimize,
        },
        ReductionStep {
            label: StepLabel::ReciprocalRates,
            substitutions: "collection/delivery times and the power-split harvest written out; \
                            constant data volume and transit time dropped from the objective"
                .into(),
            approximations: vec![],
            direction: Direction::Minimize,
        },
        ReductionStep {
            label: StepLabel::UnitLosFactor,
            substitutions: "received powers replaced by bare power-law gains".into(),
            approximations: vec![Approximation::UnitLosMixture],
            direction: Direction::Minimize,
        },
        ReductionStep {
            label: StepLabel::HighSnrReciprocal,
            substitutions: "log rates replaced by raw SNR reciprocals".into(),
            approximations: vec![Approximation::HighSnr],
            direction: Direction::Minimize,
        },
        ReductionStep {
            label: StepLabel::SnrMaximization,
            substitutions: "reciprocal-sum minimization flipped to SNR-sum maximization".into(),
            approximations: vec![],
            direction: Direction::Maximize,
        },
        ReductionStep {
            label: StepLabel::ExplicitSnr,
            substitutions: "uplink and downlink budgets substituted explicitly".into(),
            approximations: vec![],
            direction: Direction::Maximize,
        },
        ReductionStep {
            label: StepLabel::Canonical,
            substitutions: "constant downlink term dropped; constraint folded into G1 and G2"
                .into(),
            approximations: vec![],
            direction: Direction::Maximize,
        },
    ];
    Ok(ReductionTrace { context, steps })
}

impl ReductionTrace {
    fn split_rate(&self, received_power: f64, eta_ps: f64) -> f64 {
        let snr = (1.0 - eta_ps) * received_power / self.context.noise_uplink;
        self.context.bandwidth * (1.0 + snr).log2()
    }

    fn split_rate_unit_los(&self, gain: f64, eta_ps: f64) -> f64 {
        let snr = (1.0 - eta_ps) * self.context.p_t_users * gain / self.context.noise_uplink;
        self.context.bandwidth * (1.0 + snr).log2()
    }

    fn bs_rate(&self) -> f64 {
        self.context.bandwidth * (1.0 + self.context.snr_bs).log2()
    }

    fn bs_rate_unit_los(&self) -> f64 {
        self.context.bandwidth * (1.0 + self.context.snr_bs_unit).log2()
    }

    /// Objective of one form at `(eta_bat, eta_ps)`.
    ///
    /// The two full-time forms need the transit time, which depends on the
    /// cruise speed the trace does not carry; callers pass it in (it only
    /// shifts those objectives by a constant). Minimization forms return
    /// times or reciprocal rates; maximization forms return SNR sums.
    pub fn objective(&self, label: StepLabel, _eta_bat: f64, eta_ps: f64, t_moving: f64) -> f64 {
        let ctx = &self.context;
        match label {
            StepLabel::FlightTime | StepLabel::BatterySubstituted => {
                let collect: f64 = ctx
                    .received_powers
                    .iter()
                    .map(|&p| ctx.data_threshold / self.split_rate(p, eta_ps))
                    .sum();
                t_moving + ctx.data_threshold / self.bs_rate() + collect
            }
            StepLabel::ReciprocalRates => {
                let collect: f64 = ctx
                    .received_powers
                    .iter()
                    .map(|&p| 1.0 / self.split_rate(p, eta_ps))
                    .sum();
                1.0 / self.bs_rate() + collect
            }
            StepLabel::UnitLosFactor => {
                let collect: f64 = ctx
                    .gains
                    .iter()
                    .map(|&g| 1.0 / self.split_rate_unit_los(g, eta_ps))
                    .sum();
                1.0 / self.bs_rate_unit_los() + collect
            }
            StepLabel::HighSnrReciprocal => {
                let collect: f64 = ctx
                    .gains
                    .iter()
                    .map(|&g| ctx.noise_uplink / ((1.0 - eta_ps) * ctx.p_t_users * g))
                    .sum();
                1.0 / ctx.snr_bs_unit + collect
            }
            StepLabel::SnrMaximization | StepLabel::ExplicitSnr => {
                let uplink: f64 = ctx
                    .gains
                    .iter()
                    .map(|&g| (1.0 - eta_ps) * ctx.p_t_users * g / ctx.noise_uplink)
                    .sum();
                ctx.snr_bs_unit + uplink
            }
            StepLabel::Canonical => {
                let uplink: f64 = ctx.gains.iter().map(|&g| (1.0 - eta_ps) * g).sum();
                uplink / ctx.noise_uplink
            }
        }
    }

    /// Harvesting-constraint residual of one form; feasible iff >= 0.
    pub fn constraint(&self, label: StepLabel, eta_bat: f64, eta_ps: f64) -> f64 {
        let ctx = &self.context;
        match label {
            StepLabel::FlightTime => {
                // Battery level after the update, measured against the floor.
                let harvest: f64 = ctx.received_powers.iter().map(|&p| eta_ps * p).sum();
                ctx.battery_initial + eta_bat * (harvest - ctx.e_threshold) - ctx.e_threshold
            }
            StepLabel::BatterySubstituted | StepLabel::ReciprocalRates => {
                let harvest: f64 = ctx.received_powers.iter().map(|&p| eta_ps * p).sum();
                ctx.battery_initial + eta_bat * harvest - (1.0 + eta_bat) * ctx.e_threshold
            }
            StepLabel::UnitLosFactor
            | StepLabel::HighSnrReciprocal
            | StepLabel::SnrMaximization
            | StepLabel::ExplicitSnr => {
                let gain_sum: f64 = ctx.gains.iter().sum();
                ctx.battery_initial + ctx.p_t_users * eta_ps * eta_bat * gain_sum
                    - (1.0 + eta_bat) * ctx.e_threshold
            }
            StepLabel::Canonical => {
                let gain_sum: f64 = ctx.gains.iter().sum();
                let g1 = ctx.p_t_users * gain_sum;
                let g2 = ctx.battery_initial - ctx.e_threshold;
                eta_ps * eta_bat * g1 - ctx.e_threshold * eta_bat + g2
            }
        }
    }
}
