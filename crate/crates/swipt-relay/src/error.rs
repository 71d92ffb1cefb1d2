//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Finite and strictly positive (NaN fails).
pub(crate) fn positive(value: f64) -> bool {
    value.is_finite() && value > 0.0
}

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input violated its documented domain.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Geometric inputs that cannot describe a real link (e.g. altitude
    /// exceeding the straight-line distance).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// The link rate is zero while data remains outstanding; the relay can
    /// never finish collecting from this user.
    #[error("unreachable user: rate {rate} bit/s cannot deliver {data_threshold} bits")]
    UnreachableUser { rate: f64, data_threshold: f64 },

    /// The propulsion-power radicand went negative, which can happen under
    /// the dimensionally inconsistent `QuadraticRadicand` variant at speed.
    #[error("propulsion model domain error ({variant} variant): induced-term radicand negative at v = {speed} m/s")]
    ModelDomain { variant: &'static str, speed: f64 },

    /// The battery-update law produced a negative energy level. This signals
    /// an infeasible mission rather than a programming error.
    #[error("battery depleted: level would reach {level} J")]
    BatteryDepleted { level: f64 },

    /// The optimization problem could not be constructed.
    #[error("invalid optimization problem: {0}")]
    InvalidProblem(String),

    /// A closed-form expression divides by a quantity that is zero here.
    #[error("closed form undefined: division by zero {0}")]
    DivisionUndefined(&'static str),

    /// Configuration file could not be parsed.
    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// Configuration key is not part of the schema.
    #[error("unknown config key `{key}`; valid keys are: {valid}")]
    UnknownConfigKey { key: String, valid: String },

    /// A required configuration key is absent and no default applies.
    #[error("missing required config key `{key}`: {policy}")]
    MissingConfigKey { key: String, policy: String },

    /// General configuration or experiment-setup error.
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
