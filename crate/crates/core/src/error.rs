use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be finite and positive, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("integration step must be finite and positive, got {0}")]
    NonPositiveStep(f64),

    #[error("program segment {index} has a non-finite or negative value")]
    InvalidSegment { index: usize },

    #[error("initial configuration is not finite")]
    NonFiniteConfiguration,

    #[error("steering angle {beta} exceeds limit {limit} at t = {t}")]
    SteeringLimit { t: f64, beta: f64, limit: f64 },

    #[error("cycle size eps must lie in (0, 0.3], got {0}")]
    EpsOutOfRange(f64),

    #[error("lateral offset must be finite, got {0}")]
    NonFiniteLateral(f64),

    #[error("plan needs {needed} cycles but the cap is {cap}")]
    CycleCapExceeded { needed: u64, cap: u64 },
}
