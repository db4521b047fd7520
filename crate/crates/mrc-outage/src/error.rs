use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Path-loss exponent outside (2, ∞); the interference functional diverges at α ≤ 2.
    #[error("path-loss exponent alpha must be > 2, got {0}")]
    AlphaOutOfRange(f64),

    /// A parameter that must be strictly positive (and finite) was not.
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("antenna count must be at least 1")]
    ZeroAntennas,

    /// A closed form specialized to one α was called with another.
    #[error("operation requires alpha = {expected}, got {got}")]
    AlphaMismatch { expected: f64, got: f64 },

    /// A closed form specialized to one antenna count was called with another.
    #[error("operation requires n_antennas = {expected}, got {got}")]
    AntennaMismatch { expected: u32, got: u32 },

    /// Adaptive subdivision hit its panel budget. Carries the best estimate so
    /// callers can still inspect how far the refinement got.
    #[error("subdivision limit {limit} reached (best estimate {estimate:e} ± {error_estimate:e})")]
    MaxSubdivisionsExceeded {
        estimate: f64,
        error_estimate: f64,
        limit: usize,
    },

    #[error("integrand is not finite at {at:e}")]
    NonFiniteIntegrand { at: f64 },

    /// A probability landed outside [0,1] by more than the allowed slack;
    /// signals quadrature failure or inconsistent inputs, never silently clamped.
    #[error("value {value} lies outside [0,1] beyond tolerance {slack:e}")]
    OutOfUnitInterval { value: f64, slack: f64 },

    /// A no-noise SIR sample was requested against a window with no
    /// interferers: the ratio is infinite. Estimators count such samples as
    /// non-outage for any finite threshold.
    #[error("interferer field is empty and there is no noise: SIR is infinite")]
    EmptyField,

    /// Bisection could not trap the target outage even after bracket expansion.
    #[error("no density bracket contains target outage {target} (outage at upper bracket {hi_value})")]
    BracketFailure { target: f64, hi_value: f64 },

    /// Deviation ratios are undefined when the reference CDF is numerically zero.
    #[error("denominator {value:e} is below the floor {floor:e}")]
    DivisionByNearZero { value: f64, floor: f64 },

    /// Least-squares design matrix has no spread in the predictor.
    #[error("regression design is degenerate: predictor values are all equal")]
    DegenerateDesign,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Best available value carried by a numeric error, if any.
    /// `MaxSubdivisionsExceeded` keeps its partial estimate so that sweep
    /// drivers can log it next to the failure.
    pub fn partial_estimate(&self) -> Option<f64> {
        match self {
            Error::MaxSubdivisionsExceeded { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}
