use thiserror::Error;

/// Errors raised by the Casimir engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("unknown unit `{0}` (expected one of eV, rad/s, K, m, um, nm)")]
    UnknownUnit(String),

    #[error("cannot convert a {from} quantity to {to}")]
    DimensionMismatch {
        from: &'static str,
        to: &'static str,
    },

    #[error("zero Matsubara frequency: use the analytic zero-mode coefficients instead")]
    ZeroFrequency,

    #[error("quadrature did not converge: partial value {partial:e}, error bound {error_bound:e}")]
    QuadratureFailure { partial: f64, error_bound: f64 },

    #[error("{parameter} = {value:e} is outside the validity range of the low-temperature expansion (limit {limit:e})")]
    OutOfValidity {
        parameter: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("applicability condition nu << 2 pi T violated at T = {temperature_kelvin:.6} K (nu / 2 pi T = {ratio:e})")]
    RelaxationTooLarge { temperature_kelvin: f64, ratio: f64 },

    #[error("monotonicity scan inconclusive: every difference is within the error bounds, tighten rel_tol")]
    Inconclusive,

    #[error("work budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, CasimirError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> CasimirError {
    CasimirError::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
