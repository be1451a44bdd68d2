use thiserror::Error;

/// Errors raised by the radiation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("gamma function pole at z = {0}")]
    Pole(f64),

    #[error("{method} did not converge (residual {residual:e})")]
    NonConvergence { method: &'static str, residual: f64 },

    #[error(
        "panel budget of {budget} exhausted; worst panel [{worst_start}, {worst_end}] has error {worst_error:e}"
    )]
    PanelBudget {
        budget: usize,
        worst_start: f64,
        worst_end: f64,
        worst_error: f64,
    },

    #[error("an infinite window needs a regulator")]
    MissingRegulator,

    #[error("time {t} outside sampled span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },

    #[error("{0} is not supported for this trajectory")]
    Unsupported(&'static str),

    #[error("regulator extrapolation is not converging monotonically: residuals {residuals:?}")]
    NonMonotone { residuals: Vec<f64> },

    #[error("provenance mismatch: {0}")]
    ProvenanceMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

/// Rejects anything that is not a finite, strictly positive number.
pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(field, format!("must be finite, got {value}")))
    }
}
