use thiserror::Error;

/// Errors raised when an input falls outside the domain of a formula.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },

    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("power split must lie strictly inside (0, 1), got {0}")]
    SplitOutOfRange(f64),

    #[error("series order check needs at least 3 alphas, got {0}")]
    TooFewPoints(usize),

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NotPositive { name, value })
    }
}

/// Accepts `+inf` so CDFs can be evaluated at the upper limit.
pub(crate) fn nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Negative { name, value })
    }
}
