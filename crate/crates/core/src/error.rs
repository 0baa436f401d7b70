use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: &'static str },

    #[error("rate `{field}` = {value} is outside [0, 1]")]
    RateOutOfRange { field: &'static str, value: f64 },

    #[error("noise parameters inconsistent with the {basis} basis: {reason}")]
    InconsistentNoise { basis: &'static str, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("N = {n} exceeds the resource cap of {cap}")]
    ResourceCap { n: usize, cap: usize },

    #[error("eigenvalue iteration did not converge for a {dim}x{dim} matrix after {iterations} iterations")]
    NoConvergence { dim: usize, iterations: usize },

    #[error("the evolution has no limiting state: undamped oscillating modes remain")]
    NoLimit,

    #[error("success probability {0} is below the usable floor")]
    Unusable(f64),

    #[error("phase density is not symmetric around zero")]
    AsymmetricDensity,

    #[error("invalid phase density: {0}")]
    InvalidDensity(&'static str),
}

pub(crate) fn check_rate(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::RateOutOfRange { field, value })
    }
}
