use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("truncation too small: discarded tail mass {tail:.3e} exceeds {limit:.1e}")]
    TruncationTooSmall { tail: f64, limit: f64 },

    #[error("boundary population {mass:.3e} at the truncation edge exceeds guard {limit:.1e}")]
    BoundaryGuard { mass: f64, limit: f64 },

    #[error("norm drift {drift:.3e} exceeds {limit:.1e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("trace drift {drift:.3e} exceeds {limit:.1e}; reduce the step size")]
    TraceDrift { drift: f64, limit: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for failures raised by a numerical guard during evolution, as
    /// opposed to malformed input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::TruncationTooSmall { .. }
                | Error::BoundaryGuard { .. }
                | Error::NormDrift { .. }
                | Error::TraceDrift { .. }
                | Error::NonFinite(_)
        )
    }
}
