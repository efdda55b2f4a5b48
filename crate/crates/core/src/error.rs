use thiserror::Error;

/// Errors raised by samplers, estimators and the bound engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("covariance matrix of dimension {dim} is not positive definite after diagonal jitter {jitter:e}")]
    NotPositiveDefinite { dim: usize, jitter: f64 },

    #[error("overflow evaluating {what} at {location}")]
    Overflow { what: &'static str, location: String },

    #[error("quadrature did not converge: {coarse} vs {fine} under node doubling (relative {relative:e})")]
    Quadrature { coarse: f64, fine: f64, relative: f64 },

    #[error("point {0} is not on the grid")]
    OffGrid(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::Overflow { .. }
                | Error::Quadrature { .. }
                | Error::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
