use thiserror::Error;

use crate::quadrature::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: String },

    #[error("evaluation budget of {cap} exhausted before convergence")]
    BudgetExceeded {
        cap: usize,
        partial: Box<QuadratureResult>,
    },

    #[error("principal value extrapolation did not stabilise (last spread {spread:e})")]
    NoConvergence { spread: f64 },

    #[error("disk radius underflows at probe {probe}")]
    DegenerateDisk { probe: String },

    #[error("generation {0} exceeds the supported maximum of 40")]
    GenerationOverflow(i32),

    #[error("empty parameter window")]
    EmptyWindow,

    #[error("curve derivative vanishes at parameter {0}")]
    ZeroDerivative(f64),

    #[error("evaluation point {point} lies within {distance:e} of the curve")]
    TooCloseToCurve { point: String, distance: f64 },

    #[error("holomorphic derivative vanishes at {0}")]
    DegenerateDerivative(String),

    #[error("jacobian is not positive at {0}")]
    NegativeJacobian(String),

    #[error("principal log branch violated at {0}")]
    BranchViolation(String),

    #[error("point {0} is outside the extension annulus")]
    OutsideAnnulus(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn non_finite(at: impl std::fmt::Display) -> Self {
        Error::NonFinite { at: at.to_string() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
