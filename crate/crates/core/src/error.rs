use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {value} outside the domain of `{what}`")]
    Domain { what: &'static str, value: f64 },

    #[error("singular curvilinear coordinates: 1 - u*curvature = {factor} at s = {s}")]
    SingularCoordinates { s: f64, factor: f64 },

    #[error("singular parallel offset: d*curvature = {product} >= 1")]
    SingularOffset { product: f64 },

    #[error("regime violated for {what}: {detail}")]
    Regime { what: &'static str, detail: String },

    #[error("mass matrix is not positive definite (sampled quotient {quotient})")]
    NotPositiveDefinite { quotient: f64 },

    #[error("eigensolver did not converge after {iterations} iterations; best residuals {residuals:?}")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("numerical overflow or underflow in {0}")]
    Range(&'static str),

    #[error("root bracket [{lo}, {hi}] does not change sign")]
    NoBracket { lo: f64, hi: f64 },
}

impl Error {
    /// True for failures of an iterative numerical procedure (as opposed to
    /// invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Range(_) | Error::NoBracket { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
