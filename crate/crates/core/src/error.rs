use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The spectral truncation does not hold every eigenvalue the request needs.
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    /// The grid is too coarse to certify the requested geometric property.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("containment error: {0}")]
    Containment(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("no convergence after {iterations} iterations: {context} (best residual {best_residual:.3e})")]
    Convergence {
        context: String,
        iterations: usize,
        best_residual: f64,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A property that must hold by theory failed on the computed data.
    #[error("property violated: {0}")]
    Violation(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
