use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value {value} at t = {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("tridiagonal eigen-solve did not converge (eigenvalue {index}, {iterations} iterations)")]
    NoConvergence { index: usize, iterations: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("coefficient sets were built for different Jacobi parameters")]
    ParamsMismatch,

    /// A precondition declared by an experiment is violated.
    #[error("parameter gate: {0}")]
    Gate(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the caller's configuration rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::InvalidParameter(_)
                | Error::Gate(_)
                | Error::Unsupported(_)
                | Error::LengthMismatch(_)
                | Error::ParamsMismatch
        )
    }
}
