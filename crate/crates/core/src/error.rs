use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid metric: {0}")]
    Metric(String),

    #[error(
        "subset of size {size} exceeds exact enumeration capacity {max_size}; use the `balls` or `sweep` heuristic"
    )]
    Capacity { size: usize, max_size: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("orientation error: {0}")]
    Orientation(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    Convergence { iterations: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }
}
