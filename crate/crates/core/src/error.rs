use thiserror::Error;

/// Errors raised by the geometry, calculus, constants and solver layers.
#[derive(Debug, Error)]
pub enum KgError {
    #[error("invalid scale {0}: dilation factors must be positive")]
    InvalidScale(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("no admissible cylinders: {0}")]
    Scale(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("solver became unstable at step {step}: {detail}")]
    Instability { step: usize, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("iterative solver did not converge: {0}")]
    NotConverged(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("regression pin exceeded: {0}")]
    PinExceeded(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KgError>;
