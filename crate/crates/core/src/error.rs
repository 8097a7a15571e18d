use thiserror::Error;

/// Errors raised by model construction, the analytic solvers and the harness.
#[derive(Debug, Error)]
pub enum EpiError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    /// The requested quantity only exists in the supercritical regime.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("solver failed to converge: {0}")]
    NoConvergence(String),

    /// A simulation state invariant was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A configuration that is well-formed but asks for a claim that does not hold.
    #[error("refused configuration: {0}")]
    Refused(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, EpiError>;
