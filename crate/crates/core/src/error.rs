use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parent array does not describe a single rooted acyclic tree.
    #[error("invalid tree structure: {0}")]
    Structure(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("runtime limit exceeded: {0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure(cond: bool, err: impl FnOnce() -> Error) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(err())
    }
}

/// Stability index must lie in `(1, 2]`.
pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    ensure(gamma > 1.0 && gamma <= 2.0, || {
        Error::Domain(format!("gamma must lie in (1, 2], got {gamma}"))
    })
}
