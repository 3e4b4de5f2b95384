use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("no convergence after {iterations} iterations (best estimate {best})")]
    NoConvergence { best: f64, iterations: usize },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("divergence at round {round}{}", client.map(|c| format!(", client {c}")).unwrap_or_default())]
    Divergence { round: usize, client: Option<usize> },

    #[error("{check} violated at round {round}: deviation {deviation:e} exceeds {tolerance:e}")]
    Verification {
        check: &'static str,
        round: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dim(expected: usize, actual: usize) -> Self {
        Error::Dimension { expected, actual }
    }
}
