use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("feasibility cap exceeded: estimated cost {cost:.3e} exceeds cap {cap:.3e}")]
    Cap { cost: f64, cap: f64 },
    #[error("budget exceeded: estimated cost {cost:.3e} exceeds budget {budget:.3e}")]
    Budget { cost: f64, budget: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("state count mismatch: {0} vs {1}")]
    StateMismatch(usize, usize),
    #[error("missing entry: {0}")]
    Missing(String),
    #[error("eigensolver did not converge (matrix digest {0})")]
    Eigen(String),
    #[error("unknown artifact {0}")]
    UnknownArtifact(String),
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors that stem from user input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
