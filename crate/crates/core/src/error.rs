use thiserror::Error;

/// Unified error type for the whole suite.
///
/// The variant determines the process exit code used by the CLI:
/// configuration problems map to 2, numerical/geometry failures to 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or out-of-contract argument.
    #[error("config error: {0}")]
    Config(String),
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Numerical failure (non-finite state, singular system, non-convergence).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Geometry that violates an operation's preconditions.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Mismatched operand dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    /// CLI exit code for this error kind: 2 for configuration errors,
    /// 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Numerical(_) | Error::Geometry(_) | Error::Dimension { .. } => 3,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
