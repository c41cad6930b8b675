use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("matrix dimension {n} exceeds the dense cap {cap}")]
    Overflow { n: usize, cap: usize },
    #[error("{path}: sha256 {found} does not match the pinned {expected}")]
    Checksum { path: PathBuf, expected: String, found: String },
    #[error("fixture {0} not found; set QUOTIENT_FIXTURES or place it under fixtures/")]
    MissingFixture(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] quotient_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse { line, message: message.into() }
    }

    /// Process exit code: 2 for non-convergence, 3 for a failed
    /// self-adjointness check, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(quotient_core::Error::NonConvergence(_)) => 2,
            Self::Core(quotient_core::Error::NotSelfAdjoint { .. }) => 3,
            _ => 1,
        }
    }
}
