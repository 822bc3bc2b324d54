use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },

    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { expected: String, found: String },

    #[error("learner {0:?} has no profile")]
    MissingProfile(String),

    #[error("no quantified value for parameter {0}")]
    MissingValue(u8),

    #[error("time must be positive")]
    NonPositiveTime,

    #[error("insufficient points: asked for {wanted} seeds from {available} points")]
    InsufficientPoints { wanted: usize, available: usize },

    #[error("no points to cluster")]
    NoPoints,

    #[error("no transactions")]
    NoTransactions,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}
