use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid minimal polynomial: {0}")]
    InvalidMinpoly(String),

    #[error("minimal polynomial is reducible over Q: {0}")]
    ReducibleMinpoly(String),

    #[error("field mismatch: elements belong to different coefficient fields ({left} vs {right})")]
    FieldMismatch { left: String, right: String },

    #[error("invalid rational map: {0}")]
    InvalidMap(String),

    #[error("size budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root finding failed to converge for polynomial {poly}")]
    RootFinding { poly: String },

    #[error("path tracking failed on {path}: {reason}")]
    Tracking { path: String, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(position: impl ToString, message: impl Into<String>) -> Self {
        Error::Parse {
            position: position.to_string(),
            message: message.into(),
        }
    }

    /// True for failures that indicate a numerical fault inside the library
    /// rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Consistency(_) | Error::Tracking { .. } | Error::RootFinding { .. }
        )
    }
}
