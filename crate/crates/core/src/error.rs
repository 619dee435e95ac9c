use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: file is not valid UTF-8 (byte offset {offset})")]
    Encoding { path: PathBuf, offset: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no entries")]
    NoEntries,

    #[error("degenerate label set: need at least 2 distinct labels, found {0}")]
    DegenerateLabelSet(usize),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("unknown dev label {0:?}")]
    UnknownDevLabel(String),

    #[error("invalid feature spec {0:?}")]
    InvalidFeatureSpec(String),

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("non-finite feature weight at instance {instance}")]
    NonFinite { instance: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("feature index {index} out of range for {size} features")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u64),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
