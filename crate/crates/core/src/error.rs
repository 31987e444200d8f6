use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("search space size overflows u64")]
    SpaceOverflow,

    #[error("search space has {size} genotypes, limit is {limit}")]
    SpaceTooLarge { size: u64, limit: u64 },

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("unknown evaluation column `{0}`")]
    UnknownColumn(String),

    #[error("genotype `{0}` is not in the benchmark")]
    MissingGenotype(String),

    #[error("malformed benchmark, line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("invalid metric selection: {0}")]
    Selection(String),

    #[error("unsupported dimension {0} (only 2-D hypervolume is exact)")]
    UnsupportedDimension(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("results are not comparable: {0}")]
    Mismatch(String),

    #[error("run {index} (seed {seed}) failed: {source}")]
    Run {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
