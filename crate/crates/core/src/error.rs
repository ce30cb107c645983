use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cipher configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed key material: {0}")]
    MalformedKey(String),

    #[error("block counter overflow: {blocks} blocks requested from counter {start:#034x}")]
    CounterOverflow { start: u128, blocks: u64 },

    #[error("empty pattern")]
    EmptyPattern,

    #[error("alphabet mismatch: text is {text}, pattern is {pattern}")]
    AlphabetMismatch {
        text: &'static str,
        pattern: &'static str,
    },

    #[error("window of {window} symbols is smaller than the longest pattern ({longest} symbols)")]
    WindowTooSmall { window: usize, longest: usize },

    #[error("input too short: need at least {needed} bytes, got {got}")]
    Undersized { needed: usize, got: usize },

    #[error("unsupported m-gram size {0} (expected 8, 16 or 32)")]
    UnsupportedMgram(u32),

    #[error("statistic undefined: {0}")]
    Degenerate(&'static str),

    #[error("rotation amount {0} outside 1..=31")]
    RotationOutOfRange(u32),

    #[error("shift amount {0} outside 0..32")]
    ShiftOutOfRange(u32),

    #[error("invalid trial configuration: {0}")]
    InvalidTrials(String),

    #[error("expected {expected} words, got {got}")]
    WordCount { expected: usize, got: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

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
}
