use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("address width must be in 1..={max}, got {got}")]
    AddressWidth { got: usize, max: usize },

    #[error("data width must be in 1..=64, got {0}")]
    DataWidth(usize),

    #[error("entry {index} value {value:#x} does not fit in {width} bits")]
    EntryTooWide { index: usize, value: u64, width: usize },

    #[error("database has {0} entries, which is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("line {line}: expected {expected} characters, found {found}")]
    InconsistentWidth { line: usize, expected: usize, found: usize },

    #[error("line {line}: unexpected character {ch:?}, only '0' and '1' are allowed")]
    BadCharacter { line: usize, ch: char },

    #[error("permutation is not a bijection on 0..{len}: {reason}")]
    NotABijection { len: usize, reason: String },

    #[error("size mismatch: {what} has {got}, expected {expected}")]
    SizeMismatch { what: &'static str, got: usize, expected: usize },

    #[error("cube distance is {got}, operation requires {expected}")]
    CubeDistance { got: u32, expected: u32 },

    #[error("bad cube literal {0:?}, expected '0', '1' or '-'")]
    BadCubeChar(char),

    #[error("need at least two samples for a rank correlation, got {0}")]
    TooFewSamples(usize),

    #[error("address {address} out of range for width {width}")]
    AddressOutOfRange { address: u64, width: usize },

    #[error("exhaustive search over {size}! orderings exceeds the cap of {cap} (use --force)")]
    ExhaustiveCap { size: usize, cap: u64 },

    #[error("invalid search config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
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

pub type Result<T> = std::result::Result<T, Error>;
