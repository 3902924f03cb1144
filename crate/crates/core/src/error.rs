use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("truth table is not monotone")]
    NotMonotone,

    #[error("invalid cycle type: {0}")]
    InvalidCycleType(String),

    #[error("{what} would hold {count} elements, over the budget of {budget}")]
    Capacity {
        what: String,
        count: String,
        budget: u64,
    },

    #[error("infeasible at configured budget: {0}")]
    Infeasible(String),

    #[error("method not applicable: {0}")]
    NotApplicable(String),

    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(#[from] crate::poset::OrderViolation),

    #[error("Burnside sum {sum} is not divisible by {divisor}")]
    NotDivisible { sum: String, divisor: String },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("no known value for {0}")]
    MissingKey(String),

    #[error("malformed MBFS data in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
