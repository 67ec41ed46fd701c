use thiserror::Error;

/// Errors produced by the covering, evaluation and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point set must not be empty")]
    EmptySet,

    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("operation requires at least two classes")]
    SingleClass,

    #[error("exact solver exceeded its node limit of {limit}; best cover found has {} points", incumbent.len())]
    NodeLimitExceeded { limit: u64, incumbent: Vec<usize> },

    #[error("budget {budget} is smaller than the number of classes ({classes})")]
    BudgetBelowClassCount { budget: usize, classes: usize },

    #[error("budget {budget} exceeds the size {size} of class {class}")]
    BudgetExceedsClass {
        class: usize,
        budget: usize,
        size: usize,
    },

    #[error("selection is not a valid cover: {} point(s) uncovered", violations.len())]
    InvalidCover { violations: Vec<usize> },

    #[error("cover solution carries no weights")]
    MissingWeights,

    #[error("unsupported model: {0}")]
    UnsupportedModel(&'static str),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{method}: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
