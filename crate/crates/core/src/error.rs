use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// A single malformed record. `line` is 1-based.
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("line {line}: no timestamp column; temporal analysis needs one")]
    MissingTimestamp { line: usize },

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("item {0} has no ratings")]
    UnratedItem(String),

    #[error("subset must contain exactly 3 primary and 3 secondary nodes, got {primary}+{secondary}")]
    SubsetShape { primary: usize, secondary: usize },

    #[error("motif enumeration exceeded the budget of {limit} candidate sets")]
    BudgetExceeded { limit: u64 },

    #[error("item {item}: motif enumeration exceeded the budget of {limit} candidate sets")]
    ItemBudgetExceeded { item: String, limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("population is empty")]
    EmptyPopulation,

    #[error("graph has no rated items")]
    NoRatedItems,

    #[error("need at least 2 items for correlations, got {0}")]
    TooFewItems(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the motif enumeration budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::ItemBudgetExceeded { .. })
    }
}
