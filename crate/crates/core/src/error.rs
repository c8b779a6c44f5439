//! Error type shared across the library.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // Pass-through wrappers: the inner Display carries the full story, so
    // printing an error chain does not repeat it.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// Row numbers are 1-based data rows (the header is row 0).
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("column not found: {0}")]
    ColumnNotFound(String),

    #[error("invalid discretization spec: {0}")]
    InvalidSpec(String),

    #[error("column {column:?} is not numeric: row {row} holds {value:?}")]
    NonNumericColumn {
        column: String,
        row: usize,
        value: String,
    },

    #[error("column {column:?} row {row}: {value:?} is not a boolean")]
    NotBoolean {
        column: String,
        row: usize,
        value: String,
    },

    #[error("column {column:?} row {row}: missing value not allowed here")]
    MissingValue { column: String, row: usize },

    #[error("invalid rank column {column:?}: {reason}")]
    InvalidRanks { column: String, reason: String },

    #[error("invalid rank valuation: {0}")]
    InvalidValuation(String),

    #[error("invalid outcome spec {spec:?}: {reason}")]
    InvalidOutcomeSpec { spec: String, reason: String },

    #[error("outcome is undefined on every row; nothing to mine")]
    EmptyOutcome,

    #[error("support threshold {0} out of range (0, 1]")]
    InvalidThreshold(f64),

    #[error("outcome vector covers {found} rows but the dataset has {expected}")]
    OutcomeLength { expected: usize, found: usize },

    #[error("record cap {cap} exceeded; raise the support threshold or the cap")]
    RecordCap { cap: usize },

    #[error("attribution of {itemset} requires subset {missing} with a defined divergence")]
    MissingSubset { itemset: String, missing: String },

    #[error("invalid itemset: {0}")]
    InvalidItemset(String),
}
