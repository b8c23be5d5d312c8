use thiserror::Error;

/// Failure cases surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Raised *before* the offending evaluation runs; the ledger is left
    /// unchanged so callers can stop cleanly at the last completed step.
    #[error("evaluation budget exhausted: next step needs {needed}, only {remaining} left")]
    BudgetExhausted { needed: u64, remaining: u64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
