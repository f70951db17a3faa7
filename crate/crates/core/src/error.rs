//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A dataset mixture weight asks for more tokens than the dataset holds.
    #[error("dataset `{name}` requests {requested} tokens but only {available} are available")]
    WeightExceedsAvailable {
        name: String,
        requested: u64,
        available: u64,
    },

    /// The model reply to an argument-extraction prompt was not a JSON object.
    #[error("extraction_failed: {0}")]
    ExtractionFailed(String),

    /// Extracted arguments do not satisfy the function schema.
    #[error("validation_failed: {0}")]
    ValidationFailed(String),

    #[error("unknown function: {0}")]
    UnknownFunction(String),

    /// A text-generation client call failed.
    #[error("generation failed: {0}")]
    Generation(String),

    /// Recursive reduction stopped shrinking before fitting the input budget.
    #[error("recursion did not converge within depth {0}")]
    RecursionLimit(usize),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a precondition violation.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
