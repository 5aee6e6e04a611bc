use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed combinatorial input (incompatible strips, bad words, missing annotations).
    #[error("structural error: {0}")]
    Structural(String),

    /// An exhaustive computation would exceed its configured budget.
    #[error("resource error: {what} needs {required} configurations, budget is {budget}")]
    Resource {
        what: String,
        required: f64,
        budget: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::Domain(message.into()))
}

pub(crate) fn structural<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::Structural(message.into()))
}
