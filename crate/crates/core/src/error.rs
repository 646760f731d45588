use thiserror::Error;

/// Errors raised by the model, the protocols and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the formula being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters that cannot describe a valid experiment.
    #[error("configuration error: {0}")]
    Config(String),

    /// The evolving network reached a state the growth rule cannot continue from.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
