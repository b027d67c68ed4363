use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{function}: argument {value} outside the supported domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `|r|` exceeded one by more than roundoff, which only happens when the
    /// quarter-period series are no longer accurate.
    #[error("auxiliary quantity r = {0} lies outside [-1, 1] beyond roundoff")]
    UnphysicalR(f64),

    #[error("{what} did not converge after {terms} terms")]
    NotConverged { what: &'static str, terms: usize },

    #[error("unknown method `{name}` (available: {available})")]
    UnknownMethod { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
