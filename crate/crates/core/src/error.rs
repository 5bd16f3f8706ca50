//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("time {t} outside waveform domain [{start}, {end}]")]
    Domain { t: f64, start: f64, end: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("insufficient atoms: need {needed}, have {available}")]
    InsufficientAtoms { needed: usize, available: usize },

    #[error("invalid move plan: {0}")]
    InvalidPlan(String),

    /// Rearrangement retries exhausted; carries the last occupancy reached.
    #[error("assembly failed after {attempts} attempts")]
    AssemblyFailed { attempts: usize, partial: Vec<bool> },

    #[error("rydberg leakage: residual |r> population {population:.3e} above threshold")]
    RydbergLeakage { population: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
