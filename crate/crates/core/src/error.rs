use thiserror::Error;

use crate::lie::ConditionFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The chain description is internally inconsistent.
    #[error("model error: {0}")]
    Model(String),

    #[error("index {index} out of range {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A theorem hypothesis does not hold for the given chain.
    #[error("hypothesis violated: {0}")]
    Hypothesis(ConditionFailure),

    /// An algebraic identity in a proof trace exceeded the residual bound.
    #[error("identity `{name}` failed with residual {residual:.3e}")]
    Identity { name: String, residual: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("optimization error: {0}")]
    Optimization(String),

    #[error("parse error in `{key}`: {msg}")]
    Parse { key: String, msg: String },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            msg: msg.into(),
        }
    }
}
