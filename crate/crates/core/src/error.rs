use thiserror::Error;

use crate::lp::LpStatus;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes that do not line up (matrix vs point count, ragged rows).
    #[error("structural error: {0}")]
    Structure(String),
    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("metric axioms violated: {0}")]
    InvalidMetric(String),
    #[error("LP solver finished with status {status:?}")]
    Solver { status: LpStatus },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
