use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is mathematically valid but larger than this build supports.
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("elements belong to different fields (d = {left} and d = {right})")]
    MixedField { left: u64, right: u64 },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },

    #[error("unit cache line {line} (d = {d}): {reason}")]
    UnitCache {
        line: usize,
        d: String,
        reason: String,
    },

    #[error("checkpoint file is malformed: {0}")]
    Checkpoint(String),

    /// The rule-based classifier and the direct oracle disagreed.
    #[error("classifier disagrees with direct computation for n = {n}, d = {d}")]
    Inconsistent { n: String, d: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
