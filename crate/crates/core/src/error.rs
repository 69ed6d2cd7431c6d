use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable (for example the inverse of a CDF at 1).
    #[error("range error: {0}")]
    Range(String),

    /// Inputs sit exactly on a boundary the underlying inequality does not cover.
    #[error("unsupported boundary: {0}")]
    UnsupportedBoundary(String),

    #[error("numerical failure in {routine}: {detail}")]
    Numerical { routine: &'static str, detail: String },

    /// An estimate has no usable information (all weights zero, zero denominator, ...).
    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
