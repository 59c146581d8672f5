use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An argument lies outside the domain of a function (e.g. `arccos(1.5)`).
    #[error("domain error: {0}")]
    Domain(String),

    /// The public parameter is one of the rational-cosine angles.
    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    /// The requested working precision cannot carry the result.
    #[error("precision budget violated: need {required} working digits, have {available}")]
    Precision { required: u64, available: u64 },

    /// Malformed decimal or integer literal.
    #[error("parse error: {0}")]
    Parse(String),

    /// Command line misuse.
    #[error("usage error: {0}")]
    Usage(String),

    /// Two computations that must agree did not.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
