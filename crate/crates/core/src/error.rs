use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps `Parse`/`Validation` to exit code 1 and
/// `BoundExceeded`/`Uncertified` to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad field parameter (non-squarefree or nonnegative d, ...).
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// A rational integer expected to be prime was not.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// Precondition violation on an operation argument.
    #[error("{0}")]
    Validation(String),

    /// Literal syntax error with byte offset into the input.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A brute-force residue enumeration would exceed the configured bound.
    /// Never downgraded to a guess.
    #[error("brute-force bound exceeded: {0}")]
    BoundExceeded(String),

    /// An enumeration report without a completeness certificate was used
    /// where a certified one is required.
    #[error("uncertified enumeration: {0}")]
    Uncertified(String),

    /// Internal consistency failure (an identity that must hold did not).
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
