use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field order {0} is not an odd prime")]
    InvalidFieldOrder(u64),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("{0}: the zero polynomial is not a valid input")]
    ZeroPolynomial(&'static str),

    #[error("{0}: polynomial must be monic")]
    NotMonic(&'static str),

    #[error("modulus {0} is not irreducible")]
    NotIrreducible(String),

    #[error("polynomial {0} is not squarefree")]
    NotSquarefree(String),

    #[error("polynomial {0} is a perfect square")]
    PerfectSquare(String),

    #[error("irreducible table covers degree {have}, need {needed}")]
    TableTooSmall { needed: usize, have: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An identity that must hold exactly failed; this is a bug, not bad input.
    #[error("arithmetic inconsistency: {0}")]
    Inconsistency(String),

    #[error("root finder did not converge after {iterations} iterations")]
    RootFinderDiverged { iterations: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache {path}: expected header `{expected}`, found `{found}`")]
    CacheVersion {
        path: String,
        expected: String,
        found: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
