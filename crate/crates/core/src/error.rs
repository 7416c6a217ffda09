use thiserror::Error;

/// Errors shared across the toolkit.
///
/// Every rigorous routine returns `Result<_, Error>`; a caller can therefore
/// distinguish "the claim is false" (an `Ok` carrying a refutation) from "the
/// computation cannot be carried out" (an `Err`).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("map index {index} out of range for a system with {len} maps")]
    BadIndex { index: usize, len: usize },

    #[error("division by a quantity that may be zero")]
    DivisionByZero,

    #[error("undecidable at current precision ({prec} bits): {context}")]
    PrecisionExhausted { prec: u32, context: String },

    #[error("strong separation not certified: {0}")]
    NotSeparated(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("factorization exceeds supported bounds for {0}")]
    FactorBound(String),

    #[error("certificate malformed: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
