use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value is not invertible modulo the given modulus")]
    NotInvertible,

    /// The law cannot be inverted in its parameter for the requested shape.
    #[error("control law is not bijective in its parameter: {0}")]
    NotBijective(String),

    /// A real value does not fit the encoder's representable range.
    #[error("encoding overflow: {0}")]
    Overflow(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("scheme mismatch: expected {expected}, found {found}")]
    SchemeMismatch { expected: String, found: String },

    #[error("rank deficient system: {0}")]
    RankDeficient(String),

    #[error("oracle query budget of {0} exhausted")]
    BudgetExhausted(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
