use thiserror::Error;

use crate::poly::MAX_VARS;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("{0} variables requested, at most {MAX_VARS} are supported")]
    TooManyVariables(usize),
    #[error("operands live over different signatures")]
    SignatureMismatch,
    #[error("{0}: input must be nonzero")]
    ZeroInput(&'static str),
    #[error("division leaves a nonzero remainder")]
    InexactDivision,
    #[error("invalid monomial order: {0}")]
    InvalidOrder(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("computation cancelled")]
    Cancelled,
    #[error("{0} is not a member of the ideal")]
    NotInIdeal(String),
    #[error("Bernstein-Sato ideal of the pair is required but was not supplied")]
    MissingBsIdeal,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_) | Error::Cancelled)
    }
}
