use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An exact count or product no longer fits in 64 bits.
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    /// Trial division up to the configured bound left a composite cofactor.
    #[error(
        "cannot factor {n}: cofactor {cofactor} has no prime factor below the trial bound {bound}"
    )]
    FactorizationLimit { n: u64, cofactor: u64, bound: u64 },

    #[error("resource limit exceeded: {what} ({requested} > {limit})")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("search budget of {nodes} nodes exhausted before the search resolved")]
    BudgetExhausted { nodes: u64 },

    #[error("{0} is not squarefree")]
    NotSquarefree(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
