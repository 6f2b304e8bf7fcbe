use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A real-valued function was evaluated outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The parameter triple does not describe a probability distribution.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// A series did not reach the requested tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// A factorial-bearing computation was asked for an order beyond what
    /// double precision can represent.
    #[error("order {requested} exceeds the double-precision limit {limit}")]
    Overflow { requested: usize, limit: usize },
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
