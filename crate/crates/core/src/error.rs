use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("inhomogeneous polynomial: monomials of degree {first} and {second}")]
    Inhomogeneous { first: u32, second: u32 },
    #[error("the zero polynomial does not define a variety")]
    ZeroPolynomial,
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("not a morphism: {0}")]
    InvalidMap(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("degenerate elimination: {0}")]
    Degenerate(String),
    #[error("solver shortfall: {0}")]
    SolverShortfall(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("inexact component where exact data is required: {0}")]
    Inexact(String),
}

pub type Result<T> = std::result::Result<T, Error>;
