use thiserror::Error;

/// Errors shared by all modules of the lab.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("generalized inverse is unbounded: {0}")]
    Unbounded(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("singular basis")]
    Singular,

    #[error("degenerate basis: |det| = {0}, expected 1")]
    Degenerate(f64),

    #[error("bracket does not straddle: {0}")]
    Bracket(String),

    #[error("summands converged before a block could close: {0}")]
    DivergenceExhausted(String),

    #[error("wrong mode: {0}")]
    WrongMode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
