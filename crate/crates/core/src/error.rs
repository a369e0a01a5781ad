use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: dimension mismatch, empty trajectory, unvisited point.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Arguments outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested trajectory length (or candidate space) admits no solution.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A solver policy is missing a required parameter.
    #[error("configuration error: {0}")]
    Config(String),
    /// A search exceeded its state budget.
    #[error("resource limit: {0}")]
    Resource(String),
}
