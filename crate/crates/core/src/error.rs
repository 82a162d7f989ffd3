use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("finite-difference step error: {0}")]
    Step(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("too many unresolved probes: {0}")]
    Unresolved(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("non-finite state: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
