use thiserror::Error;

/// Errors raised by the network SIR toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SirError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state outside the invariant set at node {node}: {reason}")]
    OutOfSimplex { node: usize, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("interaction matrix is not rank-1")]
    NotRankOne,

    #[error("interaction matrix is identically zero")]
    ZeroMatrix,

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("no sign change on bracket [{t0}, {t1}]")]
    NoSignChange { t0: f64, t1: f64 },

    #[error("fixed-point equation undefined for y = 0 with xtilde >= gamma")]
    DomainExcluded,

    #[error("beta must exceed gamma (beta = {beta}, gamma = {gamma})")]
    SupercriticalityRequired { beta: f64, gamma: f64 },

    #[error("parameters are not of the form A = beta 1 b^T")]
    NotSpecialForm,

    #[error("beta * xbar(0) = {value} does not exceed gamma = {gamma}")]
    SubcriticalAggregate { value: f64, gamma: f64 },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("susceptible fraction must be positive, got {0}")]
    NonpositiveSusceptibles(f64),

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    #[error("node index {index} out of range for n = {n}")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for SirError {
    fn from(e: std::io::Error) -> Self {
        SirError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SirError>;
