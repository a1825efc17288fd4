use thiserror::Error;

/// Errors raised by the exact core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible radicands: sqrt({0}) and sqrt({1}) cannot be mixed")]
    IncompatibleRadicands(i64, i64),
    #[error("invalid radicand {0}")]
    InvalidRadicand(i64),
    #[error("{0}: zero polynomial is not allowed here")]
    ZeroPolynomial(&'static str),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("the function is constant")]
    ConstantFunction,
    #[error("lambda must be non-zero")]
    ZeroLambda,
    #[error("the value infinity is shared automatically and is not a valid query")]
    InfiniteValue,
    #[error("denominator is not squarefree; use the numeric residue path")]
    NonSquarefreeDenominator,
    #[error("polynomial has repeated zeros")]
    RepeatedZeros,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("grid of {size} points exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: u128 },
    #[error("root finder did not converge after {iterations} iterations (max residual {residual})")]
    NonConvergence { iterations: usize, residual: String },
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
