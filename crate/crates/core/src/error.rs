use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands have different radicands ({0} and {1})")]
    MixedRadicands(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("alpha is rational; its spectrum has multiplicities")]
    RationalAlpha,
    #[error("alpha must be positive")]
    NonPositiveAlpha,
    #[error("alpha < 1/Q: no approximant a/q with a >= 1 and q <= Q")]
    AlphaTooSmall,
    #[error("comparison could not be certified within {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("factorization of a {bits}-bit integer did not complete")]
    FactorizationTimeout { bits: u64 },
    #[error("odd index required, got {0}")]
    OddIndexRequired(u64),
    #[error("D = {0} is a perfect square")]
    SquareD(u64),
    #[error("prime pool below {0} cannot reach the density window")]
    PoolExhausted(u64),
    #[error("divisibility violated: {0}")]
    DivisibilityViolation(String),
    #[error("degenerate divisor: {0}")]
    DegenerateDivisor(String),
    #[error("invalid quadratic family parameters: {0}")]
    InvalidSpec(String),
    #[error("X = {x} exceeds the memory bound {bound}")]
    MemoryBound { x: u64, bound: u64 },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
