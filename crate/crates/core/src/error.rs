use thiserror::Error;

/// Errors produced anywhere in the codec, the hashing layer or the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("access structure has no qualified set")]
    EmptyQualified,
    #[error("participant {participant} is outside 1..={count}")]
    ParticipantRange { participant: usize, count: usize },
    #[error("set {0} is both qualified and unqualified")]
    Overlap(String),
    #[error("parameter out of range: {0}")]
    ParamRange(String),
    #[error("joint distribution is invalid: {0}")]
    InvalidPmf(String),
    #[error("unknown information expression `{0}`")]
    UnknownExpression(String),
    #[error("length {0} is not a power of two")]
    LengthNotPow2(usize),
    #[error("index {index} out of range for block length {len}")]
    IndexRange { index: usize, len: usize },
    #[error("exact enumeration too large: {0}")]
    TooLargeForExact(String),
    #[error("index-set inclusion cannot be repaired: {0}")]
    InclusionUnrepairable(String),
    #[error("frozen positions do not match the high-entropy set of decoder {0}")]
    FrozenSetMismatch(String),
    #[error("random budget does not match index sets: {0}")]
    BudgetMismatch(String),
    #[error("index sets violate V(U|X) within H(U|Y) for decoder {0}")]
    InclusionViolation(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("delta is infeasible: {0}")]
    InfeasibleDelta(String),
    #[error("block plan does not match input: {0}")]
    PlanMismatch(String),
    #[error("hash seed must be nonzero")]
    ZeroSeed,
    #[error("malformed container: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
