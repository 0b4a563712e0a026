use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (e.g. a non-positive LCM operand).
    #[error("domain error: {0}")]
    Domain(String),
    /// Instance or policy data violates its invariants.
    #[error("validation error: {0}")]
    Validation(String),
    /// Solver or enumeration settings are unusable.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown commodity id {0}")]
    UnknownCommodity(u64),
    /// Inclusion–exclusion over `size` multipliers exceeds the configured exponent cap.
    #[error("inclusion-exclusion over {size} multipliers exceeds the cap of {cap}")]
    Budget { size: usize, cap: usize },
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// A caller broke an internal precondition.
    #[error("internal error: {0}")]
    Internal(String),
}
