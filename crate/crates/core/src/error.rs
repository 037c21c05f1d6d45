use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("infeasible schedule: {0}")]
    InfeasibleSchedule(&'static str),
    #[error("invalid schedule character {0:?} (expected '1' or '2')")]
    BadSlotChar(char),
    #[error("malformed schedule tuple: {0}")]
    BadTuple(&'static str),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("drop probability {0} outside [0, 1)")]
    DropProbability(f64),
    #[error("invalid source parameter: {0}")]
    InvalidSource(&'static str),
    #[error("weights must sum to 1 (got {0})")]
    WeightsNotNormalized(f64),
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("search bounds cross: a_min = {a_min}, a_max = {a_max}")]
    DegenerateBounds { a_min: f64, a_max: f64 },
    #[error("brute-force cycle length {max_u} exceeds cap {cap}")]
    CapExceeded { max_u: usize, cap: usize },
    #[error("invalid search parameter: {0}")]
    InvalidSearch(&'static str),
    #[error("invalid service model: {0}")]
    InvalidService(&'static str),
    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(&'static str),
    #[error("service model does not match scenario for source {0}")]
    ServiceMismatch(u8),
    #[error("P-GAW probability {0} must lie strictly between 0 and 1")]
    PgawProbability(f64),
    #[error("grid step {0} must lie in (0, 0.1]")]
    GridStep(f64),
}
