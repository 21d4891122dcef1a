use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("i must be ≥ 2 (got {0})")]
    CriticalSizeTooSmall(usize),
    #[error("{name} must be positive (got {value})")]
    NonPositiveRate { name: &'static str, value: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("step budget of {max_steps} steps exhausted at T = {time}")]
    StepBudgetExhausted { max_steps: usize, time: f64 },
    #[error("component {index} reached {value:e} at T = {time} (floor -{floor:e})")]
    NegativityViolation { index: usize, value: f64, time: f64, floor: f64 },
    #[error("non-finite value in component {index} at T = {time}")]
    NonFinite { index: usize, time: f64 },
    #[error("step size underflow at T = {time} (h = {step:e})")]
    StepSizeUnderflow { time: f64, step: f64 },
    #[error("series order must be at least {min} (got {order})")]
    OrderTooSmall { order: usize, min: usize },
    #[error("zero pivot solving for {variable} at order {order}")]
    ZeroPivot { variable: String, order: usize },
    #[error("unexpected pivot {found} solving for {variable} at order {order} (expected ±{expected})")]
    UnexpectedPivot { variable: String, order: usize, found: String, expected: String },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("non-positive value {value} at T = {time}")]
    NonPositiveValue { value: f64, time: f64 },
    #[error("negative state entry c_{index} = {value}")]
    NegativeState { index: usize, value: String },
    #[error("{0}")]
    OutOfRange(String),
    #[error("empty state")]
    EmptyState,
    #[error(transparent)]
    Parse(#[from] ParseRationalError),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
