use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {0} exceeds the supported size 2^20")]
    FieldTooLarge(u64),
    #[error("element index {index} out of range for a field of order {order}")]
    ElementOutOfRange { index: u64, order: u32 },
    #[error("cannot parse field element {0:?}")]
    ParseElement(String),
    #[error("element has nonzero trace; the Artin-Schreier equation has no root")]
    NonZeroTrace,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}
