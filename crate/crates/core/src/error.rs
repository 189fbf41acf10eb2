use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("extension degree must be positive")]
    ZeroDegree,

    #[error("field of order {p}^{degree} exceeds the supported limit of {limit} elements")]
    ResourceLimit { p: u64, degree: u32, limit: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("element {value} does not lie in the subfield of degree {degree}")]
    NotInSubfield { value: u32, degree: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("vectors have inconsistent lengths ({expected} vs {found})")]
    Ragged { expected: usize, found: usize },

    #[error("ambient dimension mismatch ({0} vs {1})")]
    AmbientMismatch(usize, usize),

    #[error("enumeration needs {required} steps but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("operation not available for this element kind: {0}")]
    WrongKind(String),

    #[error("map is not invertible")]
    NotInvertible,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameters(msg.into())
}
