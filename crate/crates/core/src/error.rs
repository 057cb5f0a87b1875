use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arity mismatch: expected {expected} variables, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("{0} requires a prime field")]
    RequiresPrimeField(&'static str),
    #[error("polynomial parse error: {0}")]
    Parse(String),
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),
    #[error("ambient dimension {requested} exceeds the cap {cap}")]
    AmbientCap { requested: usize, cap: usize },
    #[error("sampling exhausted on {label} after {attempts} draws: {reason}")]
    SamplingExhausted {
        label: String,
        attempts: usize,
        reason: String,
    },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("ill-formed variety handle: {0}")]
    IllFormed(String),
    #[error("witness is a singular point of its defining equations")]
    SingularWitness,
    #[error("no tangent hyperplane: the tangent spaces span the ambient space")]
    NoTangentHyperplane,
    #[error("linear form is not tangent at the witness")]
    NotTangent,
    #[error("projection center fills the ambient space")]
    CenterFillsAmbient,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("cross-prime disagreement: {0}")]
    PrimeDisagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
