use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed angle literal `{0}`")]
    MalformedAngle(String),

    #[error("malformed complex literal `{0}`")]
    MalformedComplex(String),

    #[error("overlap modulus p = {p} must lie strictly between 0 and 1")]
    InvalidOverlap { p: f64 },

    #[error("cos(phi) vanishes: the desired-state amplitude is identically zero")]
    DegeneratePhase,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("step {k} exceeds the supported maximum {max}")]
    StepTooLarge { k: u64, max: u64 },

    #[error("{what}: argument {value} is outside the function domain")]
    NumericalDomain { what: &'static str, value: f64 },

    #[error("phase condition not satisfied (sin(delta)/|beta| = {ratio})")]
    ConditionUnsatisfied { ratio: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(&'static str),

    #[error("Gram matrix is singular: spanning vectors are parallel")]
    SingularGram,

    #[error("{n} qubits requested; at most {max} are supported")]
    TooManyQubits { n: u32, max: u32 },

    #[error("malformed unitary matrix: {0}")]
    MalformedMatrix(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
