use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary (max residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("unknown measurement {0:?}")]
    UnknownMeasurement(String),
    #[error("unknown outcome {outcome:?} for measurement {measurement:?}")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("unknown preparation {0:?}")]
    UnknownPreparation(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("preparation covers {found} states but the model has {expected}")]
    StateSetMismatch { expected: usize, found: usize },
    #[error("outcome {0:?} has probability zero; conditioning on it is undefined")]
    ZeroProbabilityOutcome(String),
    #[error("mixture weights sum to {0}, not 1")]
    WeightsNotNormalized(String),
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("post-selection outcome has probability zero under {0:?}; conditionals are undefined")]
    UndefinedConditional(String),
    #[error("parameter constraint violated: {0}")]
    ParameterConstraint(String),
    #[error("model is not {0}")]
    WrongModelKind(&'static str),
    #[error("need at least {needed} rounds for choice {choice:?}, got {found}")]
    InsufficientRounds {
        choice: String,
        needed: usize,
        found: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
