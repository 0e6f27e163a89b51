use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("operands are defined on different frames")]
    FrameMismatch,

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("set function does not correspond to a valid mass function: {0}")]
    InvalidSetFunction(String),

    #[error("total conflict (m(∅) = {conflict}) cannot be normalized with Dempster's rule")]
    TotalConflict { conflict: f64 },

    #[error("every likelihood is zero")]
    AllZeroLikelihood,

    #[error("invalid possibility distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid constraint vector: {0}")]
    InvalidConstraint(String),

    #[error("missing value for variable `{variable}`")]
    MissingVariable { variable: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is not crisp: {0}")]
    NotCrisp(String),

    #[error("conflict log is empty")]
    EmptyLog,

    #[error("trace has {len} records, shorter than the window of {window}")]
    TraceTooShort { len: usize, window: usize },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}
