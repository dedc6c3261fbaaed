use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("corrupt configuration: {0}")]
    CorruptConfiguration(String),
    #[error("inconsistent chain state: {0}")]
    InconsistentState(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("not a density operator: {0}")]
    NotAState(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown experiment kind `{0}`")]
    UnknownExperiment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::InvalidParameter(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
