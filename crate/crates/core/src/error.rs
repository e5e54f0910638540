use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed number `{0}`")]
    Parse(String),
    #[error("radicand {0} is not square-free")]
    NotSquareFree(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot mix sqrt({0}) and sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("precision exhausted at depth {0}")]
    PrecisionExhausted(usize),
    #[error("floor not certifiable at level {0}")]
    UncertifiableFloor(usize),
    #[error("x = {0:e} is too close to the singularity at 0")]
    Singularity(f64),
    #[error("insufficient depth: need {need}, have {have}")]
    InsufficientDepth { need: usize, have: usize },
    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Precision,
    Tolerance,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::PrecisionExhausted(_)
            | Error::UncertifiableFloor(_)
            | Error::InsufficientDepth { .. } => ErrorKind::Precision,
            Error::ToleranceNotMet(_) => ErrorKind::Tolerance,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
