use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("grid resolution too coarse: {0}")]
    Resolution(String),
    #[error("singular loop path: {0}")]
    SingularPath(String),
    #[error("geometric condition violated: {0}")]
    ConditionViolation(String),
    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
