use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("degenerate statistics: {0}")]
    Degenerate(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 1,
            LabError::Degenerate(_) => 2,
            LabError::Internal(_) => 3,
        }
    }
}

impl From<mstperc::Error> for LabError {
    fn from(e: mstperc::Error) -> Self {
        match e {
            mstperc::Error::InvalidParameter(m) => LabError::Config(m),
            mstperc::Error::Degenerate(m) => LabError::Degenerate(m),
            other => LabError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Internal(e.to_string())
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
