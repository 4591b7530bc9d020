use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no path between vertices {0} and {1}")]
    NoPath(usize, usize),
    #[error("edge {{{0}, {1}}} is a bridge; removing it disconnects the graph")]
    Bridge(usize, usize),
    #[error("degenerate functional: {0}")]
    Degenerate(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
