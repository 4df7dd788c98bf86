use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} = {value} exceeds the limit of {limit}")]
    SizeLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
