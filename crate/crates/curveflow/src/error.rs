use thiserror::Error;

/// Errors raised while constructing curves, parsing configuration or
/// performing geometric queries on invalid data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("non-finite values in {0}")]
    NonFinite(&'static str),
    #[error("mismatched grids: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("decay fit refused: {0}")]
    FitRefused(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
