//! Error taxonomy shared across the toolkit.
//!
//! Variants map onto the CLI exit codes: configuration errors exit 1,
//! data errors exit 2, numerical failures exit 3.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad options, unknown columns, out-of-range parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data, schema mismatches, parse failures.
    #[error("data error: {0}")]
    Data(String),

    /// Divergence or loss of numerical validity during fitting.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// CLI process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) | Error::Io { .. } => 2,
            Error::Numeric(_) => 3,
        }
    }
}
