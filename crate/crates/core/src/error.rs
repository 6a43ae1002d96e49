use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a precondition (non-finite entries, ragged frames, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter is out of range or dimensions do not agree.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterate became non-finite.
    #[error("solver diverged at iteration {iteration}: {what}")]
    Divergence { iteration: usize, what: String },

    /// The relative residual is undefined for a zero data matrix.
    #[error("relative residual is undefined when the data matrix is zero")]
    ZeroData,

    /// Malformed binary matrix file.
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    /// Malformed CSV cell. Rows and columns are 1-based.
    #[error("parse error at row {row}, column {col}: {reason}")]
    Parse { row: usize, col: usize, reason: String },

    #[error("image error in {path}: {reason}")]
    Image { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the file system or file contents.
    pub fn is_io_or_format(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format { .. } | Error::Parse { .. } | Error::Image { .. } | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
