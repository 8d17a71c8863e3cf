use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The input carries no usable content (blank image, empty skeleton).
    #[error("no content: {0}")]
    Content(String),

    /// A caller broke an operation's precondition (dimension mismatch,
    /// asymmetric matrix, label out of range).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Two inputs disagree with each other, e.g. a point that is not on the skeleton.
    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("degenerate edge ({u}, {v}): endpoints share coordinates")]
    DegenerateEdge { u: usize, v: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("bad dataset: {0}")]
    Data(String),

    #[error("bad configuration: {0}")]
    Config(String),

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
