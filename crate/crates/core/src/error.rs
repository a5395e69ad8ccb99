use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate (row {row}, col {col}, value {value}) is outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        value: String,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("invalid CSR matrix: {0}")]
    InvalidCsr(String),

    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("kernel dispatch error: {0}")]
    Dispatch(String),

    #[error("specialized kernel K={k} disagrees with the trusted kernel at element {index}")]
    KernelMismatch { k: usize, index: usize },

    #[error("stale tape: {0}")]
    Tape(String),

    #[error("training mask selects no nodes")]
    EmptyMask,

    #[error("loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dimension(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Dimension { op, left, right }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
