use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("duplicate docno {0:?}")]
    DuplicateDocno(String),

    #[error("collection has no terms")]
    EmptyCollection,

    #[error("degenerate smoothing: {0}")]
    DegenerateSmoothing(&'static str),

    #[error("no query term survives preprocessing")]
    EmptyQuery,

    #[error("topic {0} has no relevant documents")]
    NoRelevant(String),

    #[error("run and qrels share no evaluable topic")]
    NoOverlap,

    #[error("run is empty")]
    EmptyRun,

    #[error("line {line}: score increases with rank in topic {topic}")]
    Monotonicity { line: usize, topic: String },

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidPoint(Vec<String>),

    #[error("kernel matrix is not positive definite after jitter {jitter:e}")]
    SingularKernel { jitter: f64 },

    #[error("objective failed at evaluation {iteration}: {message}")]
    Objective { iteration: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }

    /// True for failures caused by user input (bad files, bad flags) rather
    /// than by the numerics.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            Error::SingularKernel { .. } | Error::DegenerateSmoothing(_) | Error::Objective { .. }
        )
    }
}
