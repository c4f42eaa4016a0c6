use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TmdpError {
    #[error("{what} index {index} out of range (size {bound})")]
    Index {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("not a probability distribution: {0}")]
    NotNormalized(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("episode already terminated")]
    EpisodeOver,
    #[error("config error: {0}")]
    Config(String),
    #[error("snapshot error: {0}")]
    Snapshot(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = TmdpError> = std::result::Result<T, E>;

pub(crate) fn check_index(what: &'static str, index: usize, bound: usize) -> Result<()> {
    if index < bound {
        Ok(())
    } else {
        Err(TmdpError::Index { what, index, bound })
    }
}

pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> TmdpError {
    TmdpError::InvalidParameter {
        name: name.into(),
        reason: reason.into(),
    }
}
