use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates one of its documented invariants.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The objective callback produced NaN or an infinity.
    #[error("objective returned non-finite value {value} at point {point:?}")]
    NonFiniteObjective { point: Vec<f64>, value: f64 },

    #[error("{file}:{line}: key `{key}`: {message}")]
    Config {
        file: PathBuf,
        line: usize,
        key: String,
        message: String,
    },

    #[error("no timing checkpoints recorded for {algorithm} run with seed {seed}")]
    MissingTiming { algorithm: String, seed: u64 },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("refusing to overwrite existing file {0} (pass --force)")]
    WouldOverwrite(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
