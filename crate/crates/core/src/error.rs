use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    /// IDX container could not be parsed. `field` names the offending header field or section.
    #[error("{path}: bad IDX {field}: {detail}")]
    Parse {
        path: PathBuf,
        field: &'static str,
        detail: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("power-law fit failed: {0}")]
    Fit(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
