use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid raster header: {0}")]
    Header(String),

    #[error("payload for band {band} holds {actual} bytes, header requires {expected}")]
    PayloadSize {
        band: String,
        expected: usize,
        actual: usize,
    },

    #[error("missing mandatory band {0}")]
    MissingBand(String),

    #[error("raster has no bands")]
    NoBands,

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid PGM data: {0}")]
    Pgm(String),

    #[error("invalid structuring element: {0}")]
    StructuringElement(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no labeled knowledge")]
    EmptyKnowledge,

    #[error("reference subset has no valid pixels")]
    EmptySubset,

    #[error("invalid calibration profile: {0}")]
    Profile(String),

    #[error("invalid scene: {0}")]
    Scene(String),

    #[error("image encoding failed: {0}")]
    Image(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
