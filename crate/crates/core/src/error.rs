use std::path::PathBuf;

/// Errors produced by the library and the `pgt` command line tool.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("bad magic: expected 202021.25, found {found}")]
    BadMagic { found: f32 },

    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("trailing data: expected {expected} bytes, found {actual}")]
    TrailingBytes { expected: usize, actual: usize },

    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: i64, height: i64 },

    #[error("dimension mismatch in {context}: {left:?} vs {right:?}")]
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("proposal {id:?} has an empty mask")]
    EmptyProposal { id: String },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("no sequences to evaluate")]
    NoSequences,

    #[error("sequence {sequence:?}: no frames admitted by the evaluation policy")]
    EmptyAdmissibleSet { sequence: String },

    #[error("sequence {sequence:?}, frame {frame}: {source}")]
    Frame {
        sequence: String,
        frame: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sequence needs at least {needed} frames, found {found} in {}", path.display())]
    TooFewFrames {
        path: PathBuf,
        needed: usize,
        found: usize,
    },

    #[error("json error in {}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("internal solver error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn mismatch(
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    ) -> Self {
        Error::DimensionMismatch {
            context,
            left,
            right,
        }
    }
}
