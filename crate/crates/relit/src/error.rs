//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("direction is not unit length (norm = {norm})")]
    InvalidDirection { norm: f64 },

    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("invalid camera: {reason}")]
    InvalidCamera { reason: String },

    #[error("invalid scene description: {reason}")]
    InvalidScene { reason: String },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("truncated file while reading {section}: {missing} more bytes expected")]
    Truncated { section: &'static str, missing: usize },

    #[error("size mismatch in {section}: header implies {expected} bytes, file holds {got}")]
    SizeMismatch {
        section: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("lighting file must hold 9 coefficients, found {found}")]
    BadCoefficientCount { found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("image error: {0}")]
    Image(String),
}
