use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unexpected end of file in {path}")]
    UnexpectedEof { path: PathBuf },

    #[error("bad magic in {path}: expected {expected:?}")]
    BadMagic { path: PathBuf, expected: [u8; 4] },

    #[error("checkpoint version mismatch in {path}: found {found}, expected {expected}")]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("malformed checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("malformed PLY header at line {line}: {text:?} ({reason})")]
    PlyHeader {
        line: usize,
        text: String,
        reason: String,
    },

    #[error("malformed PLY body: {0}")]
    PlyBody(String),

    #[error("face index {index} out of range for {vertex_count} vertices")]
    FaceIndexOutOfRange { index: usize, vertex_count: usize },

    #[error("malformed PFM file {path}: {reason}")]
    Pfm { path: PathBuf, reason: String },

    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CoreError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
