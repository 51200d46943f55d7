use std::path::PathBuf;

use boxseg_core::CoreError;

/// Errors from annotation parsing, mask and tensor IO, and configuration.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json parse error at line {line}, column {column} (byte offset {offset})")]
    Parse {
        line: usize,
        column: usize,
        offset: usize,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown category '{0}'")]
    UnknownCategory(String),
    #[error("RLE segmentations are not supported; masks are polygonal")]
    RleUnsupported,
    #[error("bad tensor magic {0:?}, expected \"UACT\"")]
    BadMagic([u8; 4]),
    #[error("unsupported tensor version {0}, expected 1")]
    BadVersion(u8),
    #[error("truncated tensor payload: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("tensor header declares no data")]
    EmptyTensor,
    #[error("mask format: {0}")]
    MaskFormat(String),
    #[error("png error on {path}: {source}")]
    PngDecode {
        path: PathBuf,
        #[source]
        source: png::DecodingError,
    },
    #[error("png error on {path}: {source}")]
    PngEncode {
        path: PathBuf,
        #[source]
        source: png::EncodingError,
    },
    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl DataError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}
