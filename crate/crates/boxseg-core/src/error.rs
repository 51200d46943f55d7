use alloc::string::String;

use crate::class::ClassId;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error("coordinate ({row}, {col}) out of bounds for a {height}x{width} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        height: u32,
        width: u32,
    },
    #[error("invalid class value {0}")]
    InvalidClass(u8),
    #[error("invalid box: {0}")]
    InvalidBox(&'static str),
    #[error("box does not intersect a {height}x{width} image")]
    EmptyBox { height: u32, width: u32 },
    #[error("no classifier weights for class {0}")]
    MissingClass(ClassId),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("values out of range: {0}")]
    OutOfRange(String),
    #[error("{height}x{width} image exceeds the {limit}x{limit} dense-inference guard")]
    ImageTooLarge { height: u32, width: u32, limit: u32 },
    #[error("confusion counts contain no scorable class")]
    EmptyReport,
}
