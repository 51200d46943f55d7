//! IO, file formats, and batch commands around `boxseg-core`.
//!
//! This crate owns everything that touches the filesystem: COCO-style
//! annotation parsing, polygon rasterization, indexed-PNG label masks, the
//! UACT tensor format, dataset statistics, flat config files, run manifests,
//! and the CLI subcommand implementations.

pub mod annotations;
pub mod commands;
pub mod error;
pub mod gradcheck;
pub mod manifest;
pub mod masks;
pub mod raster;
pub mod run_config;
pub mod stats;
pub mod tensor;

pub use error::DataError;
