//! Core algorithms for turning bounding-box and image-level class annotations
//! into pixel-accurate segmentation masks.
//!
//! The pipeline stages are:
//!
//! 1. **attention** – per-class activation evidence: classifier activation
//!    maps and box-centred Gaussian attention maps.
//! 2. **fusion** – per-box fusion of the two evidence sources and
//!    thresholding into pseudo-label masks with an explicit ignore label.
//! 3. **affinity** – same-/different-class pixel-pair sets, line-of-sight
//!    affinities gated by a boundary probability map, and direct gradient
//!    descent fitting of that map against a binary cross-entropy pair loss.
//! 4. **propagation** – boundary-gated random-walk refinement of activation
//!    maps followed by dense-CRF post-processing.
//! 5. **eval** – confusion counts, per-class IoU / mIoU, the box-fill
//!    fairness fallback, and table rendering.
//!
//! The crate is `no_std` (alloc required) and fully deterministic: identical
//! inputs, configuration, and seeds produce bit-identical outputs.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod affinity;
pub mod attention;
pub mod class;
pub mod config;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod geom;
pub mod maps;
pub mod propagation;
pub mod rng;

pub(crate) mod math;

pub use class::ClassId;
pub use config::{BoundaryFitConfig, CrfParams, PipelineConfig};
pub use error::CoreError;
pub use geom::{BBox, ImageDims};
pub use maps::{ActivationMap, ActivationStack, BoundaryMap, IntensityImage, LabelMask};
