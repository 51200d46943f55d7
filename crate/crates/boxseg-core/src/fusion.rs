//! Fusing activation evidence per box and thresholding into pseudo-labels.
//!
//! Inside each box the fused map is the Gaussian attention map, optionally
//! multiplied by the class activation map when the classifier predicted the
//! box class and the box actually contains activation. Outside every box the
//! fused activation is exactly zero, which falls below the background
//! threshold, so box-free pixels label as background.

use alloc::format;
use alloc::vec::Vec;

use crate::class::ClassId;
use crate::error::CoreError;
use crate::geom::{BBox, ImageDims};
use crate::maps::{ActivationMap, ActivationStack, LabelMask};

/// Fused activation for one box: zero outside the clamped box region.
#[derive(Debug, Clone)]
pub struct FusedBoxActivation {
    bbox: BBox,
    map: ActivationMap,
}

impl FusedBoxActivation {
    /// The clamped box the support is restricted to.
    pub fn bbox(&self) -> &BBox {
        &self.bbox
    }

    pub fn class(&self) -> ClassId {
        self.map.class()
    }

    pub fn map(&self) -> &ActivationMap {
        &self.map
    }
}

/// True iff at least one pixel inside the (clamped) box has activation >= epsilon.
pub fn box_has_activation(map: &ActivationMap, bbox: &BBox, epsilon: f64) -> bool {
    let Ok(clamped) = bbox.clamp(map.dims()) else {
        return false;
    };
    for row in clamped.rows() {
        for col in clamped.cols() {
            if map.get(row, col) >= epsilon {
                return true;
            }
        }
    }
    false
}

/// Three-branch fusion of Gaussian attention and class activation for one box.
///
/// Branch 1: class not predicted (or no activation map available) — Gaussian
/// only. Branch 2: predicted but no activation inside the box — Gaussian
/// only. Branch 3: predicted with activation — pixel-wise product.
pub fn fuse_box(
    bbox: &BBox,
    predicted: &[ClassId],
    cam: Option<&ActivationMap>,
    gauss: &ActivationMap,
    epsilon: f64,
) -> Result<FusedBoxActivation, CoreError> {
    let class = bbox.class();
    if gauss.class() != class {
        return Err(CoreError::InvalidArgument(format!(
            "gaussian map is for {}, box is {class}",
            gauss.class()
        )));
    }
    if let Some(cam) = cam {
        if cam.class() != class {
            return Err(CoreError::InvalidArgument(format!(
                "activation map is for {}, box is {class}",
                cam.class()
            )));
        }
        if cam.dims() != gauss.dims() {
            return Err(CoreError::ShapeMismatch(
                "activation and gaussian maps must share dimensions".into(),
            ));
        }
    }
    let dims = gauss.dims();
    let clamped = bbox.clamp(dims)?;
    let use_product = match cam {
        Some(cam) if predicted.contains(&class) => box_has_activation(cam, &clamped, epsilon),
        _ => false,
    };
    let mut out = ActivationMap::zeros(dims, class);
    let width = dims.width() as usize;
    for row in clamped.rows() {
        for col in clamped.cols() {
            let g = gauss.get(row, col);
            let v = if use_product {
                g * cam.expect("product branch requires a cam").get(row, col)
            } else {
                g
            };
            out.values_mut()[row * width + col] = v;
        }
    }
    Ok(FusedBoxActivation {
        bbox: clamped,
        map: out,
    })
}

/// Combines per-box fused maps into one map per class by pixel-wise maximum.
///
/// Classes with no box are omitted from the stack.
pub fn assemble_stack(
    fused: &[FusedBoxActivation],
    dims: ImageDims,
) -> Result<ActivationStack, CoreError> {
    let mut maps: Vec<ActivationMap> = Vec::new();
    for f in fused {
        if f.map.dims() != dims {
            return Err(CoreError::ShapeMismatch(format!(
                "fused map is {}x{}, stack is {}x{}",
                f.map.dims().height(),
                f.map.dims().width(),
                dims.height(),
                dims.width()
            )));
        }
        match maps.iter_mut().find(|m| m.class() == f.class()) {
            Some(existing) => {
                for (acc, &v) in existing.values_mut().iter_mut().zip(f.map.values()) {
                    if v > *acc {
                        *acc = v;
                    }
                }
            }
            None => maps.push(f.map.clone()),
        }
    }
    ActivationStack::new(dims, maps)
}

/// Thresholds a fused activation stack into a pseudo-label mask.
///
/// Per pixel: the argmax class if its value exceeds `theta_fg` (ties to the
/// lowest class id), background if every class value is below `theta_bg`,
/// ignore otherwise.
pub fn generate_pseudo_label(
    stack: &ActivationStack,
    theta_fg: f64,
    theta_bg: f64,
) -> LabelMask {
    let dims = stack.dims();
    let mut mask = LabelMask::filled(dims, ClassId::BACKGROUND);
    for idx in 0..dims.n_pixels() {
        let mut best: Option<(ClassId, f64)> = None;
        let mut all_below_bg = true;
        for map in stack.maps() {
            let v = map.values()[idx];
            if v >= theta_bg {
                all_below_bg = false;
            }
            // Strictly-greater keeps the lowest class id on ties.
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((map.class(), v));
            }
        }
        let label = match best {
            Some((class, v)) if v > theta_fg => class,
            _ if all_below_bg => ClassId::BACKGROUND,
            _ => ClassId::IGNORE,
        };
        mask.values_mut()[idx] = label;
    }
    mask
}

/// Full pseudo-label composition for one image: Gaussian attention per box,
/// optional activation-map fusion, cross-box maximum, thresholding.
///
/// A class counts as predicted iff `cams` carries a map for it.
pub fn pseudo_label(
    boxes: &[BBox],
    cams: Option<&ActivationStack>,
    dims: ImageDims,
    epsilon: f64,
    theta_fg: f64,
    theta_bg: f64,
    gaussian: &crate::attention::GaussianParams,
) -> Result<LabelMask, CoreError> {
    let predicted: Vec<ClassId> = cams.map(|s| s.classes().collect()).unwrap_or_default();
    let mut fused = Vec::with_capacity(boxes.len());
    for bbox in boxes {
        let gauss = crate::attention::gaussian_attention(bbox, dims, gaussian)?;
        let cam = cams.and_then(|s| s.get(bbox.class()));
        fused.push(fuse_box(bbox, &predicted, cam, &gauss, epsilon)?);
    }
    let stack = assemble_stack(&fused, dims)?;
    Ok(generate_pseudo_label(&stack, theta_fg, theta_bg))
}
