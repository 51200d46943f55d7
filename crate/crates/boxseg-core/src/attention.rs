//! Per-class activation evidence.
//!
//! Two sources are combined downstream: classifier activation maps (weighted
//! sums of feature channels, peak-normalized to `[0, 1]`) and box-centred
//! bivariate Gaussian attention maps encoding the spatial prior of a
//! bounding box.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::class::ClassId;
use crate::error::CoreError;
use crate::geom::{BBox, ImageDims};
use crate::maps::ActivationMap;
use crate::math;

/// Stack of `K` feature channels at feature resolution.
#[derive(Debug, Clone)]
pub struct FeatureStack {
    dims: ImageDims,
    channels: Vec<Vec<f64>>,
}

impl FeatureStack {
    pub fn new(dims: ImageDims, channels: Vec<Vec<f64>>) -> Result<Self, CoreError> {
        if channels.is_empty() {
            return Err(CoreError::InvalidArgument(
                "feature stack needs at least one channel".into(),
            ));
        }
        for (k, ch) in channels.iter().enumerate() {
            if ch.len() != dims.n_pixels() {
                return Err(CoreError::ShapeMismatch(format!(
                    "channel {k} has {} values, expected {}",
                    ch.len(),
                    dims.n_pixels()
                )));
            }
            if ch.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::OutOfRange(format!(
                    "channel {k} contains a non-finite value"
                )));
            }
        }
        Ok(Self { dims, channels })
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn depth(&self) -> usize {
        self.channels.len()
    }
}

/// Per-class classifier weight vectors over the feature channels, plus the
/// optional set of classes the classifier predicted for the image.
#[derive(Debug, Clone)]
pub struct ClassifierWeights {
    depth: usize,
    weights: Vec<(ClassId, Vec<f64>)>,
    predicted: Option<Vec<(ClassId, f64)>>,
}

impl ClassifierWeights {
    pub fn new(
        depth: usize,
        weights: Vec<(ClassId, Vec<f64>)>,
        predicted: Option<Vec<(ClassId, f64)>>,
    ) -> Result<Self, CoreError> {
        for (class, w) in &weights {
            if w.len() != depth {
                return Err(CoreError::ShapeMismatch(format!(
                    "weight vector for {class} has length {}, expected {depth}",
                    w.len()
                )));
            }
        }
        Ok(Self {
            depth,
            weights,
            predicted,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn weights_for(&self, class: ClassId) -> Option<&[f64]> {
        self.weights
            .iter()
            .find(|(c, _)| *c == class)
            .map(|(_, w)| w.as_slice())
    }

    pub fn predicted(&self) -> Option<&[(ClassId, f64)]> {
        self.predicted.as_deref()
    }
}

/// Shape of the box-centred Gaussian.
///
/// The standard deviations are `sigma_scale * (w, h)`; `rho` is the
/// correlation coefficient (0 for axis-aligned boxes).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianParams {
    pub rho: f64,
    pub sigma_scale: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        Self {
            rho: 0.0,
            sigma_scale: 1.0,
        }
    }
}

impl GaussianParams {
    pub fn new(rho: f64, sigma_scale: f64) -> Result<Self, CoreError> {
        let p = Self { rho, sigma_scale };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(CoreError::InvalidConfig(
                "gaussian rho must lie in (-1, 1)".into(),
            ));
        }
        if self.sigma_scale <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "gaussian sigma_scale must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Weighted channel sum for one class, ReLU'd and peak-normalized.
pub fn compute_cam(
    features: &FeatureStack,
    weights: &ClassifierWeights,
    class: ClassId,
) -> Result<ActivationMap, CoreError> {
    let w = weights
        .weights_for(class)
        .ok_or(CoreError::MissingClass(class))?;
    if weights.depth() != features.depth() {
        return Err(CoreError::ShapeMismatch(format!(
            "classifier expects {} channels, feature stack has {}",
            weights.depth(),
            features.depth()
        )));
    }
    let mut acc = vec![0.0_f64; features.dims.n_pixels()];
    for (wk, channel) in w.iter().zip(&features.channels) {
        for (a, &f) in acc.iter_mut().zip(channel) {
            *a += wk * f;
        }
    }
    Ok(ActivationMap::new(features.dims, class, acc)?.normalized())
}

/// Bilinear resize with corner-aligned sampling.
///
/// Output values stay within the input's value range.
pub fn resize_bilinear(map: &ActivationMap, target: ImageDims) -> ActivationMap {
    let src = map.dims();
    if src == target {
        return map.clone();
    }
    let sh = src.height() as usize;
    let sw = src.width() as usize;
    let th = target.height() as usize;
    let tw = target.width() as usize;
    let row_scale = if th > 1 {
        (sh - 1) as f64 / (th - 1) as f64
    } else {
        0.0
    };
    let col_scale = if tw > 1 {
        (sw - 1) as f64 / (tw - 1) as f64
    } else {
        0.0
    };
    let mut out = vec![0.0_f64; target.n_pixels()];
    for r in 0..th {
        let sr = r as f64 * row_scale;
        let r0 = math::floor(sr) as usize;
        let r1 = (r0 + 1).min(sh - 1);
        let fr = sr - r0 as f64;
        for c in 0..tw {
            let sc = c as f64 * col_scale;
            let c0 = math::floor(sc) as usize;
            let c1 = (c0 + 1).min(sw - 1);
            let fc = sc - c0 as f64;
            let top = map.get(r0, c0) * (1.0 - fc) + map.get(r0, c1) * fc;
            let bottom = map.get(r1, c0) * (1.0 - fc) + map.get(r1, c1) * fc;
            out[r * tw + c] = top * (1.0 - fr) + bottom * fr;
        }
    }
    ActivationMap::new(target, map.class(), out).expect("resize preserves finiteness")
}

/// Resizes each map to `target`, averages pixel-wise, and re-normalizes the
/// mean to peak 1. All maps must share one class.
pub fn multiscale_cam(
    maps: &[ActivationMap],
    target: ImageDims,
) -> Result<ActivationMap, CoreError> {
    let first = maps.first().ok_or_else(|| {
        CoreError::InvalidArgument("multiscale averaging needs at least one map".into())
    })?;
    let class = first.class();
    if maps.iter().any(|m| m.class() != class) {
        return Err(CoreError::InvalidArgument(
            "multiscale maps must share one class".into(),
        ));
    }
    let mut acc = vec![0.0_f64; target.n_pixels()];
    for m in maps {
        let resized = resize_bilinear(m, target);
        for (a, v) in acc.iter_mut().zip(resized.values()) {
            *a += v;
        }
    }
    let n = maps.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Ok(ActivationMap::new(target, class, acc)?.normalized())
}

/// Bivariate Gaussian attention for a box, evaluated at every pixel of the
/// full image and normalized so the value at the box centre is exactly 1.
///
/// The mean is the box centre and the standard deviations are
/// `sigma_scale * (w, h)`; peak normalization cancels the density constant.
pub fn gaussian_attention(
    bbox: &BBox,
    dims: ImageDims,
    params: &GaussianParams,
) -> Result<ActivationMap, CoreError> {
    params.validate()?;
    bbox.clamp(dims)?;
    let (mu_x, mu_y) = bbox.center();
    let sigma_x = params.sigma_scale * bbox.w() as f64;
    let sigma_y = params.sigma_scale * bbox.h() as f64;
    let rho = params.rho;
    let norm = 2.0 * (1.0 - rho * rho);
    let w = dims.width() as usize;
    let mut out = vec![0.0_f64; dims.n_pixels()];
    for row in 0..dims.height() as usize {
        let dy = (row as f64 - mu_y) / sigma_y;
        for col in 0..w {
            let dx = (col as f64 - mu_x) / sigma_x;
            let quad = dx * dx - 2.0 * rho * dx * dy + dy * dy;
            out[row * w + col] = math::exp(-quad / norm);
        }
    }
    ActivationMap::new(dims, bbox.class(), out)
}
