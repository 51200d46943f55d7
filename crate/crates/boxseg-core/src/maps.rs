//! Grid-valued domain types: activation maps, boundary maps, label masks,
//! and intensity images. All grids are row-major.

use alloc::vec;
use alloc::vec::Vec;

use crate::class::ClassId;
use crate::error::CoreError;
use crate::geom::ImageDims;

/// Per-class real-valued activation grid.
///
/// Construction only requires finite values; [`ActivationMap::normalized`]
/// maps the grid into `[0, 1]` (ReLU then divide by the maximum).
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMap {
    dims: ImageDims,
    class: ClassId,
    values: Vec<f64>,
}

impl ActivationMap {
    pub fn new(dims: ImageDims, class: ClassId, values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() != dims.n_pixels() {
            return Err(CoreError::ShapeMismatch(alloc::format!(
                "expected {} values for a {}x{} map, got {}",
                dims.n_pixels(),
                dims.height(),
                dims.width(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::OutOfRange(alloc::format!(
                "activation map for {class} contains a non-finite value"
            )));
        }
        Ok(Self {
            dims,
            class,
            values,
        })
    }

    pub fn zeros(dims: ImageDims, class: ClassId) -> Self {
        Self {
            dims,
            class,
            values: vec![0.0; dims.n_pixels()],
        }
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn class(&self) -> ClassId {
        self.class
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.dims.at(row, col)]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, &v| acc.max(v))
    }

    /// ReLU then divide by the global maximum (all zeros when the maximum is
    /// not positive). Idempotent: normalizing twice equals normalizing once.
    pub fn normalized(mut self) -> Self {
        for v in &mut self.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let max = self.max_value();
        if max > 0.0 {
            for v in &mut self.values {
                *v /= max;
            }
        }
        self
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Per-class activation maps for one image; one map per object class present.
///
/// Maps are kept sorted by class id and share the same dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationStack {
    dims: ImageDims,
    maps: Vec<ActivationMap>,
}

impl ActivationStack {
    pub fn new(dims: ImageDims, mut maps: Vec<ActivationMap>) -> Result<Self, CoreError> {
        for m in &maps {
            if m.dims() != dims {
                return Err(CoreError::ShapeMismatch(alloc::format!(
                    "stack is {}x{} but a member map for {} is {}x{}",
                    dims.height(),
                    dims.width(),
                    m.class(),
                    m.dims().height(),
                    m.dims().width()
                )));
            }
            if !m.class().is_object() {
                return Err(CoreError::InvalidArgument(alloc::format!(
                    "activation stacks hold object classes only, got {}",
                    m.class()
                )));
            }
        }
        maps.sort_by_key(|m| m.class());
        for pair in maps.windows(2) {
            if pair[0].class() == pair[1].class() {
                return Err(CoreError::InvalidArgument(alloc::format!(
                    "duplicate class {} in activation stack",
                    pair[0].class()
                )));
            }
        }
        Ok(Self { dims, maps })
    }

    pub fn empty(dims: ImageDims) -> Self {
        Self {
            dims,
            maps: Vec::new(),
        }
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn maps(&self) -> &[ActivationMap] {
        &self.maps
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.maps.iter().map(|m| m.class())
    }

    pub fn get(&self, class: ClassId) -> Option<&ActivationMap> {
        self.maps.iter().find(|m| m.class() == class)
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Per-pixel probability of lying on a class boundary; values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMap {
    dims: ImageDims,
    values: Vec<f64>,
}

impl BoundaryMap {
    pub fn new(dims: ImageDims, values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() != dims.n_pixels() {
            return Err(CoreError::ShapeMismatch(alloc::format!(
                "expected {} values for a {}x{} boundary map, got {}",
                dims.n_pixels(),
                dims.height(),
                dims.width(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(CoreError::OutOfRange(
                "boundary probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: ImageDims) -> Self {
        Self {
            dims,
            values: vec![0.0; dims.n_pixels()],
        }
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.dims.at(row, col)]
    }
}

/// Per-pixel class labels; ground truth and pseudo-labels share this type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    dims: ImageDims,
    values: Vec<ClassId>,
}

impl LabelMask {
    pub fn new(dims: ImageDims, values: Vec<ClassId>) -> Result<Self, CoreError> {
        if values.len() != dims.n_pixels() {
            return Err(CoreError::ShapeMismatch(alloc::format!(
                "expected {} labels for a {}x{} mask, got {}",
                dims.n_pixels(),
                dims.height(),
                dims.width(),
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    /// Builds a mask from raw bytes, rejecting values outside the class set.
    pub fn from_bytes(dims: ImageDims, bytes: &[u8]) -> Result<Self, CoreError> {
        let values = bytes
            .iter()
            .map(|&b| ClassId::new(b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dims, values)
    }

    pub fn filled(dims: ImageDims, class: ClassId) -> Self {
        Self {
            dims,
            values: vec![class; dims.n_pixels()],
        }
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn values(&self) -> &[ClassId] {
        &self.values
    }

    pub fn as_bytes(&self) -> Vec<u8> {
        self.values.iter().map(|c| c.value()).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> ClassId {
        self.values[self.dims.at(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, class: ClassId) {
        let idx = self.dims.at(row, col);
        self.values[idx] = class;
    }

    pub(crate) fn values_mut(&mut self) -> &mut [ClassId] {
        &mut self.values
    }
}

/// Grayscale or RGB intensity grid used by the dense-CRF appearance kernel.
///
/// Channel-major storage; intensities are expected on the 0..=255 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    dims: ImageDims,
    channels: usize,
    data: Vec<f64>,
}

impl IntensityImage {
    pub fn new(dims: ImageDims, channels: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if channels != 1 && channels != 3 {
            return Err(CoreError::InvalidArgument(alloc::format!(
                "intensity images are grayscale or 3-channel, got {channels} channels"
            )));
        }
        if data.len() != channels * dims.n_pixels() {
            return Err(CoreError::ShapeMismatch(alloc::format!(
                "expected {} intensity values, got {}",
                channels * dims.n_pixels(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::OutOfRange(
                "intensity image contains a non-finite value".into(),
            ));
        }
        Ok(Self {
            dims,
            channels,
            data,
        })
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Squared intensity distance between two flat pixel indices.
    pub fn sq_distance(&self, i: usize, j: usize) -> f64 {
        let n = self.dims.n_pixels();
        let mut acc = 0.0;
        for ch in 0..self.channels {
            let d = self.data[ch * n + i] - self.data[ch * n + j];
            acc += d * d;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(h: u32, w: u32) -> ImageDims {
        ImageDims::new(h, w).unwrap()
    }

    #[test]
    fn normalization_relu_and_scale() {
        let m = ActivationMap::new(
            dims(1, 4),
            ClassId::HOLOTHURIAN,
            vec![-1.0, 0.0, 1.0, 4.0],
        )
        .unwrap()
        .normalized();
        assert_eq!(m.values(), &[0.0, 0.0, 0.25, 1.0]);
    }

    #[test]
    fn normalization_idempotent() {
        let m = ActivationMap::new(dims(2, 2), ClassId::ECHINUS, vec![-0.5, 0.2, 0.9, 3.0])
            .unwrap()
            .normalized();
        let twice = m.clone().normalized();
        assert_eq!(m, twice);
    }

    #[test]
    fn normalization_all_nonpositive_gives_zeros() {
        let m = ActivationMap::new(dims(1, 3), ClassId::SCALLOP, vec![-2.0, -0.1, 0.0])
            .unwrap()
            .normalized();
        assert_eq!(m.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ActivationMap::new(dims(1, 1), ClassId::HOLOTHURIAN, vec![f64::NAN]).is_err());
        assert!(BoundaryMap::new(dims(1, 1), vec![1.5]).is_err());
    }

    #[test]
    fn stack_rejects_mixed_dims_and_duplicates() {
        let a = ActivationMap::zeros(dims(2, 2), ClassId::HOLOTHURIAN);
        let b = ActivationMap::zeros(dims(2, 3), ClassId::ECHINUS);
        assert!(ActivationStack::new(dims(2, 2), vec![a.clone(), b]).is_err());
        let dup = ActivationMap::zeros(dims(2, 2), ClassId::HOLOTHURIAN);
        assert!(ActivationStack::new(dims(2, 2), vec![a, dup]).is_err());
    }

    #[test]
    fn stack_sorted_by_class() {
        let s = ActivationStack::new(
            dims(1, 1),
            vec![
                ActivationMap::zeros(dims(1, 1), ClassId::STARFISH),
                ActivationMap::zeros(dims(1, 1), ClassId::HOLOTHURIAN),
            ],
        )
        .unwrap();
        let classes: Vec<_> = s.classes().collect();
        assert_eq!(classes, vec![ClassId::HOLOTHURIAN, ClassId::STARFISH]);
    }

    #[test]
    fn mask_from_bytes_validates() {
        assert!(LabelMask::from_bytes(dims(1, 2), &[0, 255]).is_ok());
        assert!(matches!(
            LabelMask::from_bytes(dims(1, 2), &[0, 9]),
            Err(CoreError::InvalidClass(9))
        ));
    }

    #[test]
    fn intensity_image_distance() {
        let img = IntensityImage::new(dims(1, 2), 3, vec![0.0, 3.0, 0.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(img.sq_distance(0, 1), 9.0 + 16.0);
    }
}
