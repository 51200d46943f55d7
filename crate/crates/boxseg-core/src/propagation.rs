//! Boundary-gated random-walk refinement and dense-CRF post-processing.
//!
//! The transition matrix routes activation mass between nearby pixels in
//! proportion to a power of their line-of-sight affinity, so activations
//! diffuse freely inside a region and stall at boundary walls. The refined
//! per-class maps are converted to a probability stack (background takes the
//! mass left by the strongest class) and sharpened by mean-field inference in
//! a fully connected CRF with Gaussian edge potentials, computed by direct
//! O(N^2) message passing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::affinity::rasterize_line;
use crate::attention::{gaussian_attention, GaussianParams};
use crate::class::ClassId;
use crate::config::{CrfParams, PipelineConfig};
use crate::error::CoreError;
use crate::fusion::{assemble_stack, fuse_box};
use crate::geom::{BBox, ImageDims};
use crate::maps::{ActivationMap, ActivationStack, BoundaryMap, IntensityImage, LabelMask};
use crate::math;

/// Side length above which dense O(N^2) CRF inference must be forced explicitly.
pub const CRF_SIZE_GUARD: u32 = 256;

/// Row-stochastic sparse transition matrix over grid pixels.
///
/// Stored in compressed sparse row form; every row includes the pixel itself
/// and its neighborhood within the construction radius.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    dims: ImageDims,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl TransitionMatrix {
    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    /// Neighbor indices and weights of one row.
    pub fn row(&self, pixel: usize) -> (&[usize], &[f64]) {
        let lo = self.row_offsets[pixel];
        let hi = self.row_offsets[pixel + 1];
        (&self.cols[lo..hi], &self.weights[lo..hi])
    }

    pub fn n_rows(&self) -> usize {
        self.dims.n_pixels()
    }
}

/// Full-disc neighborhood offsets with Euclidean norm strictly below `gamma`.
fn disc_offsets(gamma: f64) -> Vec<(i64, i64)> {
    let reach = math::floor(gamma) as i64;
    let limit = gamma * gamma;
    let mut offsets = Vec::new();
    for dr in -reach..=reach {
        for dc in -reach..=reach {
            if (dr != 0 || dc != 0) && ((dr * dr + dc * dc) as f64) < limit {
                offsets.push((dr, dc));
            }
        }
    }
    offsets
}

/// Builds the boundary-gated transition matrix.
///
/// For pixels within `gamma` of each other the pre-normalization weight is
/// the line affinity raised to `beta`; the self weight is 1; rows are then
/// normalized to sum to 1.
pub fn build_transition(
    boundary: &BoundaryMap,
    gamma: f64,
    beta: f64,
) -> Result<TransitionMatrix, CoreError> {
    if gamma <= 0.0 {
        return Err(CoreError::InvalidArgument(
            "transition radius must be positive".into(),
        ));
    }
    if beta < 1.0 {
        return Err(CoreError::InvalidArgument(
            "affinity exponent must be at least 1".into(),
        ));
    }
    let dims = boundary.dims();
    let h = dims.height() as i64;
    let w = dims.width() as i64;
    let offsets = disc_offsets(gamma);
    let n = dims.n_pixels();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    row_offsets.push(0);
    let values = boundary.values();
    for row in 0..h {
        for col in 0..w {
            let i = (row * w + col) as usize;
            let start = cols.len();
            cols.push(i);
            weights.push(1.0);
            for &(dr, dc) in &offsets {
                let (nr, nc) = (row + dr, col + dc);
                if nr < 0 || nr >= h || nc < 0 || nc >= w {
                    continue;
                }
                let j = (nr * w + nc) as usize;
                let line = rasterize_line(i, j, dims);
                let mut max_b = 0.0_f64;
                for &px in &line {
                    max_b = max_b.max(values[px]);
                }
                let a = 1.0 - max_b;
                cols.push(j);
                weights.push(math::powf(a, beta));
            }
            let sum: f64 = weights[start..].iter().sum();
            for wv in &mut weights[start..] {
                *wv /= sum;
            }
            row_offsets.push(cols.len());
        }
    }
    Ok(TransitionMatrix {
        dims,
        row_offsets,
        cols,
        weights,
    })
}

/// Applies the transition matrix to each class map `iters` times.
///
/// Row-stochastic averaging keeps every output value inside the input's
/// value range; no explicit clamping is needed.
pub fn random_walk_refine(
    stack: &ActivationStack,
    transition: &TransitionMatrix,
    iters: u32,
) -> Result<ActivationStack, CoreError> {
    if stack.dims() != transition.dims() {
        return Err(CoreError::ShapeMismatch(format!(
            "stack is {}x{}, transition matrix is {}x{}",
            stack.dims().height(),
            stack.dims().width(),
            transition.dims().height(),
            transition.dims().width()
        )));
    }
    let n = stack.dims().n_pixels();
    let mut refined = Vec::with_capacity(stack.maps().len());
    for map in stack.maps() {
        let mut current = map.values().to_vec();
        let mut next = vec![0.0_f64; n];
        for _ in 0..iters {
            for (i, out) in next.iter_mut().enumerate() {
                let (cols, weights) = transition.row(i);
                let mut acc = 0.0;
                for (&j, &wv) in cols.iter().zip(weights) {
                    acc += wv * current[j];
                }
                *out = acc;
            }
            core::mem::swap(&mut current, &mut next);
        }
        refined.push(ActivationMap::new(stack.dims(), map.class(), current)?);
    }
    ActivationStack::new(stack.dims(), refined)
}

/// Per-class probability stack with rows summing to one.
#[derive(Debug, Clone)]
pub struct ProbabilityStack {
    dims: ImageDims,
    classes: Vec<ClassId>,
    /// Channel-major values, one channel per class.
    channels: Vec<Vec<f64>>,
}

impl ProbabilityStack {
    pub fn new(
        dims: ImageDims,
        classes: Vec<ClassId>,
        channels: Vec<Vec<f64>>,
    ) -> Result<Self, CoreError> {
        if classes.is_empty() || classes.len() != channels.len() {
            return Err(CoreError::InvalidArgument(
                "probability stack needs one channel per class".into(),
            ));
        }
        for ch in &channels {
            if ch.len() != dims.n_pixels() {
                return Err(CoreError::ShapeMismatch(
                    "probability channel length mismatch".into(),
                ));
            }
            if ch.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CoreError::OutOfRange(
                    "probabilities must be finite and non-negative".into(),
                ));
            }
        }
        for idx in 0..dims.n_pixels() {
            let sum: f64 = channels.iter().map(|ch| ch[idx]).sum();
            if math::abs(sum - 1.0) > 1e-6 {
                return Err(CoreError::InvalidArgument(format!(
                    "probabilities at pixel {idx} sum to {sum}, expected 1"
                )));
            }
        }
        Ok(Self {
            dims,
            classes,
            channels,
        })
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    fn argmax_mask(&self) -> LabelMask {
        let mut mask = LabelMask::filled(self.dims, self.classes[0]);
        for idx in 0..self.dims.n_pixels() {
            let mut best = self.channels[0][idx];
            let mut best_class = self.classes[0];
            for (class, ch) in self.classes.iter().zip(&self.channels).skip(1) {
                if ch[idx] > best {
                    best = ch[idx];
                    best_class = *class;
                }
            }
            mask.values_mut()[idx] = best_class;
        }
        mask
    }
}

/// Mean-field inference in a fully connected CRF with Gaussian edge potentials.
///
/// Pairwise energy uses a smoothness kernel (spatial only) and an appearance
/// kernel (spatial and intensity), both with Potts compatibility. Message
/// passing is direct O(N^2): grids larger than [`CRF_SIZE_GUARD`] on a side
/// are rejected unless `allow_large` is set.
pub fn crf_refine(
    probs: &ProbabilityStack,
    image: &IntensityImage,
    params: &CrfParams,
    allow_large: bool,
) -> Result<LabelMask, CoreError> {
    params.validate()?;
    let dims = probs.dims();
    if image.dims() != dims {
        return Err(CoreError::ShapeMismatch(
            "image and probability stack dimensions differ".into(),
        ));
    }
    if !allow_large && (dims.height() > CRF_SIZE_GUARD || dims.width() > CRF_SIZE_GUARD) {
        return Err(CoreError::ImageTooLarge {
            height: dims.height(),
            width: dims.width(),
            limit: CRF_SIZE_GUARD,
        });
    }
    // Degenerate settings reduce to the unary argmax exactly.
    if params.n_iters == 0 || (params.w_smooth == 0.0 && params.w_appearance == 0.0) {
        return Ok(probs.argmax_mask());
    }
    let n = dims.n_pixels();
    let n_labels = probs.classes.len();
    let w = dims.width() as usize;
    // Unaries from the input probabilities.
    let unary: Vec<Vec<f64>> = probs
        .channels
        .iter()
        .map(|ch| ch.iter().map(|&p| -math::ln(p.max(1e-12))).collect())
        .collect();
    let mut q: Vec<Vec<f64>> = probs.channels.clone();
    let inv_gamma = 1.0 / (2.0 * params.theta_gamma * params.theta_gamma);
    let inv_alpha = 1.0 / (2.0 * params.theta_alpha * params.theta_alpha);
    let inv_beta = 1.0 / (2.0 * params.theta_beta * params.theta_beta);
    let mut messages = vec![vec![0.0_f64; n]; n_labels];
    for _ in 0..params.n_iters {
        for msg in &mut messages {
            msg.iter_mut().for_each(|m| *m = 0.0);
        }
        for i in 0..n {
            let (ri, ci) = (i / w, i % w);
            for j in (i + 1)..n {
                let (rj, cj) = (j / w, j % w);
                let dr = ri as f64 - rj as f64;
                let dc = ci as f64 - cj as f64;
                let sq = dr * dr + dc * dc;
                let smooth = params.w_smooth * math::exp(-sq * inv_gamma);
                let appearance = params.w_appearance
                    * math::exp(-sq * inv_alpha - image.sq_distance(i, j) * inv_beta);
                let k = smooth + appearance;
                if k == 0.0 {
                    continue;
                }
                for (l, msg) in messages.iter_mut().enumerate() {
                    msg[i] += k * q[l][j];
                    msg[j] += k * q[l][i];
                }
            }
        }
        // Potts compatibility: a label is penalized by the mass of all others.
        for i in 0..n {
            let total: f64 = messages.iter().map(|msg| msg[i]).sum();
            let mut z = 0.0;
            for l in 0..n_labels {
                let energy = unary[l][i] + (total - messages[l][i]);
                q[l][i] = math::exp(-energy);
                z += q[l][i];
            }
            for ql in q.iter_mut() {
                ql[i] /= z;
            }
        }
    }
    let refined = ProbabilityStack {
        dims,
        classes: probs.classes.clone(),
        channels: q,
    };
    Ok(refined.argmax_mask())
}

/// Full refinement pipeline for one image: Gaussian attention per box with
/// optional activation-map fusion, boundary-gated random walk, background
/// synthesis, dense-CRF post-processing, argmax mask.
///
/// With no boxes the result is an all-background mask.
pub fn segment(
    boxes: &[BBox],
    cams: Option<&ActivationStack>,
    boundary: &BoundaryMap,
    image: &IntensityImage,
    cfg: &PipelineConfig,
    allow_large: bool,
) -> Result<LabelMask, CoreError> {
    cfg.validate()?;
    let dims = boundary.dims();
    if image.dims() != dims {
        return Err(CoreError::ShapeMismatch(
            "image and boundary map dimensions differ".into(),
        ));
    }
    if boxes.is_empty() {
        return Ok(LabelMask::filled(dims, ClassId::BACKGROUND));
    }
    let gaussian = GaussianParams::default();
    let predicted: Vec<ClassId> = cams.map(|s| s.classes().collect()).unwrap_or_default();
    let mut fused = Vec::with_capacity(boxes.len());
    for bbox in boxes {
        let gauss = gaussian_attention(bbox, dims, &gaussian)?;
        let cam = cams.and_then(|s| s.get(bbox.class()));
        fused.push(fuse_box(bbox, &predicted, cam, &gauss, cfg.epsilon)?);
    }
    let stack = assemble_stack(&fused, dims)?;
    let transition = build_transition(boundary, cfg.gamma, cfg.rw_beta)?;
    let refined = random_walk_refine(&stack, &transition, cfg.rw_iters)?;
    let probs = probabilities_with_background(&refined);
    crf_refine(&probs, image, &cfg.crf, allow_large)
}

/// Converts foreground activation maps into a normalized probability stack,
/// synthesizing background as one minus the strongest class activation.
pub fn probabilities_with_background(stack: &ActivationStack) -> ProbabilityStack {
    let dims = stack.dims();
    let n = dims.n_pixels();
    let mut classes = vec![ClassId::BACKGROUND];
    classes.extend(stack.classes());
    let mut channels = vec![vec![0.0_f64; n]; classes.len()];
    for idx in 0..n {
        let mut max = 0.0_f64;
        for (slot, map) in stack.maps().iter().enumerate() {
            let v = map.values()[idx];
            channels[slot + 1][idx] = v;
            max = max.max(v);
        }
        channels[0][idx] = 1.0 - max;
        let sum: f64 = channels.iter().map(|ch| ch[idx]).sum();
        for ch in &mut channels {
            ch[idx] /= sum;
        }
    }
    ProbabilityStack {
        dims,
        classes,
        channels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(h: u32, w: u32) -> ImageDims {
        ImageDims::new(h, w).unwrap()
    }

    fn uniform_image(d: ImageDims) -> IntensityImage {
        IntensityImage::new(d, 1, vec![128.0; d.n_pixels()]).unwrap()
    }

    fn row_sums_are_one(t: &TransitionMatrix) {
        for i in 0..t.n_rows() {
            let (_, weights) = t.row(i);
            let sum: f64 = weights.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row {i} sums to {sum}");
        }
    }

    #[test]
    fn transition_uniform_when_boundary_free() {
        let d = dims(5, 5);
        let t = build_transition(&BoundaryMap::zeros(d), 2.0, 4.0).unwrap();
        row_sums_are_one(&t);
        // interior pixel: self + 8 neighbors, all equal weight
        let center = d.index(2, 2).unwrap();
        let (cols, weights) = t.row(center);
        assert_eq!(cols.len(), 9);
        for &w in weights {
            assert!((w - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transition_hard_walls_become_identity() {
        let d = dims(4, 4);
        let b = BoundaryMap::new(d, vec![1.0; 16]).unwrap();
        let t = build_transition(&b, 2.0, 4.0).unwrap();
        row_sums_are_one(&t);
        for i in 0..16 {
            let (cols, weights) = t.row(i);
            for (&j, &w) in cols.iter().zip(weights) {
                if j == i {
                    assert!((w - 1.0).abs() < 1e-12);
                } else {
                    assert_eq!(w, 0.0);
                }
            }
        }
    }

    #[test]
    fn transition_wall_blocks_mass() {
        // single boundary column at col 2 on a 5x5 grid
        let d = dims(5, 5);
        let mut vals = vec![0.0; 25];
        for row in 0..5 {
            vals[row * 5 + 2] = 1.0;
        }
        let b = BoundaryMap::new(d, vals).unwrap();
        let t = build_transition(&b, 2.0, 4.0).unwrap();
        row_sums_are_one(&t);
        for row in 0..5usize {
            let i = row * 5 + 1; // just left of the wall
            let (cols, weights) = t.row(i);
            let crossing: f64 = cols
                .iter()
                .zip(weights)
                .filter(|(&j, _)| j % 5 >= 2)
                .map(|(_, &w)| w)
                .sum();
            assert!(crossing < 0.05, "row {row} routes {crossing} across the wall");
        }
    }

    #[test]
    fn transition_rejects_bad_params() {
        let d = dims(3, 3);
        let b = BoundaryMap::zeros(d);
        assert!(build_transition(&b, 0.0, 4.0).is_err());
        assert!(build_transition(&b, 2.0, 0.5).is_err());
    }

    fn simple_stack(d: ImageDims, values: Vec<f64>) -> ActivationStack {
        ActivationStack::new(
            d,
            vec![ActivationMap::new(d, ClassId::HOLOTHURIAN, values).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn walk_zero_iters_is_identity() {
        let d = dims(3, 3);
        let vals: Vec<f64> = (0..9).map(|i| i as f64 / 10.0).collect();
        let stack = simple_stack(d, vals.clone());
        let t = build_transition(&BoundaryMap::zeros(d), 2.0, 4.0).unwrap();
        let out = random_walk_refine(&stack, &t, 0).unwrap();
        assert_eq!(out.maps()[0].values(), vals.as_slice());
    }

    #[test]
    fn walk_constant_map_is_fixed_point() {
        let d = dims(4, 4);
        let stack = simple_stack(d, vec![0.37; 16]);
        let t = build_transition(&BoundaryMap::zeros(d), 2.0, 4.0).unwrap();
        let out = random_walk_refine(&stack, &t, 5).unwrap();
        for &v in out.maps()[0].values() {
            assert!((v - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn walk_stays_within_input_range() {
        let d = dims(6, 6);
        let mut rng = crate::rng::SplitMix64::new(31);
        for _ in 0..5 {
            let vals: Vec<f64> = (0..36).map(|_| rng.next_f64()).collect();
            let bvals: Vec<f64> = (0..36).map(|_| rng.next_f64()).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let stack = simple_stack(d, vals);
            let b = BoundaryMap::new(d, bvals).unwrap();
            let t = build_transition(&b, 2.5, 2.0).unwrap();
            for iters in [1, 3, 9] {
                let out = random_walk_refine(&stack, &t, iters).unwrap();
                for &v in out.maps()[0].values() {
                    assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                }
            }
        }
    }

    #[test]
    fn walk_dims_mismatch_is_error() {
        let stack = simple_stack(dims(3, 3), vec![0.0; 9]);
        let t = build_transition(&BoundaryMap::zeros(dims(4, 4)), 2.0, 4.0).unwrap();
        assert!(random_walk_refine(&stack, &t, 1).is_err());
    }

    fn two_label_probs(d: ImageDims, fg: Vec<f64>) -> ProbabilityStack {
        let bg: Vec<f64> = fg.iter().map(|v| 1.0 - v).collect();
        ProbabilityStack::new(
            d,
            vec![ClassId::BACKGROUND, ClassId::ECHINUS],
            vec![bg, fg],
        )
        .unwrap()
    }

    #[test]
    fn crf_zero_weights_is_unary_argmax() {
        let d = dims(4, 4);
        let mut rng = crate::rng::SplitMix64::new(77);
        let fg: Vec<f64> = (0..16).map(|_| rng.next_f64()).collect();
        let probs = two_label_probs(d, fg.clone());
        let img = uniform_image(d);
        let params = CrfParams {
            w_smooth: 0.0,
            w_appearance: 0.0,
            ..Default::default()
        };
        let out = crf_refine(&probs, &img, &params, false).unwrap();
        let expected = probs.argmax_mask();
        assert_eq!(out, expected);
    }

    #[test]
    fn crf_zero_iters_is_unary_argmax() {
        let d = dims(4, 4);
        let fg: Vec<f64> = (0..16).map(|i| if i % 3 == 0 { 0.9 } else { 0.2 }).collect();
        let probs = two_label_probs(d, fg);
        let img = uniform_image(d);
        let params = CrfParams {
            n_iters: 0,
            ..Default::default()
        };
        let out = crf_refine(&probs, &img, &params, false).unwrap();
        assert_eq!(out, probs.argmax_mask());
    }

    #[test]
    fn crf_corrects_noisy_unaries() {
        // two-region image, 5% of unaries flipped
        let d = dims(16, 16);
        let n = d.n_pixels();
        let mut intensity = vec![0.0_f64; n];
        let mut fg = vec![0.0_f64; n];
        let mut truth = vec![false; n];
        for row in 0..16 {
            for col in 0..16 {
                let idx = row * 16 + col;
                let is_fg = col >= 8;
                truth[idx] = is_fg;
                intensity[idx] = if is_fg { 200.0 } else { 40.0 };
                fg[idx] = if is_fg { 0.9 } else { 0.1 };
            }
        }
        let mut rng = crate::rng::SplitMix64::new(123);
        let mut flipped = Vec::new();
        while flipped.len() < 13 {
            let idx = rng.next_below(n);
            if !flipped.contains(&idx) {
                flipped.push(idx);
                fg[idx] = 1.0 - fg[idx];
            }
        }
        let img = IntensityImage::new(d, 1, intensity).unwrap();
        let probs = two_label_probs(d, fg);
        let out = crf_refine(&probs, &img, &CrfParams::default(), false).unwrap();
        let corrected = flipped
            .iter()
            .filter(|&&idx| {
                let label = out.values()[idx];
                (label == ClassId::ECHINUS) == truth[idx]
            })
            .count();
        assert!(
            corrected * 10 >= flipped.len() * 9,
            "only {corrected}/{} noisy pixels corrected",
            flipped.len()
        );
    }

    #[test]
    fn crf_size_guard() {
        let d = dims(300, 8);
        let fg = vec![0.5; d.n_pixels()];
        let probs = two_label_probs(d, fg);
        let img = uniform_image(d);
        let err = crf_refine(&probs, &img, &CrfParams::default(), false);
        assert!(matches!(err, Err(CoreError::ImageTooLarge { .. })));
        // forced path runs (degenerate params keep it cheap)
        let params = CrfParams {
            n_iters: 0,
            ..Default::default()
        };
        assert!(crf_refine(&probs, &img, &params, true).is_ok());
    }

    #[test]
    fn probability_rows_sum_to_one() {
        let d = dims(3, 3);
        let vals: Vec<f64> = (0..9).map(|i| i as f64 / 10.0).collect();
        let stack = simple_stack(d, vals);
        let probs = probabilities_with_background(&stack);
        for idx in 0..9 {
            let sum: f64 = probs.channels.iter().map(|ch| ch[idx]).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn segment_no_boxes_is_background() {
        let d = dims(8, 8);
        let out = segment(
            &[],
            None,
            &BoundaryMap::zeros(d),
            &uniform_image(d),
            &PipelineConfig::default(),
            false,
        )
        .unwrap();
        assert!(out.values().iter().all(|&c| c == ClassId::BACKGROUND));
    }

    #[test]
    fn segment_single_box_without_crf() {
        let d = dims(32, 32);
        let b = BBox::new(8, 8, 16, 16, ClassId::HOLOTHURIAN).unwrap();
        let cfg = PipelineConfig {
            crf: CrfParams {
                n_iters: 0,
                ..Default::default()
            },
            rw_iters: 0,
            ..Default::default()
        };
        let out = segment(
            &[b],
            None,
            &BoundaryMap::zeros(d),
            &uniform_image(d),
            &cfg,
            false,
        )
        .unwrap();
        // centre labelled foreground, far corner background
        assert_eq!(out.get(16, 16), ClassId::HOLOTHURIAN);
        assert_eq!(out.get(0, 0), ClassId::BACKGROUND);
        // foreground exactly where the Gaussian beats the synthesized background
        let g = gaussian_attention(&b, d, &GaussianParams::default()).unwrap();
        for row in 0..32 {
            for col in 0..32 {
                let inside_box = (8..24).contains(&row) && (8..24).contains(&col);
                let expected = if inside_box && g.get(row, col) > 0.5 {
                    ClassId::HOLOTHURIAN
                } else {
                    ClassId::BACKGROUND
                };
                assert_eq!(out.get(row, col), expected, "pixel ({row}, {col})");
            }
        }
    }

    #[test]
    fn segment_boundary_ring_confines_foreground() {
        let d = dims(32, 32);
        let b = BBox::new(8, 8, 16, 16, ClassId::HOLOTHURIAN).unwrap();
        let cfg = PipelineConfig {
            crf: CrfParams {
                n_iters: 0,
                ..Default::default()
            },
            rw_iters: 8,
            ..Default::default()
        };
        // ring of boundary probability 1 inside the box: rows/cols 10 and 21
        let mut ring = vec![0.0_f64; d.n_pixels()];
        for k in 10..=21usize {
            for (r, c) in [(10, k), (21, k), (k, 10), (k, 21)] {
                ring[r * 32 + c] = 1.0;
            }
        }
        let ring_map = BoundaryMap::new(d, ring).unwrap();
        let free = segment(
            &[b],
            None,
            &BoundaryMap::zeros(d),
            &uniform_image(d),
            &cfg,
            false,
        )
        .unwrap();
        let confined = segment(&[b], None, &ring_map, &uniform_image(d), &cfg, false).unwrap();
        let count = |mask: &LabelMask, inside: bool| {
            let mut n = 0;
            for row in 0..32usize {
                for col in 0..32usize {
                    let in_ring = (10..=21).contains(&row) && (10..=21).contains(&col);
                    if in_ring == inside && mask.get(row, col) == ClassId::HOLOTHURIAN {
                        n += 1;
                    }
                }
            }
            n
        };
        // the walk leaks mass out of the free map but not out of the ring
        assert!(count(&confined, false) <= count(&free, false));
        assert!(count(&confined, true) >= count(&free, true));
        // everything labelled foreground stays inside the ring
        for row in 0..32usize {
            for col in 0..32usize {
                if confined.get(row, col) == ClassId::HOLOTHURIAN {
                    assert!((10..=21).contains(&row) && (10..=21).contains(&col));
                }
            }
        }
    }

    #[test]
    fn segment_deterministic() {
        let d = dims(24, 24);
        let b1 = BBox::new(2, 2, 10, 10, ClassId::ECHINUS).unwrap();
        let b2 = BBox::new(10, 10, 12, 12, ClassId::SCALLOP).unwrap();
        let mut rng = crate::rng::SplitMix64::new(9);
        let bvals: Vec<f64> = (0..576).map(|_| rng.next_f64() * 0.3).collect();
        let boundary = BoundaryMap::new(d, bvals).unwrap();
        let ivals: Vec<f64> = (0..576).map(|_| rng.next_f64() * 255.0).collect();
        let image = IntensityImage::new(d, 1, ivals).unwrap();
        let cfg = PipelineConfig {
            crf: CrfParams {
                n_iters: 2,
                ..Default::default()
            },
            rw_iters: 4,
            ..Default::default()
        };
        let a = segment(&[b1, b2], None, &boundary, &image, &cfg, false).unwrap();
        let b = segment(&[b1, b2], None, &boundary, &image, &cfg, false).unwrap();
        assert_eq!(a, b);
    }
}
