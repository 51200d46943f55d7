//! Pixel-pair relations and boundary-map fitting.
//!
//! Nearby pixel pairs are split by their mask labels into same-class and
//! different-class sets. The affinity of a pair is one minus the maximum
//! boundary probability along the discrete segment between its pixels; a
//! binary cross-entropy loss over both sets, driven by direct gradient
//! descent on a per-pixel logit grid, recovers a boundary probability map
//! from the mask alone.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::{BoundaryFitConfig, PipelineConfig};
use crate::error::CoreError;
use crate::geom::ImageDims;
use crate::maps::{BoundaryMap, LabelMask};
use crate::math;
use crate::rng::SplitMix64;

/// Pair polarity: whether the two pixels share a mask label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Same,
    Different,
}

/// An unordered pixel pair stored with `i < j` in flat row-major order.
///
/// `line` is the Bresenham rasterization from `i` to `j` including both
/// endpoints; the fixed orientation makes argmax tie-breaks reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelPair {
    pub i: usize,
    pub j: usize,
    pub polarity: Polarity,
    pub line: Vec<usize>,
}

/// Same-class and different-class pair sets under one distance bound.
#[derive(Debug, Clone)]
pub struct PairSet {
    pub pos: Vec<PixelPair>,
    pub neg: Vec<PixelPair>,
    pub gamma: f64,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    /// Uniformly subsamples the union down to `cap` pairs, preserving the
    /// canonical pair order. Deterministic for a given seed.
    pub fn subsample(self, cap: usize, seed: u64) -> Self {
        let total = self.len();
        if total <= cap {
            return self;
        }
        let mut rng = SplitMix64::new(seed);
        // Partial Fisher-Yates over the concatenated index space.
        let mut indices: Vec<usize> = (0..total).collect();
        for k in 0..cap {
            let pick = k + rng.next_below(total - k);
            indices.swap(k, pick);
        }
        let mut keep = indices[..cap].to_vec();
        keep.sort_unstable();
        let n_pos = self.pos.len();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut all = self;
        // Drain in reverse so earlier indices stay valid.
        for &idx in keep.iter().rev() {
            if idx < n_pos {
                pos.push(all.pos.swap_remove(idx));
            } else {
                neg.push(all.neg.swap_remove(idx - n_pos));
            }
        }
        pos.reverse();
        neg.reverse();
        PairSet {
            pos,
            neg,
            gamma: all.gamma,
        }
    }
}

/// Neighborhood offsets `(dr, dc)` with Euclidean norm strictly below
/// `gamma`, restricted to the half-plane that makes each unordered pair
/// appear exactly once (flat index of the offset target is always larger).
fn half_offsets(gamma: f64) -> Vec<(i64, i64)> {
    let reach = math::floor(gamma) as i64; // strict bound: offsets of norm == gamma excluded
    let limit = gamma * gamma;
    let mut offsets = Vec::new();
    for dr in 0..=reach {
        let dc_lo = if dr == 0 { 1 } else { -reach };
        for dc in dc_lo..=reach {
            if ((dr * dr + dc * dc) as f64) < limit {
                offsets.push((dr, dc));
            }
        }
    }
    offsets
}

/// Builds the same-/different-class pair sets for a label mask.
///
/// Pairs touching an ignore-labeled pixel are excluded; background counts as
/// a class of its own.
pub fn build_pair_sets(label: &LabelMask, gamma: f64) -> Result<PairSet, CoreError> {
    if gamma <= 0.0 {
        return Err(CoreError::InvalidArgument(
            "pair distance bound must be positive".into(),
        ));
    }
    let dims = label.dims();
    let h = dims.height() as i64;
    let w = dims.width() as i64;
    let offsets = half_offsets(gamma);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let i = (row * w + col) as usize;
            let li = label.values()[i];
            if li.is_ignore() {
                continue;
            }
            for &(dr, dc) in &offsets {
                let (nr, nc) = (row + dr, col + dc);
                if nr < 0 || nr >= h || nc < 0 || nc >= w {
                    continue;
                }
                let j = (nr * w + nc) as usize;
                let lj = label.values()[j];
                if lj.is_ignore() {
                    continue;
                }
                let polarity = if li == lj {
                    Polarity::Same
                } else {
                    Polarity::Different
                };
                let pair = PixelPair {
                    i,
                    j,
                    polarity,
                    line: rasterize_line(i, j, dims),
                };
                match polarity {
                    Polarity::Same => pos.push(pair),
                    Polarity::Different => neg.push(pair),
                }
            }
        }
    }
    Ok(PairSet { pos, neg, gamma })
}

/// Bresenham segment between two flat indices, inclusive of both endpoints.
///
/// Reversal symmetry holds exactly: `rasterize_line(i, j)` is the reverse of
/// `rasterize_line(j, i)`. Both indices must be in range.
pub fn rasterize_line(i: usize, j: usize, dims: ImageDims) -> Vec<usize> {
    assert!(i < dims.n_pixels() && j < dims.n_pixels());
    if i > j {
        let mut line = rasterize_line(j, i, dims);
        line.reverse();
        return line;
    }
    let w = dims.width() as usize;
    let (r0, c0) = ((i / w) as i64, (i % w) as i64);
    let (r1, c1) = ((j / w) as i64, (j % w) as i64);
    let dx = (c1 - c0).abs();
    let dy = -(r1 - r0).abs();
    let sx = if c0 < c1 { 1 } else { -1 };
    let sy = if r0 < r1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut c, mut r) = (c0, r0);
    let mut line = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        line.push(r as usize * w + c as usize);
        if c == c1 && r == r1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            c += sx;
        }
        if e2 <= dx {
            err += dx;
            r += sy;
        }
    }
    line
}

/// Affinity of a pair: one minus the maximum boundary probability on its line.
pub fn affinity(boundary: &BoundaryMap, pair: &PixelPair) -> f64 {
    1.0 - line_max(boundary.values(), &pair.line).0
}

/// Maximum value and its pixel over a line; ties resolve to the earliest
/// position along the line.
#[inline]
fn line_max(values: &[f64], line: &[usize]) -> (f64, usize) {
    let mut best = values[line[0]];
    let mut best_px = line[0];
    for &px in &line[1..] {
        if values[px] > best {
            best = values[px];
            best_px = px;
        }
    }
    (best, best_px)
}

/// Loss value and gradient of the pair cross-entropy over a boundary grid.
#[derive(Debug, Clone)]
pub struct BoundaryLoss {
    pub loss: f64,
    /// Exact subgradient with respect to each boundary pixel. Each pair
    /// contributes only at the argmax pixel of its line.
    pub grad: Vec<f64>,
    /// Number of same-class pairs contributing; 0 means the term was dropped.
    pub pos_terms: usize,
    /// Number of different-class pairs contributing; 0 means the term was dropped.
    pub neg_terms: usize,
}

/// Binary cross-entropy over pair affinities with its analytic gradient.
///
/// Affinities are clamped into `[log_clamp, 1 - log_clamp]` before the
/// logarithms; pairs sitting at a clamp boundary contribute zero gradient.
pub fn boundary_loss(
    boundary: &BoundaryMap,
    pairs: &PairSet,
    log_clamp: f64,
) -> Result<BoundaryLoss, CoreError> {
    if pairs.is_empty() {
        return Err(CoreError::InvalidArgument(
            "pair loss needs at least one pair".into(),
        ));
    }
    Ok(loss_grad(
        boundary.values(),
        boundary.dims().n_pixels(),
        pairs,
        log_clamp,
    ))
}

fn loss_grad(values: &[f64], n_pixels: usize, pairs: &PairSet, log_clamp: f64) -> BoundaryLoss {
    let lo = log_clamp;
    let hi = 1.0 - log_clamp;
    let mut loss = 0.0;
    let mut grad = vec![0.0_f64; n_pixels];
    if !pairs.pos.is_empty() {
        let inv = 1.0 / pairs.pos.len() as f64;
        for pair in &pairs.pos {
            let (max_b, argmax) = line_max(values, &pair.line);
            let a = 1.0 - max_b;
            let clamped = a.clamp(lo, hi);
            loss -= math::ln(clamped) * inv;
            // d(-ln a)/dB = (1/a) via da/dB = -1 at the argmax pixel.
            if a > lo && a < hi {
                grad[argmax] += inv / clamped;
            }
        }
    }
    if !pairs.neg.is_empty() {
        let inv = 1.0 / pairs.neg.len() as f64;
        for pair in &pairs.neg {
            let (max_b, argmax) = line_max(values, &pair.line);
            let a = 1.0 - max_b;
            let clamped = a.clamp(lo, hi);
            loss -= math::ln(1.0 - clamped) * inv;
            if a > lo && a < hi {
                grad[argmax] -= inv / (1.0 - clamped);
            }
        }
    }
    BoundaryLoss {
        loss,
        grad,
        pos_terms: pairs.pos.len(),
        neg_terms: pairs.neg.len(),
    }
}

/// Fits a boundary probability map to a label mask by gradient descent.
///
/// The map is parameterized as `sigmoid(z)` over a per-pixel logit grid so
/// probabilities stay in `(0, 1)` without projection. Deterministic for a
/// given configuration; pairs beyond `pair_cap` are subsampled with the
/// configured seed. Errors when the mask yields no pairs at all.
pub fn fit_boundary_map(
    label: &LabelMask,
    cfg: &BoundaryFitConfig,
    pipeline: &PipelineConfig,
) -> Result<BoundaryMap, CoreError> {
    cfg.validate()?;
    pipeline.validate()?;
    let pairs = build_pair_sets(label, pipeline.gamma)?;
    if pairs.is_empty() {
        return Err(CoreError::InvalidArgument(
            "label mask yields no usable pixel pairs".into(),
        ));
    }
    let pairs = pairs.subsample(cfg.pair_cap, cfg.seed);
    let dims = label.dims();
    let n = dims.n_pixels();
    let mut logits = vec![cfg.init_logit; n];
    let mut probs = vec![0.0_f64; n];
    for _ in 0..cfg.steps {
        for (p, &z) in probs.iter_mut().zip(&logits) {
            *p = math::sigmoid(z);
        }
        let result = loss_grad(&probs, n, &pairs, pipeline.log_clamp);
        for idx in 0..n {
            let g = result.grad[idx];
            if g != 0.0 {
                // Chain rule through the sigmoid.
                let p = probs[idx];
                logits[idx] -= cfg.learning_rate * g * p * (1.0 - p);
            }
        }
    }
    for (p, &z) in probs.iter_mut().zip(&logits) {
        *p = math::sigmoid(z);
    }
    BoundaryMap::new(dims, probs)
}
