//! Finite-difference audit of the pair-loss gradient.
//!
//! Builds a random label mask and boundary map, then compares the analytic
//! gradient against central differences pixel by pixel. Pixels whose loss is
//! non-smooth within the stencil (argmax ties, clamp boundaries) are skipped;
//! everywhere else the two must agree to a tight relative tolerance.

use boxseg_core::affinity::{boundary_loss, build_pair_sets, PairSet};
use boxseg_core::rng::SplitMix64;
use boxseg_core::{BoundaryMap, ImageDims, LabelMask, PipelineConfig};

use crate::error::DataError;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-4;
/// Pass threshold on the maximum relative error.
pub const REL_TOLERANCE: f64 = 1e-4;
/// Exclusion margin around argmax ties and clamp boundaries.
const TIE_MARGIN: f64 = 10.0 * FD_STEP;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub size: u32,
    pub seed: u64,
    pub pos_pairs: usize,
    pub neg_pairs: usize,
    pub checked_pixels: usize,
    pub skipped_pixels: usize,
    pub max_rel_error: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < REL_TOLERANCE
    }

    pub fn render(&self) -> String {
        format!(
            "gradcheck size={} seed={} pairs={}+{} checked={} skipped={} max_rel_error={:.3e} -> {}",
            self.size,
            self.seed,
            self.pos_pairs,
            self.neg_pairs,
            self.checked_pixels,
            self.skipped_pixels,
            self.max_rel_error,
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

/// Runs the audit on a `size x size` random instance. `size` must be in 1..=64.
pub fn run_gradcheck(seed: u64, size: u32) -> Result<GradCheckReport, DataError> {
    if size == 0 || size > 64 {
        return Err(boxseg_core::CoreError::InvalidArgument(format!(
            "gradcheck size must lie in 1..=64, got {size}"
        ))
        .into());
    }
    let dims = ImageDims::new(size, size)?;
    let n = dims.n_pixels();
    let mut rng = SplitMix64::new(seed);
    let labels: Vec<u8> = (0..n).map(|_| rng.next_below(3) as u8).collect();
    let mask = LabelMask::from_bytes(dims, &labels)?;
    let gamma = 3.0;
    let pairs = build_pair_sets(&mask, gamma)?;
    let log_clamp = PipelineConfig::default().log_clamp;
    // Sampled away from 0 and 1: the log terms' curvature blows up as
    // 1/a^2 there and would dominate the stencil's truncation error.
    let values: Vec<f64> = (0..n).map(|_| 0.02 + 0.96 * rng.next_f64()).collect();
    let boundary = BoundaryMap::new(dims, values.clone())?;
    let analytic = boundary_loss(&boundary, &pairs, log_clamp)?;

    let mut max_rel = 0.0_f64;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut probe = values.clone();
    for idx in 0..n {
        if non_smooth_at(&values, &pairs, idx, log_clamp) {
            skipped += 1;
            continue;
        }
        let center = values[idx];
        probe[idx] = (center + FD_STEP).min(1.0);
        let hi = probe[idx];
        let loss_hi = boundary_loss(&BoundaryMap::new(dims, probe.clone())?, &pairs, log_clamp)?
            .loss;
        probe[idx] = (center - FD_STEP).max(0.0);
        let lo = probe[idx];
        let loss_lo = boundary_loss(&BoundaryMap::new(dims, probe.clone())?, &pairs, log_clamp)?
            .loss;
        probe[idx] = center;
        let fd = (loss_hi - loss_lo) / (hi - lo);
        let ga = analytic.grad[idx];
        let denom = ga.abs().max(fd.abs());
        if denom > 1e-9 {
            max_rel = max_rel.max((ga - fd).abs() / denom);
        }
        checked += 1;
    }
    Ok(GradCheckReport {
        size,
        seed,
        pos_pairs: pairs.pos.len(),
        neg_pairs: pairs.neg.len(),
        checked_pixels: checked,
        skipped_pixels: skipped,
        max_rel_error: max_rel,
    })
}

/// True when the loss is non-smooth in `idx` within the stencil: the pixel
/// sits within the tie margin of some line's maximum, is an argmax with a
/// close runner-up, or its pair affinity sits at a clamp boundary.
fn non_smooth_at(values: &[f64], pairs: &PairSet, idx: usize, log_clamp: f64) -> bool {
    pairs.pos.iter().chain(&pairs.neg).any(|pair| {
        if !pair.line.contains(&idx) {
            return false;
        }
        let mut max_b = f64::NEG_INFINITY;
        let mut argmax = usize::MAX;
        for &px in &pair.line {
            if values[px] > max_b {
                max_b = values[px];
                argmax = px;
            }
        }
        if argmax == idx {
            let runner_close = pair
                .line
                .iter()
                .filter(|&&px| px != idx)
                .any(|&px| max_b - values[px] < TIE_MARGIN);
            let a = 1.0 - max_b;
            let clamp_close =
                (a - log_clamp).abs() < TIE_MARGIN || (1.0 - log_clamp - a).abs() < TIE_MARGIN;
            runner_close || clamp_close
        } else {
            max_b - values[idx] < TIE_MARGIN
        }
    })
}
