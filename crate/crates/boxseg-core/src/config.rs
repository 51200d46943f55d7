//! Pipeline configuration records.
//!
//! Defaults follow the reference operating point: box-activation threshold
//! 0.3, foreground/background thresholds 0.3/0.05, pair radius 5. Random-walk
//! and CRF parameters have no published values and are pinned here so that
//! runs are reproducible.

use alloc::format;
use alloc::string::String;

use crate::error::CoreError;

/// Dense-CRF mean-field parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrfParams {
    /// Mean-field iterations; 0 leaves the unary argmax untouched.
    pub n_iters: u32,
    /// Smoothness kernel weight.
    pub w_smooth: f64,
    /// Smoothness kernel spatial std, pixels.
    pub theta_gamma: f64,
    /// Appearance kernel weight.
    pub w_appearance: f64,
    /// Appearance kernel spatial std, pixels.
    pub theta_alpha: f64,
    /// Appearance kernel intensity std, 0..=255 units.
    pub theta_beta: f64,
}

impl Default for CrfParams {
    fn default() -> Self {
        Self {
            n_iters: 5,
            w_smooth: 3.0,
            theta_gamma: 3.0,
            w_appearance: 5.0,
            theta_alpha: 30.0,
            theta_beta: 13.0,
        }
    }
}

impl CrfParams {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.w_smooth < 0.0 || self.w_appearance < 0.0 {
            return Err(invalid("CRF kernel weights must be non-negative"));
        }
        if self.theta_gamma <= 0.0 || self.theta_alpha <= 0.0 || self.theta_beta <= 0.0 {
            return Err(invalid("CRF kernel widths must be positive"));
        }
        Ok(())
    }
}

/// End-to-end pipeline configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    /// Box-activation test threshold (ε).
    pub epsilon: f64,
    /// Foreground threshold on fused activations.
    pub theta_fg: f64,
    /// Background threshold on fused activations.
    pub theta_bg: f64,
    /// Maximum pixel-pair distance (γ), pixels, strict.
    pub gamma: f64,
    /// Random-walk affinity exponent; sharpens boundary walls.
    pub rw_beta: f64,
    /// Random-walk iterations.
    pub rw_iters: u32,
    /// Dense-CRF post-processing parameters.
    pub crf: CrfParams,
    /// Clamp applied to affinities before logarithms in the pair loss.
    pub log_clamp: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.3,
            theta_fg: 0.3,
            theta_bg: 0.05,
            gamma: 5.0,
            rw_beta: 4.0,
            rw_iters: 8,
            crf: CrfParams::default(),
            log_clamp: 1e-6,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.theta_bg > 0.0 && self.theta_bg < self.theta_fg && self.theta_fg <= 1.0) {
            return Err(invalid(&format!(
                "thresholds must satisfy 0 < theta_bg < theta_fg <= 1, got theta_bg={}, theta_fg={}",
                self.theta_bg, self.theta_fg
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid("epsilon must lie in (0, 1)"));
        }
        if self.gamma <= 0.0 {
            return Err(invalid("gamma must be positive"));
        }
        if !(self.log_clamp > 0.0 && self.log_clamp <= 0.01) {
            return Err(invalid("log_clamp must lie in (0, 0.01]"));
        }
        if self.rw_beta <= 0.0 {
            return Err(invalid("rw_beta must be positive"));
        }
        self.crf.validate()
    }
}

/// Gradient-descent settings for fitting a boundary map from a label mask.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryFitConfig {
    /// Descent iterations.
    pub steps: u32,
    /// Step size on the logit grid.
    pub learning_rate: f64,
    /// Initial logit; the map starts at `sigmoid(init_logit)` everywhere.
    pub init_logit: f64,
    /// Seed for pair subsampling.
    pub seed: u64,
    /// Maximum number of pairs kept; larger sets are subsampled.
    pub pair_cap: usize,
}

impl Default for BoundaryFitConfig {
    fn default() -> Self {
        Self {
            steps: 300,
            learning_rate: 5.0,
            init_logit: 0.0,
            seed: 0,
            pair_cap: 200_000,
        }
    }
}

impl BoundaryFitConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.learning_rate <= 0.0 {
            return Err(invalid("learning_rate must be positive"));
        }
        if self.pair_cap == 0 {
            return Err(invalid("pair_cap must be positive"));
        }
        Ok(())
    }
}

fn invalid(msg: &str) -> CoreError {
    CoreError::InvalidConfig(String::from(msg))
}
