//! Flat key-value configuration files.
//!
//! One `key = value` pair per line, `#` comments. Keys mirror the
//! configuration record fields; dotted prefixes scope the CRF, boundary-fit,
//! and Gaussian groups. Unknown keys are rejected so typos fail loudly.

use std::path::Path;

use boxseg_core::attention::GaussianParams;
use boxseg_core::{BoundaryFitConfig, PipelineConfig};
use serde::Serialize;

use crate::error::DataError;

/// Effective configuration for a CLI run; embedded into the run manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    pub fit: BoundaryFitConfig,
    pub gaussian: GaussianParams,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), boxseg_core::CoreError> {
        self.pipeline.validate()?;
        self.fit.validate()?;
        self.gaussian.validate()
    }

    /// Loads a config file over the defaults; `None` gives plain defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, DataError> {
        match path {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
                Self::parse(&text).map_err(|message| DataError::Config {
                    path: path.to_path_buf(),
                    message,
                })
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            cfg.set(key, value)
                .map_err(|msg| format!("line {}: {msg}", lineno + 1))?;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("invalid value '{value}' for {key}"))
        }
        match key {
            "epsilon" => self.pipeline.epsilon = num(key, value)?,
            "theta_fg" => self.pipeline.theta_fg = num(key, value)?,
            "theta_bg" => self.pipeline.theta_bg = num(key, value)?,
            "gamma" => self.pipeline.gamma = num(key, value)?,
            "rw_beta" => self.pipeline.rw_beta = num(key, value)?,
            "rw_iters" => self.pipeline.rw_iters = num(key, value)?,
            "log_clamp" => self.pipeline.log_clamp = num(key, value)?,
            "crf.n_iters" => self.pipeline.crf.n_iters = num(key, value)?,
            "crf.w_smooth" => self.pipeline.crf.w_smooth = num(key, value)?,
            "crf.theta_gamma" => self.pipeline.crf.theta_gamma = num(key, value)?,
            "crf.w_appearance" => self.pipeline.crf.w_appearance = num(key, value)?,
            "crf.theta_alpha" => self.pipeline.crf.theta_alpha = num(key, value)?,
            "crf.theta_beta" => self.pipeline.crf.theta_beta = num(key, value)?,
            "fit.steps" => self.fit.steps = num(key, value)?,
            "fit.learning_rate" => self.fit.learning_rate = num(key, value)?,
            "fit.init_logit" => self.fit.init_logit = num(key, value)?,
            "fit.seed" => self.fit.seed = num(key, value)?,
            "fit.pair_cap" => self.fit.pair_cap = num(key, value)?,
            "gauss.rho" => self.gaussian.rho = num(key, value)?,
            "gauss.sigma_scale" => self.gaussian.sigma_scale = num(key, value)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }
}
