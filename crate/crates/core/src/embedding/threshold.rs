// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    /// Assumed standard deviation of the entrywise noise.
    pub sigma: f64,
    /// Relative threshold `floor · s_max` used when `sigma` is zero.
    pub floor: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self { sigma: 0.0, floor: 1e-12 }
    }
}

impl ThresholdConfig {
    pub fn with_sigma(sigma: f64) -> Self {
        Self { sigma, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.floor > 0.0) || !self.floor.is_finite() {
            return Err(Error::InvalidParameter(format!("floor must be > 0, got {}", self.floor)));
        }
        Ok(())
    }
}

/// `f(β) = √(2(β+1) + 8β / ((β+1) + √(β² + 14β + 1)))`.
pub fn aspect_factor(beta: f64) -> f64 {
    let inner = (beta + 1.0) + (beta * beta + 14.0 * beta + 1.0).sqrt();
    (2.0 * (beta + 1.0) + 8.0 * beta / inner).sqrt()
}

/// Hard threshold for an `m × n` matrix; symmetric under transposition.
pub fn noise_threshold(largest: f64, m: usize, n: usize, cfg: &ThresholdConfig) -> f64 {
    if cfg.sigma == 0.0 {
        return cfg.floor * largest;
    }
    let (short, long) = if m <= n { (m, n) } else { (n, m) };
    let beta = short as f64 / long as f64;
    cfg.sigma * std::f64::consts::SQRT_2 * (long as f64).sqrt() * aspect_factor(beta)
}

/// Number of singular values at or above the noise threshold.
pub fn optimal_rank(values: &[f64], m: usize, n: usize, cfg: &ThresholdConfig) -> Result<usize> {
    cfg.validate()?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("matrix dimensions must be >= 1".into()));
    }
    let largest = values.first().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return Ok(0);
    }
    let threshold = noise_threshold(largest, m, n, cfg);
    Ok(values.iter().take_while(|&&s| s >= threshold).count())
}
