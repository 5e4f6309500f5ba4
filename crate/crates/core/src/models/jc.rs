// SPDX-License-Identifier: Apache-2.0

//! Two-level atom coupled to a damped bosonic mode (Jaynes–Cummings).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::qcore::{ops, ComplexMatrix, DensityMatrix, PureState};
use crate::{Error, Result};

use super::dynamics::{propagator, PreparedModel};
use super::gksl::lindblad_superoperator;

/// Probability mass of the initial coherent state kept by automatic truncation.
pub const TRUNCATION_MASS: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JcConfig {
    pub gamma: f64,
    pub g: f64,
    pub alpha: C64,
    pub tau: f64,
    /// Fock levels kept for the mode; 0 selects [`truncation_level`].
    pub n_levels: usize,
}

impl Default for JcConfig {
    fn default() -> Self {
        Self { gamma: 0.05, g: 2.5, alpha: C64::new(1.1, 0.0), tau: 0.03, n_levels: 0 }
    }
}

impl JcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("JC gamma must be >= 0, got {}", self.gamma)));
        }
        if !self.g.is_finite() || !self.alpha.is_finite() || !(self.tau >= 0.0) {
            return Err(Error::InvalidParameter("JC parameters must be finite, tau >= 0".into()));
        }
        Ok(())
    }

    /// Truncation actually used: the explicit value, or the automatic one.
    pub fn resolved_levels(&self) -> usize {
        if self.n_levels > 0 {
            self.n_levels
        } else {
            truncation_level(self.alpha, TRUNCATION_MASS)
        }
    }
}

/// Coherent state truncated to `n_levels` Fock states and renormalized.
pub fn coherent_state(alpha: C64, n_levels: usize) -> Result<PureState> {
    if n_levels == 0 {
        return Err(Error::InvalidParameter("coherent state needs n_levels >= 1".into()));
    }
    let prefactor = (-alpha.norm_sqr() / 2.0).exp();
    let mut amps = Vec::with_capacity(n_levels);
    let mut term = C64::new(prefactor, 0.0);
    for n in 0..n_levels {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        amps.push(term);
    }
    PureState::normalized(amps)
}

/// Smallest `n` with `Σ_{k<n} Poisson(|α|²)(k) ≥ mass`.
pub fn truncation_level(alpha: C64, mass: f64) -> usize {
    let mean = alpha.norm_sqr();
    let mut p = (-mean).exp();
    let mut cumulative = 0.0;
    let mut n = 0;
    loop {
        cumulative += p;
        n += 1;
        // the tail underflows long before this for any representable mean
        if cumulative >= mass || n > 100_000 {
            return n;
        }
        p *= mean / n as f64;
    }
}

/// Joint Hamiltonian `a†a + ½σ_z + (g/2)(σ₊⊗a + σ₋⊗a†)` on atom ⊗ mode.
pub fn jc_hamiltonian(g: f64, n_levels: usize) -> ComplexMatrix {
    let a = ops::destroy(n_levels);
    let id_mode = ComplexMatrix::identity(n_levels);
    let id_atom = ComplexMatrix::identity(2);
    let sp = ops::sigma_plus();
    let mut h = id_atom.kron(&ops::number(n_levels));
    h.add_scaled(C64::new(0.5, 0.0), &ops::sigma_z().kron(&id_mode));
    let coupling = &sp.kron(&a) + &sp.adjoint().kron(&a.adjoint());
    h.add_scaled(C64::new(g / 2.0, 0.0), &coupling);
    h
}

/// Vectorized Lindbladian with collapse operator `√γ·a`.
pub fn jc_superoperator(cfg: &JcConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = cfg.resolved_levels();
    let h = jc_hamiltonian(cfg.g, n);
    let collapse = ComplexMatrix::identity(2).kron(&ops::destroy(n)).scale_real(cfg.gamma.sqrt());
    Ok(lindblad_superoperator(&h, &[collapse]))
}

pub fn prepare_jc(cfg: &JcConfig) -> Result<PreparedModel> {
    let n = cfg.resolved_levels();
    let phi = propagator(&jc_superoperator(cfg)?, cfg.tau)?;
    let env = coherent_state(cfg.alpha, n)?.projector();
    PreparedModel::new(phi, 2, n, env)
}

/// Atom trajectory from `|ψ⟩⟨ψ| ⊗ |α⟩⟨α|`.
pub fn simulate_jc(cfg: &JcConfig, psi: &PureState, steps: usize) -> Result<Vec<DensityMatrix>> {
    prepare_jc(cfg)?.trajectory(psi, steps)
}
