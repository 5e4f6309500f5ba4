// SPDX-License-Identifier: Apache-2.0

//! Spin-boson model with a Lorentzian bath, simulated through a single
//! damped pseudomode.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::qcore::{ops, ComplexMatrix, DensityMatrix, PureState};
use crate::{Error, Result};

use super::dynamics::{propagator, PreparedModel};
use super::gksl::lindblad_superoperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinBosonConfig {
    pub delta: f64,
    pub g: f64,
    pub gamma: f64,
    pub omega0: f64,
    pub tau: f64,
    pub n_levels: usize,
}

impl Default for SpinBosonConfig {
    fn default() -> Self {
        Self { delta: 0.5, g: 0.5, gamma: 0.05, omega0: 1.0, tau: 0.15, n_levels: 8 }
    }
}

impl SpinBosonConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta, self.g, self.gamma, self.omega0, self.tau]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("spin-boson parameters must be finite".into()));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.omega0 > self.gamma / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "overdamped bath: omega0 = {} <= gamma/2 = {}",
                self.omega0,
                self.gamma / 2.0
            )));
        }
        if self.n_levels == 0 || !(self.tau >= 0.0) {
            return Err(Error::InvalidParameter("n_levels must be >= 1 and tau >= 0".into()));
        }
        Ok(())
    }
}

/// `J(ω) = γ g² ω / ((ω² − ω₀²)² + γ² ω²)`.
pub fn spectral_density(cfg: &SpinBosonConfig, omega: f64) -> f64 {
    let w2 = omega * omega;
    let detune = w2 - cfg.omega0 * cfg.omega0;
    cfg.gamma * cfg.g * cfg.g * omega / (detune * detune + cfg.gamma * cfg.gamma * w2)
}

/// `C(0) = (1/π) ∫₀^∞ J(ω) dω`, by quadrature split around the resonance.
pub fn bath_correlation_zero(cfg: &SpinBosonConfig) -> f64 {
    let j = |w: f64| spectral_density(cfg, w) / std::f64::consts::PI;
    let lo = (cfg.omega0 - 10.0 * cfg.gamma).max(0.0);
    let hi = cfg.omega0 + 10.0 * cfg.gamma;
    let tol = 1e-14;
    // tanh-sinh misses the narrow resonance; Clenshaw-Curtis resolves it
    let mut total = quadrature::clenshaw_curtis::integrate(j, lo, hi, tol).integral;
    if lo > 0.0 {
        total += quadrature::clenshaw_curtis::integrate(j, 0.0, lo, tol).integral;
    }
    // ω = hi + u/(1−u) maps [0, 1) onto [hi, ∞)
    let tail = |u: f64| {
        let s = 1.0 - u;
        j(hi + u / s) / (s * s)
    };
    total + quadrature::integrate(tail, 0.0, 1.0, tol).integral
}

/// Pseudomode frequency `Ω = √(ω₀² − γ²/4)`.
pub fn pseudomode_frequency(cfg: &SpinBosonConfig) -> f64 {
    (cfg.omega0 * cfg.omega0 - cfg.gamma * cfg.gamma / 4.0).sqrt()
}

/// Coupling `λ = √C(0)`.
pub fn pseudomode_coupling(cfg: &SpinBosonConfig) -> f64 {
    bath_correlation_zero(cfg).sqrt()
}

/// Free pseudomode correlation `λ² e^{−iΩt − γt/2}`.
pub fn pseudomode_correlation(cfg: &SpinBosonConfig, t: f64) -> C64 {
    let lambda2 = bath_correlation_zero(cfg);
    let omega = pseudomode_frequency(cfg);
    C64::new(-cfg.gamma * t / 2.0, -omega * t).exp() * lambda2
}

/// `½σ_z + ½Δσ_x + Ω a†a + λ σ_z(a + a†)` on atom ⊗ pseudomode.
pub fn spin_boson_hamiltonian(cfg: &SpinBosonConfig) -> ComplexMatrix {
    let n = cfg.n_levels;
    let a = ops::destroy(n);
    let id_mode = ComplexMatrix::identity(n);
    let mut atom = ops::sigma_z().scale_real(0.5);
    atom.add_scaled(C64::new(cfg.delta / 2.0, 0.0), &ops::sigma_x());
    let mut h = atom.kron(&id_mode);
    h.add_scaled(
        C64::new(pseudomode_frequency(cfg), 0.0),
        &ComplexMatrix::identity(2).kron(&ops::number(n)),
    );
    let x = &a + &a.adjoint();
    h.add_scaled(C64::new(pseudomode_coupling(cfg), 0.0), &ops::sigma_z().kron(&x));
    h
}

/// Vectorized Lindbladian with collapse operator `√γ·a` on the pseudomode.
pub fn spin_boson_pseudomode(cfg: &SpinBosonConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let collapse = ComplexMatrix::identity(2)
        .kron(&ops::destroy(cfg.n_levels))
        .scale_real(cfg.gamma.sqrt());
    Ok(lindblad_superoperator(&spin_boson_hamiltonian(cfg), &[collapse]))
}

pub fn prepare_spin_boson(cfg: &SpinBosonConfig) -> Result<PreparedModel> {
    let phi = propagator(&spin_boson_pseudomode(cfg)?, cfg.tau)?;
    let vacuum = PureState::basis(cfg.n_levels, 0).projector();
    PreparedModel::new(phi, 2, cfg.n_levels, vacuum)
}

/// Atom trajectory from `|ψ⟩⟨ψ| ⊗ |0⟩⟨0|`.
pub fn simulate_spin_boson(
    cfg: &SpinBosonConfig,
    psi: &PureState,
    steps: usize,
) -> Result<Vec<DensityMatrix>> {
    prepare_spin_boson(cfg)?.trajectory(psi, steps)
}
