// SPDX-License-Identifier: Apache-2.0

//! Propagators, stationary states and trajectory stepping.

use num_complex::Complex64 as C64;

use crate::qcore::{
    devectorize, linalg, partial_trace_env, partial_trace_system, vectorize, ComplexMatrix,
    DensityMatrix, PureState,
};
use crate::{Error, Result};

use super::gksl::{gksl_superoperator, GkslGenerator};

/// Eigenvalues below this modulus count towards the null space of `L_vec`.
pub const NULL_TOL: f64 = 1e-9;

/// Tolerance used when validating simulated states.
pub const STATE_TOL: f64 = 1e-8;

/// `Φ = exp(τ L_vec)`.
pub fn propagator(l_vec: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
    }
    if !l_vec.is_square() {
        return Err(Error::DimensionMismatch("superoperator must be square".into()));
    }
    linalg::expm(&l_vec.scale_real(tau))
}

/// Fixed point of the generator: the eigenvector whose eigenvalue is
/// closest to zero, devectorized, Hermitized and trace normalized.
pub fn stationary_state(l_vec: &ComplexMatrix, d_total: usize) -> Result<DensityMatrix> {
    let n = d_total * d_total;
    if l_vec.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "superoperator is {}x{}, expected {n}x{n}",
            l_vec.rows(),
            l_vec.cols()
        )));
    }
    let eig = linalg::eig(l_vec)?;
    let count = eig.values.iter().filter(|v| v.norm() < NULL_TOL).count();
    if count > 1 {
        return Err(Error::DegenerateStationaryState { count, tol: NULL_TOL });
    }
    let best = eig
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Decomposition("empty spectrum".into()))?;
    let raw = devectorize(&eig.vectors.column(best), d_total)?.hermitian_part();
    let tr = raw.trace();
    if tr.norm() < f64::EPSILON {
        return Err(Error::NotADensityMatrix("stationary candidate has zero trace".into()));
    }
    let rho = raw.scale(C64::new(1.0, 0.0) / tr).hermitian_part();
    let residual = vector_norm(&l_vec.matvec(&vectorize(&rho)));
    let scale = l_vec.frobenius_norm();
    if residual > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Decomposition(format!(
            "stationary residual {residual:e} exceeds 1e-8 * |L| = {:e}",
            1e-8 * scale
        )));
    }
    DensityMatrix::with_tolerance(rho, STATE_TOL)
}

fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A propagator on `system ⊗ environment` together with the initial
/// environment state, shared by every trajectory of a dataset.
#[derive(Clone, Debug)]
pub struct PreparedModel {
    pub propagator: ComplexMatrix,
    pub system_dim: usize,
    pub env_dim: usize,
    pub env_state: ComplexMatrix,
}

impl PreparedModel {
    pub fn new(
        propagator: ComplexMatrix,
        system_dim: usize,
        env_dim: usize,
        env_state: ComplexMatrix,
    ) -> Result<Self> {
        let joint = system_dim * env_dim;
        if propagator.shape() != (joint * joint, joint * joint) {
            return Err(Error::DimensionMismatch("propagator does not match joint dimension".into()));
        }
        if env_state.shape() != (env_dim, env_dim) {
            return Err(Error::DimensionMismatch("environment state shape".into()));
        }
        Ok(Self { propagator, system_dim, env_dim, env_state })
    }

    /// System trajectory of length `steps` starting from `|ψ⟩⟨ψ| ⊗ ϱ_E`.
    pub fn trajectory(&self, psi: &PureState, steps: usize) -> Result<Vec<DensityMatrix>> {
        if psi.dim() != self.system_dim {
            return Err(Error::DimensionMismatch(format!(
                "initial state has dim {}, expected {}",
                psi.dim(),
                self.system_dim
            )));
        }
        let joint = self.system_dim * self.env_dim;
        let mut state = vectorize(&psi.projector().kron(&self.env_state));
        let mut out = Vec::with_capacity(steps);
        for step in 0..steps {
            if step > 0 {
                state = self.propagator.matvec(&state);
            }
            let rho = devectorize(&state, joint)?;
            let sys = partial_trace_env(&rho, self.system_dim, self.env_dim)?.hermitian_part();
            out.push(DensityMatrix::with_tolerance(sys, STATE_TOL)?);
        }
        Ok(out)
    }
}

/// Propagator and stationary environment state of a GKSL generator.
pub fn prepare_finite_env(generator: &GkslGenerator, tau: f64) -> Result<PreparedModel> {
    let l_vec = gksl_superoperator(generator);
    let joint = generator.joint_dim();
    let stationary = stationary_state(&l_vec, joint)?;
    let env = partial_trace_system(stationary.matrix(), generator.system_dim, generator.env_dim)?;
    PreparedModel::new(propagator(&l_vec, tau)?, generator.system_dim, generator.env_dim, env)
}

/// Reduced system trajectory with the environment starting in the
/// marginal of the joint stationary state.
pub fn simulate_finite_env(
    generator: &GkslGenerator,
    psi: &PureState,
    steps: usize,
    tau: f64,
) -> Result<Vec<DensityMatrix>> {
    prepare_finite_env(generator, tau)?.trajectory(psi, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gksl::{lindblad_superoperator, random_gksl, RateNormalization};
    use crate::qcore::ops;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn amplitude_damping(gamma: f64) -> ComplexMatrix {
        // lowering operator |0⟩⟨1| in the σz = diag(1, -1) convention
        let lower = ops::sigma_plus().scale_real(gamma.sqrt());
        lindblad_superoperator(&ComplexMatrix::zeros(2, 2), &[lower])
    }

    #[test]
    fn zero_step_is_identity() {
        let l = amplitude_damping(0.3);
        let phi = propagator(&l, 0.0).unwrap();
        assert!(phi.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        assert!(propagator(&l, -1.0).is_err());
    }

    #[test]
    fn amplitude_damping_population_decay() {
        let gamma = 0.7;
        let tau = 1.3;
        let phi = propagator(&amplitude_damping(gamma), tau).unwrap();
        let excited = PureState::basis(2, 1).projector();
        let out = devectorize(&phi.matvec(&vectorize(&excited)), 2).unwrap();
        assert!((out[(1, 1)].re - (-gamma * tau).exp()).abs() < 1e-12);
        let st = stationary_state(&amplitude_damping(gamma), 2).unwrap();
        assert!(st.matrix().max_abs_diff(&PureState::basis(2, 0).projector()) < 1e-10);
    }

    #[test]
    fn depolarizing_fixed_point_is_maximally_mixed() {
        let ops = [ops::sigma_x(), ops::sigma_y(), ops::sigma_z()];
        let l = lindblad_superoperator(&ComplexMatrix::zeros(2, 2), &ops);
        let st = stationary_state(&l, 2).unwrap();
        assert!(st.matrix().max_abs_diff(&DensityMatrix::maximally_mixed(2).into_matrix()) < 1e-12);
    }

    #[test]
    fn unitary_generator_is_degenerate() {
        let l = lindblad_superoperator(&ops::sigma_z(), &[]);
        assert!(matches!(
            stationary_state(&l, 2),
            Err(Error::DegenerateStationaryState { count: 2, .. })
        ));
    }

    #[test]
    fn finite_env_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_gksl(2, 3, 1.0, 0.1, RateNormalization::BasisSquared, &mut rng).unwrap();
        let psi = PureState::basis(2, 0);
        let traj = simulate_finite_env(&g, &psi, 30, 0.2).unwrap();
        assert_eq!(traj.len(), 30);
        assert!(traj[0].matrix().max_abs_diff(&psi.projector()) < 1e-12);
    }
}
