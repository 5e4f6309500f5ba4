// SPDX-License-Identifier: Apache-2.0

//! Datasets of reduced-state trajectories and measurement noise.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qcore::{check_density, sample_pure_state, ComplexMatrix, Trajectory};
use crate::{Error, Result};

use super::dynamics::{prepare_finite_env, PreparedModel, STATE_TOL};
use super::gksl::{random_gksl, RateNormalization};
use super::jc::{prepare_jc, JcConfig};
use super::spin_boson::{prepare_spin_boson, SpinBosonConfig};

/// Random GKSL dynamics on a `d·d_E` dimensional joint space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteEnvConfig {
    pub d: usize,
    pub d_env: usize,
    pub a_unit: f64,
    pub a_diss: f64,
    pub tau: f64,
    #[serde(default)]
    pub rate_normalization: RateNormalization,
}

impl Default for FiniteEnvConfig {
    fn default() -> Self {
        Self {
            d: 2,
            d_env: 2,
            a_unit: 1.0,
            a_diss: 0.1,
            tau: 0.2,
            rate_normalization: RateNormalization::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    FiniteEnv(FiniteEnvConfig),
    JaynesCummings(JcConfig),
    SpinBoson(SpinBosonConfig),
}

impl ModelConfig {
    pub fn system_dim(&self) -> usize {
        match self {
            Self::FiniteEnv(c) => c.d,
            Self::JaynesCummings(_) | Self::SpinBoson(_) => 2,
        }
    }

    pub fn tau(&self) -> f64 {
        match self {
            Self::FiniteEnv(c) => c.tau,
            Self::JaynesCummings(c) => c.tau,
            Self::SpinBoson(c) => c.tau,
        }
    }

    /// Dimension of the simulated environment (Fock levels for bosonic models).
    pub fn env_dim(&self) -> usize {
        match self {
            Self::FiniteEnv(c) => c.d_env,
            Self::JaynesCummings(c) => c.resolved_levels(),
            Self::SpinBoson(c) => c.n_levels,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FiniteEnv(_) => "finite-env",
            Self::JaynesCummings(_) => "jc",
            Self::SpinBoson(_) => "spin-boson",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub model: ModelConfig,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDataset {
    pub system_dim: usize,
    pub tau: f64,
    pub trajectories: Vec<Trajectory>,
    pub noise_sigma: f64,
    pub metadata: Option<ModelMetadata>,
}

impl TrajectoryDataset {
    /// Number of trajectories `L`.
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Steps per trajectory `T` (of the first trajectory).
    pub fn steps(&self) -> usize {
        self.trajectories.first().map_or(0, Vec::len)
    }

    /// Shape checks for every entry, plus density-matrix checks when clean.
    pub fn validate(&self) -> Result<()> {
        if self.trajectories.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let d = self.system_dim;
        let steps = self.steps();
        for (l, traj) in self.trajectories.iter().enumerate() {
            if traj.len() != steps {
                return Err(Error::DimensionMismatch(format!(
                    "trajectory {l} has {} steps, expected {steps}",
                    traj.len()
                )));
            }
            for (t, rho) in traj.iter().enumerate() {
                if rho.shape() != (d, d) {
                    return Err(Error::DimensionMismatch(format!(
                        "state ({l}, {t}) is {}x{}, expected {d}x{d}",
                        rho.rows(),
                        rho.cols()
                    )));
                }
                if self.noise_sigma == 0.0 {
                    check_density(rho, STATE_TOL)?;
                }
            }
        }
        Ok(())
    }
}

/// Adds i.i.d. `N(0, σ²)` noise to the real and imaginary part of every entry.
pub fn add_noise(ds: &TrajectoryDataset, sigma: f64, rng: &mut impl Rng) -> Result<TrajectoryDataset> {
    let mut out = ds.clone();
    out.trajectories = ds
        .trajectories
        .iter()
        .map(|t| noisy_trajectory(t, sigma, rng))
        .collect::<Result<_>>()?;
    out.noise_sigma = sigma;
    Ok(out)
}

/// Single-trajectory form of [`add_noise`].
pub fn noisy_trajectory(traj: &[ComplexMatrix], sigma: f64, rng: &mut impl Rng) -> Result<Trajectory> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let mut out = traj.to_vec();
    if sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    for rho in out.iter_mut() {
        for z in rho.as_mut_slice() {
            *z += C64::new(normal.sample(rng), normal.sample(rng));
        }
    }
    Ok(out)
}

/// Generator reserved for measurement noise of the dataset drawn with `seed`;
/// it never overlaps the streams used by [`generate_dataset`].
pub fn noise_rng(seed: u64) -> ChaCha20Rng {
    stream(seed, u64::MAX)
}

fn stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Builds the propagator shared by every trajectory of the model. Random
/// generators draw from stream 0 of `seed`.
pub fn prepare_model(model: &ModelConfig, seed: u64) -> Result<PreparedModel> {
    match model {
        ModelConfig::FiniteEnv(c) => {
            let mut rng = stream(seed, 0);
            let generator =
                random_gksl(c.d, c.d_env, c.a_unit, c.a_diss, c.rate_normalization, &mut rng)?;
            prepare_finite_env(&generator, c.tau)
        }
        ModelConfig::JaynesCummings(c) => prepare_jc(c),
        ModelConfig::SpinBoson(c) => prepare_spin_boson(c),
    }
}

/// Simulates `L + 1` trajectories of `T` steps from Haar-random initial
/// states and returns the first `L` as a dataset and the last as the test
/// trajectory. Trajectory `k` draws its initial state from stream `k + 1`.
pub fn generate_dataset(
    model: &ModelConfig,
    count: usize,
    steps: usize,
    seed: u64,
) -> Result<(TrajectoryDataset, Trajectory)> {
    if count == 0 || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need L >= 1 and T >= 2, got L = {count}, T = {steps}"
        )));
    }
    let prepared = prepare_model(model, seed)?;
    let mut trajectories = (0..=count as u64)
        .into_par_iter()
        .map(|k| {
            let psi = sample_pure_state(model.system_dim(), &mut stream(seed, k + 1))?;
            let states = prepared.trajectory(&psi, steps)?;
            Ok(states.into_iter().map(|s| s.into_matrix()).collect::<Trajectory>())
        })
        .collect::<Result<Vec<_>>>()?;
    let test = trajectories.pop().expect("count + 1 trajectories");
    let ds = TrajectoryDataset {
        system_dim: model.system_dim(),
        tau: model.tau(),
        trajectories,
        noise_sigma: 0.0,
        metadata: Some(ModelMetadata { model: *model, seed }),
    };
    Ok((ds, test))
}

/// Convenience: a trajectory of `steps` states from an explicit initial state.
pub fn simulate(
    model: &ModelConfig,
    seed: u64,
    psi: &crate::qcore::PureState,
    steps: usize,
) -> Result<Vec<ComplexMatrix>> {
    Ok(prepare_model(model, seed)?
        .trajectory(psi, steps)?
        .into_iter()
        .map(|s| s.into_matrix())
        .collect())
}
