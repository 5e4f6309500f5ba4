// SPDX-License-Identifier: Apache-2.0

//! Experiment grids. Every cell is a pure function of its parameters and
//! seed; cells run concurrently and failures are recorded, never raised.

use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{
    denoise_dataset, effective_env_dim, fit, natural_rank, EmbeddingModel, ThresholdConfig,
};
use crate::models::{
    add_noise, generate_dataset, noise_rng, noisy_trajectory, prepare_model, FiniteEnvConfig,
    ModelConfig, SpinBosonConfig, TrajectoryDataset,
};
use crate::qcore::{linalg, ComplexMatrix, Trajectory};
use crate::Result;

use super::metrics::{dist_dataset, dist_test};
use super::spectra::match_spectra;

/// Optional measurements taken in a cell on top of the fitted rank.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellOptions {
    pub predict: bool,
    pub denoise: bool,
    pub spectrum: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub model: ModelConfig,
    pub count: usize,
    pub steps: usize,
    pub depth: usize,
    /// Standard deviation of the noise added to the data.
    pub noise_sigma: f64,
    /// Noise level assumed by the rank threshold.
    pub threshold_sigma: f64,
    pub seed: u64,
    pub options: CellOptions,
}

/// One row of a sweep. Fields that were not measured, or could not be
/// because the cell failed, are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub model: String,
    pub env_dim: usize,
    pub gamma: Option<f64>,
    pub sigma: f64,
    pub threshold_sigma: f64,
    pub steps: usize,
    pub depth: usize,
    pub count: usize,
    pub seed: u64,
    pub status: String,
    pub rank: Option<usize>,
    pub env_dim_eff: Option<usize>,
    pub natural_rank: Option<usize>,
    pub dist_test_clean: Option<f64>,
    pub dist_test_noisy: Option<f64>,
    pub dist_dataset_noisy: Option<f64>,
    pub dist_dataset_denoised: Option<f64>,
    pub denoise_rank: Option<usize>,
    pub spectrum_max: Option<f64>,
    pub spectrum_mean: Option<f64>,
    pub spectrum_unmatched: Option<usize>,
    pub runtime_s: f64,
}

impl SweepCell {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub name: String,
    pub cells: Vec<SweepCell>,
    pub runtime_s: f64,
}

impl SweepReport {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_ok()).count()
    }
}

/// Noisy copies of a clean dataset and test trajectory, drawn from the
/// noise stream of `seed`.
pub fn noisy_pair(
    clean: &TrajectoryDataset,
    test: &[ComplexMatrix],
    sigma: f64,
    seed: u64,
) -> Result<(TrajectoryDataset, Trajectory)> {
    let mut rng = noise_rng(seed);
    let noisy = add_noise(clean, sigma, &mut rng)?;
    let noisy_test = noisy_trajectory(test, sigma, &mut rng)?;
    Ok((noisy, noisy_test))
}

/// Predicts steps `K..T−1` from the first `K` states and returns the full
/// trajectory with the history in front.
pub fn predicted_trajectory(model: &EmbeddingModel, history_source: &[ComplexMatrix]) -> Result<Trajectory> {
    let depth = model.depth;
    let mut out = history_source[..depth].to_vec();
    out.extend(model.predict_trajectory(&out, history_source.len() - depth, false)?);
    Ok(out)
}

/// Eigenvalues of the exact one-step channel of a model.
pub fn reference_spectrum(model: &ModelConfig, seed: u64) -> Result<Vec<C64>> {
    linalg::eigenvalues(&prepare_model(model, seed)?.propagator)
}

fn empty_cell(spec: &CellSpec) -> SweepCell {
    let gamma = match spec.model {
        ModelConfig::FiniteEnv(_) => None,
        ModelConfig::JaynesCummings(c) => Some(c.gamma),
        ModelConfig::SpinBoson(c) => Some(c.gamma),
    };
    SweepCell {
        model: spec.model.name().to_string(),
        env_dim: spec.model.env_dim(),
        gamma,
        sigma: spec.noise_sigma,
        threshold_sigma: spec.threshold_sigma,
        steps: spec.steps,
        depth: spec.depth,
        count: spec.count,
        seed: spec.seed,
        status: "ok".into(),
        rank: None,
        env_dim_eff: None,
        natural_rank: match spec.model {
            ModelConfig::FiniteEnv(c) => Some(natural_rank(c.d, c.d_env)),
            _ => None,
        },
        dist_test_clean: None,
        dist_test_noisy: None,
        dist_dataset_noisy: None,
        dist_dataset_denoised: None,
        denoise_rank: None,
        spectrum_max: None,
        spectrum_mean: None,
        spectrum_unmatched: None,
        runtime_s: 0.0,
    }
}

fn fill_cell(spec: &CellSpec, cell: &mut SweepCell) -> Result<()> {
    let (clean, test) = generate_dataset(&spec.model, spec.count, spec.steps, spec.seed)?;
    let (noisy, noisy_test) = noisy_pair(&clean, &test, spec.noise_sigma, spec.seed)?;
    let cfg = ThresholdConfig::with_sigma(spec.threshold_sigma);
    if spec.options.denoise {
        cell.dist_dataset_noisy = Some(dist_dataset(&noisy, &clean)?);
        let (denoised, eta) = denoise_dataset(&noisy, spec.depth, &cfg, false)?;
        cell.denoise_rank = Some(eta);
        cell.dist_dataset_denoised = Some(dist_dataset(&denoised, &clean)?);
    }
    let model = fit(&noisy, spec.depth, &cfg)?;
    cell.rank = Some(model.rank);
    cell.env_dim_eff = Some(effective_env_dim(model.rank, model.system_dim));
    if spec.options.predict {
        let pred = predicted_trajectory(&model, &noisy_test)?;
        cell.dist_test_clean = Some(dist_test(&pred, &test, spec.depth)?);
        cell.dist_test_noisy = Some(dist_test(&pred, &noisy_test, spec.depth)?);
    }
    if spec.options.spectrum {
        let reference = reference_spectrum(&spec.model, spec.seed)?;
        let m = match_spectra(&model.eigenvalues, &reference);
        cell.spectrum_max = Some(m.max_distance);
        cell.spectrum_mean = Some(m.mean_distance);
        cell.spectrum_unmatched = Some(m.unmatched_reference.len());
    }
    Ok(())
}

/// Runs a single cell; errors end up in `status`.
pub fn run_cell(spec: &CellSpec) -> SweepCell {
    let start = Instant::now();
    let mut cell = empty_cell(spec);
    if let Err(e) = fill_cell(spec, &mut cell) {
        cell.status = format!("error: {e}");
    }
    cell.runtime_s = start.elapsed().as_secs_f64();
    cell
}

/// Runs every cell concurrently, keeping the input order.
pub fn run_grid(name: &str, specs: &[CellSpec]) -> SweepReport {
    let start = Instant::now();
    let cells = specs.par_iter().map(run_cell).collect();
    SweepReport { name: name.to_string(), cells, runtime_s: start.elapsed().as_secs_f64() }
}

/// Shared settings of finite-environment sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteEnvFixed {
    pub count: usize,
    pub tau: f64,
    pub depth: usize,
    pub base: FiniteEnvConfig,
}

impl Default for FiniteEnvFixed {
    fn default() -> Self {
        Self { count: 4, tau: 0.2, depth: 75, base: FiniteEnvConfig::default() }
    }
}

impl FiniteEnvFixed {
    fn model(&self, d_env: usize) -> ModelConfig {
        ModelConfig::FiniteEnv(FiniteEnvConfig { d_env, tau: self.tau, ..self.base })
    }
}

/// Rank and effective environment dimension over `d_E × σ × T × seeds`.
pub fn sweep_finite_env(
    d_envs: &[usize],
    sigmas: &[f64],
    steps: &[usize],
    fixed: &FiniteEnvFixed,
    seeds: &[u64],
    options: CellOptions,
) -> SweepReport {
    let mut specs = Vec::new();
    for &d_env in d_envs {
        for &sigma in sigmas {
            for &t in steps {
                for &seed in seeds {
                    specs.push(CellSpec {
                        model: fixed.model(d_env),
                        count: fixed.count,
                        steps: t,
                        depth: fixed.depth,
                        noise_sigma: sigma,
                        threshold_sigma: sigma,
                        seed,
                        options,
                    });
                }
            }
        }
    }
    run_grid("finite-env", &specs)
}

/// Prediction error against memory depth for one model over `σ × K × seeds`.
pub fn sweep_memory_depth(
    model: &ModelConfig,
    count: usize,
    steps: usize,
    sigmas: &[f64],
    depths: &[usize],
    seeds: &[u64],
) -> SweepReport {
    let mut specs = Vec::new();
    for &sigma in sigmas {
        for &depth in depths {
            for &seed in seeds {
                specs.push(CellSpec {
                    model: *model,
                    count,
                    steps,
                    depth,
                    noise_sigma: sigma,
                    threshold_sigma: sigma,
                    seed,
                    options: CellOptions { predict: true, ..CellOptions::default() },
                });
            }
        }
    }
    run_grid("memory-depth", &specs)
}

/// Shared settings of the spin-boson sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinBosonFixed {
    pub count: usize,
    pub steps: usize,
    pub threshold_sigma: f64,
    pub base: SpinBosonConfig,
}

impl Default for SpinBosonFixed {
    fn default() -> Self {
        Self { count: 4, steps: 1000, threshold_sigma: 1e-6, base: SpinBosonConfig::default() }
    }
}

/// Rank and prediction error over `γ × K` on noiseless pseudomode data.
pub fn sweep_spin_boson_gamma(
    gammas: &[f64],
    depths: &[usize],
    fixed: &SpinBosonFixed,
    seeds: &[u64],
) -> SweepReport {
    let mut specs = Vec::new();
    for &gamma in gammas {
        for &depth in depths {
            for &seed in seeds {
                specs.push(CellSpec {
                    model: ModelConfig::SpinBoson(SpinBosonConfig { gamma, ..fixed.base }),
                    count: fixed.count,
                    steps: fixed.steps,
                    depth,
                    noise_sigma: 0.0,
                    threshold_sigma: fixed.threshold_sigma,
                    seed,
                    options: CellOptions { predict: true, ..CellOptions::default() },
                });
            }
        }
    }
    run_grid("spin-boson-gamma", &specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_cell_is_recorded() {
        let spec = CellSpec {
            model: ModelConfig::FiniteEnv(FiniteEnvConfig::default()),
            count: 1,
            steps: 10,
            depth: 20,
            noise_sigma: 0.0,
            threshold_sigma: 0.0,
            seed: 1,
            options: CellOptions::default(),
        };
        let report = run_grid("t", &[spec, CellSpec { depth: 3, ..spec }]);
        assert!(report.cells[0].status.starts_with("error"));
        assert!(report.cells[1].is_ok());
        assert_eq!(report.failed(), 1);
        assert!(report.cells[1].rank.unwrap() <= 16);
    }
}
