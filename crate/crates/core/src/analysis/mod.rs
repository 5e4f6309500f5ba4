// SPDX-License-Identifier: Apache-2.0

//! Trajectory distances, spectrum matching and experiment sweeps.

mod metrics;
mod spectra;
mod sweeps;

pub use metrics::{dist_dataset, dist_test, dist_trajectories};
pub use spectra::{assignment, match_spectra, MatchedPair, SpectrumMatch};
pub use sweeps::{
    noisy_pair, predicted_trajectory, reference_spectrum, run_cell, run_grid, sweep_finite_env,
    sweep_memory_depth, sweep_spin_boson_gamma, CellOptions, CellSpec, FiniteEnvFixed,
    SpinBosonFixed, SweepCell, SweepReport,
};
