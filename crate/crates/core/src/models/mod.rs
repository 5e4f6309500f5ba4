// SPDX-License-Identifier: Apache-2.0

//! Ground-truth simulators: random finite environments, Jaynes–Cummings
//! and a pseudomode spin-boson model.

mod dataset;
mod dynamics;
mod gksl;
mod jc;
mod spin_boson;

pub use dataset::{
    add_noise, generate_dataset, noise_rng, noisy_trajectory, prepare_model, simulate, FiniteEnvConfig, ModelConfig,
    ModelMetadata, TrajectoryDataset,
};
pub use dynamics::{
    prepare_finite_env, propagator, simulate_finite_env, stationary_state, PreparedModel,
    NULL_TOL, STATE_TOL,
};
pub use gksl::{
    gell_mann_basis, gksl_superoperator, lindblad_superoperator, random_gksl, GkslGenerator,
    RateNormalization,
};
pub use jc::{
    coherent_state, jc_hamiltonian, jc_superoperator, prepare_jc, simulate_jc, truncation_level,
    JcConfig, TRUNCATION_MASS,
};
pub use spin_boson::{
    bath_correlation_zero, prepare_spin_boson, pseudomode_correlation, pseudomode_coupling,
    pseudomode_frequency, simulate_spin_boson, spectral_density, spin_boson_hamiltonian,
    spin_boson_pseudomode, SpinBosonConfig,
};
