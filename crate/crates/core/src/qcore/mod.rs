// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra and quantum-state primitives.

pub mod linalg;
mod matrix;
mod quantum;

pub use linalg::{expm as matrix_exponential, pinv};
pub use matrix::ComplexMatrix;
pub use quantum::{
    check_density, devectorize, ops, partial_trace_env, partial_trace_system, project_to_density,
    sample_pure_state, trace_distance, vectorize, DensityMatrix, PureState, HERMITIAN_TOL, PSD_TOL,
    TRACE_TOL,
};

/// A sequence of system states `ϱ(0), …, ϱ(T−1)`. Entries are plain
/// matrices because noisy data need not be physical.
pub type Trajectory = Vec<ComplexMatrix>;
