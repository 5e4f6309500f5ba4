// SPDX-License-Identifier: Apache-2.0

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("decomposition failed to converge: {0}")]
    Decomposition(String),

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("stationary state is not unique: {count} eigenvalues of the generator lie within {tol:e} of zero")]
    DegenerateStationaryState { count: usize, tol: f64 },

    #[error("no signal above noise threshold (rank 0)")]
    NoSignal,

    #[error("degenerate spectrum: eigenvector matrix condition number {condition:e} exceeds limit; cluster {cluster:?}")]
    DegenerateSpectrum { condition: f64, cluster: Vec<C64> },

    #[error("empty dataset")]
    EmptyDataset,
}
