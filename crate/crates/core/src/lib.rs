// SPDX-License-Identifier: Apache-2.0

//! Data-driven reconstruction of minimal Markovian embeddings for
//! non-Markovian open quantum dynamics.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex linear algebra and quantum primitives
//!   (vectorization, partial trace, trace distance, projection onto states).
//! - [`models`]: ground-truth simulators (random GKSL generator with a finite
//!   environment, damped Jaynes-Cummings, spin-boson via a single pseudomode)
//!   and measurement-noise injection.
//! - [`embedding`]: block-Hankel construction, optimal hard thresholding,
//!   denoising, DMD fit of `(Λ_r, E, D)` and prediction.
//! - [`analysis`]: distance metrics, spectrum matching and experiment sweeps.
//!
//! Vectorization is row-major everywhere: `|i⟩⟨j| ↦ |i⟩⊗|j⟩`, i.e. entry
//! `(i, j)` of a `d×d` matrix lands at index `i·d + j`.

pub mod analysis;
pub mod embedding;
mod error;
pub mod models;
pub mod qcore;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
