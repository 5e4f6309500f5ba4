// SPDX-License-Identifier: Apache-2.0

//! Hankel construction, optimal-rank truncation, fitting of the Markovian
//! embedding and prediction.

mod denoise;
mod fit;
mod hankel;
mod threshold;

pub use denoise::{denoise, denoise_dataset};
pub use fit::{
    fit, fit_hankel, fit_with, spectrum_order, DmdVariant, EmbeddingModel, MAX_EIGVEC_CONDITION,
    MODULUS_TIE_TOL,
};
pub use hankel::{build_hankel, build_shifted_and_stack, HankelSet};
pub use threshold::{aspect_factor, noise_threshold, optimal_rank, ThresholdConfig};

/// Smallest environment dimension compatible with rank `r`: `⌈√(r/d²)⌉`.
pub fn effective_env_dim(r: usize, d: usize) -> usize {
    let d2 = d * d;
    let mut e = ((r as f64 / d2 as f64).sqrt().ceil() as usize).max(1);
    // guard the float estimate against rounding either way
    while e > 1 && (e - 1) * (e - 1) * d2 >= r {
        e -= 1;
    }
    while e * e * d2 < r {
        e += 1;
    }
    e
}

/// Rank of a Markovian model of the full system ⊗ environment: `d²·d_E²`.
pub fn natural_rank(d: usize, d_env: usize) -> usize {
    d * d * d_env * d_env
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_dim_examples() {
        assert_eq!(effective_env_dim(36, 2), 3);
        assert_eq!(effective_env_dim(39, 2), 4);
        assert_eq!(effective_env_dim(4, 2), 1);
        assert_eq!(effective_env_dim(1, 2), 1);
        assert_eq!(effective_env_dim(17, 2), 3);
        assert_eq!(natural_rank(2, 2), 16);
        assert_eq!(natural_rank(2, 6), 144);
    }
}
