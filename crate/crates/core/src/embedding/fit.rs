// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::models::TrajectoryDataset;
use crate::qcore::{devectorize, linalg, project_to_density, vectorize, ComplexMatrix};
use crate::{Error, Result};

use super::hankel::{build_shifted_and_stack, HankelSet};
use super::threshold::{optimal_rank, ThresholdConfig};

/// Eigenvalues whose moduli differ by less than this are ordered by phase.
pub const MODULUS_TIE_TOL: f64 = 1e-9;

/// Largest accepted condition number of the eigenvector matrix.
pub const MAX_EIGVEC_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DmdVariant {
    /// Reduced `r × r` operator in the denoised column space.
    #[default]
    Projected,
    /// Full `M̄ = Y·X⁺`, then its leading eigenpairs. Much slower.
    Literal,
}

/// Fitted linear embedding `s(k+1) = Λ s(k)`, `s = E·R`, `R = D·s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingModel {
    pub rank: usize,
    pub depth: usize,
    pub system_dim: usize,
    /// Descending modulus, ties by descending phase.
    pub eigenvalues: Vec<C64>,
    /// `r × K d²`.
    pub encoder: ComplexMatrix,
    /// `K d² × r`.
    pub decoder: ComplexMatrix,
    /// Full singular spectrum of the stacked Hankel matrix.
    pub singular_values: Vec<f64>,
    pub threshold: ThresholdConfig,
    pub variant: DmdVariant,
}

/// Permutation ordering `values` by descending modulus, then by descending
/// phase within groups of (nearly) equal modulus.
pub fn spectrum_order(values: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].norm().total_cmp(&values[a].norm()));
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len()
            && values[idx[end - 1]].norm() - values[idx[end]].norm() < MODULUS_TIE_TOL
        {
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| values[b].arg().total_cmp(&values[a].arg()));
        start = end;
    }
    idx
}

/// Eigenvalues lying close to another eigenvalue, or all of them if none do.
fn near_degenerate(values: &[C64]) -> Vec<C64> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let cluster: Vec<C64> = values
        .iter()
        .enumerate()
        .filter(|(i, a)| {
            values
                .iter()
                .enumerate()
                .any(|(j, b)| *i != j && (*a - *b).norm() < 1e-6 * scale)
        })
        .map(|(_, z)| *z)
        .collect();
    if cluster.is_empty() {
        values.to_vec()
    } else {
        cluster
    }
}

fn permute_columns(m: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), order.len(), |i, j| m[(i, order[j])])
}

/// Fits an embedding of memory depth `K` to every trajectory of `ds`.
pub fn fit(ds: &TrajectoryDataset, depth: usize, cfg: &ThresholdConfig) -> Result<EmbeddingModel> {
    fit_with(ds, depth, cfg, DmdVariant::Projected)
}

pub fn fit_with(
    ds: &TrajectoryDataset,
    depth: usize,
    cfg: &ThresholdConfig,
    variant: DmdVariant,
) -> Result<EmbeddingModel> {
    cfg.validate()?;
    let hs = build_shifted_and_stack(&ds.trajectories, depth)?;
    fit_hankel(&hs, cfg, variant)
}

pub fn fit_hankel(hs: &HankelSet, cfg: &ThresholdConfig, variant: DmdVariant) -> Result<EmbeddingModel> {
    let dec = linalg::svd(&hs.h)?;
    let rank = optimal_rank(&dec.s, hs.h.rows(), hs.h.cols(), cfg)?;
    if rank == 0 {
        return Err(Error::NoSignal);
    }
    let u_r = dec.u.columns(0..rank);
    // coordinates of the denoised X and Y in the leading column space
    let bx = u_r.adjoint().matmul(&hs.x);
    let by = u_r.adjoint().matmul(&hs.y);
    let (values, decoder, encoder) = match variant {
        DmdVariant::Projected => projected(&u_r, &bx, &by)?,
        DmdVariant::Literal => literal(&u_r, &bx, &by, rank)?,
    };
    Ok(EmbeddingModel {
        rank: values.len(),
        depth: hs.depth,
        system_dim: hs.system_dim,
        eigenvalues: values,
        encoder,
        decoder,
        singular_values: dec.s,
        threshold: *cfg,
        variant,
    })
}

/// Rejects eigenvector matrices too ill-conditioned to invert reliably.
fn check_eigenvectors(values: &[C64], w: &ComplexMatrix) -> Result<()> {
    let condition = linalg::condition_number(w)?;
    if condition <= MAX_EIGVEC_CONDITION {
        Ok(())
    } else {
        Err(Error::DegenerateSpectrum { condition, cluster: near_degenerate(values) })
    }
}

type Triple = (Vec<C64>, ComplexMatrix, ComplexMatrix);

fn projected(u_r: &ComplexMatrix, bx: &ComplexMatrix, by: &ComplexMatrix) -> Result<Triple> {
    let sx = linalg::svd(bx)?;
    let cutoff = sx.s.first().copied().unwrap_or(0.0) * linalg::default_pinv_tol(bx);
    let rx = sx.s.iter().take_while(|&&s| s > cutoff).count();
    if rx == 0 {
        return Err(Error::NoSignal);
    }
    let ub = sx.u.columns(0..rx);
    let vb = sx.v.columns(0..rx);
    let inv_s = ComplexMatrix::from_real_diag(&sx.s[..rx].iter().map(|s| 1.0 / s).collect::<Vec<_>>());
    let a_tilde = ub.adjoint().matmul(by).matmul(&vb).matmul(&inv_s);
    let eig = linalg::eig(&a_tilde)?;
    let order = spectrum_order(&eig.values);
    let values: Vec<C64> = order.iter().map(|&i| eig.values[i]).collect();
    let w = permute_columns(&eig.vectors, &order);
    check_eigenvectors(&values, &w)?;
    let ux = u_r.matmul(&ub);
    let decoder = ux.matmul(&w);
    let encoder = linalg::inverse(&w)?.matmul(&ux.adjoint());
    Ok((values, decoder, encoder))
}

fn literal(u_r: &ComplexMatrix, bx: &ComplexMatrix, by: &ComplexMatrix, rank: usize) -> Result<Triple> {
    let x_den = u_r.matmul(bx);
    let y_den = u_r.matmul(by);
    let m_bar = y_den.matmul(&linalg::pinv(&x_den, None)?);
    let eig = linalg::eig(&m_bar)?;
    let order = spectrum_order(&eig.values);
    let top = &order[..rank.min(order.len())];
    let values: Vec<C64> = top.iter().map(|&i| eig.values[i]).collect();
    if values.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::DegenerateSpectrum { condition: f64::INFINITY, cluster: values });
    }
    let decoder = permute_columns(&eig.vectors, top);
    check_eigenvectors(&values, &decoder)?;
    let inv_lambda: Vec<C64> = values.iter().map(|z| z.inv()).collect();
    let encoder = ComplexMatrix::from_diag(&inv_lambda)
        .matmul(&linalg::pinv(&decoder, None)?)
        .matmul(&m_bar);
    Ok((values, decoder, encoder))
}

impl EmbeddingModel {
    /// Block height `K·d²`.
    pub fn block_len(&self) -> usize {
        self.depth * self.system_dim * self.system_dim
    }

    /// Extended state `R`: the history vectorized and stacked oldest first.
    pub fn extended_state(&self, history: &[ComplexMatrix]) -> Result<Vec<C64>> {
        if history.len() != self.depth {
            return Err(Error::DimensionMismatch(format!(
                "history has {} states, model depth is {}",
                history.len(),
                self.depth
            )));
        }
        let d = self.system_dim;
        let mut r = Vec::with_capacity(self.block_len());
        for rho in history {
            if rho.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!(
                    "history state is {}x{}, expected {d}x{d}",
                    rho.rows(),
                    rho.cols()
                )));
            }
            r.extend(vectorize(rho));
        }
        Ok(r)
    }

    /// Latent state `s = E·R`.
    pub fn encode(&self, history: &[ComplexMatrix]) -> Result<Vec<C64>> {
        Ok(self.encoder.matvec(&self.extended_state(history)?))
    }

    fn decode_last(&self, s: &[C64], n: usize, project: bool) -> Result<ComplexMatrix> {
        let d2 = self.system_dim * self.system_dim;
        let offset = self.block_len() - d2;
        let mut v = vec![C64::new(0.0, 0.0); d2];
        for (k, (lambda, sk)) in self.eigenvalues.iter().zip(s).enumerate() {
            let c = lambda.powu(n as u32) * sk;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += self.decoder[(offset + i, k)] * c;
            }
        }
        let rho = devectorize(&v, self.system_dim)?;
        if project {
            Ok(project_to_density(&rho)?.into_matrix())
        } else {
            Ok(rho)
        }
    }

    /// State `n ≥ 1` steps after the newest history entry.
    pub fn predict(&self, history: &[ComplexMatrix], n: usize, project: bool) -> Result<ComplexMatrix> {
        if n == 0 {
            return Err(Error::InvalidParameter("prediction horizon must be >= 1".into()));
        }
        let s = self.encode(history)?;
        self.decode_last(&s, n, project)
    }

    /// Predictions for horizons `1..=n_steps` from a single encoding.
    pub fn predict_trajectory(
        &self,
        history: &[ComplexMatrix],
        n_steps: usize,
        project: bool,
    ) -> Result<Vec<ComplexMatrix>> {
        let s = self.encode(history)?;
        (1..=n_steps).map(|n| self.decode_last(&s, n, project)).collect()
    }

    /// `E·D`, which is the identity for a consistent model.
    pub fn encoder_decoder_product(&self) -> ComplexMatrix {
        self.encoder.matmul(&self.decoder)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_by_modulus_then_phase() {
        let vals = vec![
            C64::new(0.5, 0.0),
            C64::from_polar(0.9, -0.3),
            C64::new(1.0, 0.0),
            C64::from_polar(0.9, 0.3),
            C64::new(-0.9, 0.0),
        ];
        let order = spectrum_order(&vals);
        assert_eq!(order, vec![2, 4, 3, 1, 0]);
    }

    #[test]
    fn ill_conditioned_eigenvectors_rejected() {
        let values = [C64::new(0.9, 0.0), C64::new(0.9 + 1e-13, 0.0), C64::new(0.1, 0.0)];
        let w = ComplexMatrix::from_vec(
            3,
            3,
            [1.0, 1.0, 0.0, 0.0, 1e-13, 0.0, 0.0, 0.0, 1.0].map(|x| C64::new(x, 0.0)).to_vec(),
        )
        .unwrap();
        match check_eigenvectors(&values, &w) {
            Err(Error::DegenerateSpectrum { condition, cluster }) => {
                assert!(condition > MAX_EIGVEC_CONDITION);
                assert_eq!(cluster, values[..2].to_vec());
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(check_eigenvectors(&values, &ComplexMatrix::identity(3)).is_ok());
    }

    #[test]
    fn ordering_never_panics_on_chains() {
        // moduli spaced just below the tie tolerance form one long chain
        let vals: Vec<C64> = (0..200)
            .map(|k| C64::from_polar(1.0 - k as f64 * 0.9e-9, (k as f64 * 1.7).sin()))
            .collect();
        let order = spectrum_order(&vals);
        let mut seen = order.clone();
        seen.sort();
        assert_eq!(seen, (0..200).collect::<Vec<_>>());
    }
}
