// SPDX-License-Identifier: Apache-2.0

//! Random GKSL generators on a joint system ⊗ environment space and their
//! vectorized (superoperator) form.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qcore::{linalg, ComplexMatrix};
use crate::{Error, Result};

/// Normalization of the random rate matrix `γ = A·A† / c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateNormalization {
    /// `c = N`, with `N = d²d_E² − 1` the number of basis operators.
    Basis,
    /// `c = N²`. Dissipation stays weak enough that memory survives the
    /// observation window for every environment size up to `d_E = 6`.
    #[default]
    BasisSquared,
}

impl RateNormalization {
    fn divisor(self, n: usize) -> f64 {
        match self {
            Self::Basis => n as f64,
            Self::BasisSquared => (n * n) as f64,
        }
    }
}

/// Parameters of `L[ϱ] = −i a_unit [H, ϱ] + a_diss Σ_ij γ_ij (F_i ϱ F_j† − ½{F_j†F_i, ϱ})`.
#[derive(Clone, Debug)]
pub struct GkslGenerator {
    pub system_dim: usize,
    pub env_dim: usize,
    pub hamiltonian: ComplexMatrix,
    pub rates: ComplexMatrix,
    pub basis: Vec<ComplexMatrix>,
    pub a_unit: f64,
    pub a_diss: f64,
}

impl GkslGenerator {
    pub fn joint_dim(&self) -> usize {
        self.system_dim * self.env_dim
    }

    /// Checks the structural invariants at tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.joint_dim();
        let count = n * n - 1;
        if self.hamiltonian.shape() != (n, n) || self.rates.shape() != (count, count) {
            return Err(Error::DimensionMismatch("generator component shapes".into()));
        }
        if self.basis.len() != count {
            return Err(Error::DimensionMismatch(format!(
                "{} basis operators, expected {count}",
                self.basis.len()
            )));
        }
        if self.hamiltonian.max_abs_diff(&self.hamiltonian.adjoint()) > tol {
            return Err(Error::InvalidParameter("Hamiltonian is not Hermitian".into()));
        }
        let min_rate = linalg::hermitian_eigenvalues(&self.rates.hermitian_part())?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_rate < -tol || self.rates.max_abs_diff(&self.rates.adjoint()) > tol {
            return Err(Error::InvalidParameter("rate matrix is not PSD".into()));
        }
        for (i, fi) in self.basis.iter().enumerate() {
            if fi.trace().norm() > tol {
                return Err(Error::InvalidParameter(format!("basis operator {i} has a trace")));
            }
            for (j, fj) in self.basis.iter().enumerate().skip(i) {
                let overlap = hs_inner(fi, fj);
                let want = if i == j { 1.0 } else { 0.0 };
                if (overlap - C64::new(want, 0.0)).norm() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "basis operators {i},{j} not orthonormal"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum()
}

/// Generalized Gell-Mann matrices of dimension `n`, normalized so that
/// `Tr(F_i† F_j) = δ_ij`: `n(n−1)/2` symmetric, `n(n−1)/2` antisymmetric,
/// `n−1` diagonal.
pub fn gell_mann_basis(n: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = ComplexMatrix::zeros(n, n);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            out.push(sym);
            let mut anti = ComplexMatrix::zeros(n, n);
            anti[(j, k)] = C64::new(0.0, -s);
            anti[(k, j)] = C64::new(0.0, s);
            out.push(anti);
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut diag = ComplexMatrix::zeros(n, n);
        for i in 0..l {
            diag[(i, i)] = C64::new(1.0 / norm, 0.0);
        }
        diag[(l, l)] = C64::new(-(l as f64) / norm, 0.0);
        out.push(diag);
    }
    out
}

fn complex_gaussian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Draws a random generator: `H = (A + A†)/2` and `γ = B·B† / c` from
/// independent complex Gaussian matrices, Gell-Mann basis for `F`.
pub fn random_gksl(
    d: usize,
    d_env: usize,
    a_unit: f64,
    a_diss: f64,
    normalization: RateNormalization,
    rng: &mut impl Rng,
) -> Result<GkslGenerator> {
    if d < 2 || d_env < 2 {
        return Err(Error::InvalidParameter(format!(
            "random_gksl needs d, d_E >= 2 (got {d}, {d_env})"
        )));
    }
    let n = d * d_env;
    let count = n * n - 1;
    let a = complex_gaussian(n, rng);
    let hamiltonian = a.hermitian_part();
    let b = complex_gaussian(count, rng);
    let rates = b
        .matmul(&b.adjoint())
        .scale_real(1.0 / normalization.divisor(count))
        .hermitian_part();
    Ok(GkslGenerator {
        system_dim: d,
        env_dim: d_env,
        hamiltonian,
        rates,
        basis: gell_mann_basis(n),
        a_unit,
        a_diss,
    })
}

/// Vectorized generator `L_vec` with `L_vec · vec(ϱ) = vec(L[ϱ])`.
///
/// Row-major vectorization gives `vec(A ϱ B) = (A ⊗ Bᵀ) vec(ϱ)`.
pub fn gksl_superoperator(generator: &GkslGenerator) -> ComplexMatrix {
    let n = generator.joint_dim();
    let ident = ComplexMatrix::identity(n);
    let h = &generator.hamiltonian;
    let mut l = (&h.kron(&ident) - &ident.kron(&h.transpose()))
        .scale(C64::new(0.0, -generator.a_unit));
    if generator.a_diss == 0.0 {
        return l;
    }

    // Σ_ij γ_ij F_i ⊗ conj(F_j) = Σ_i F_i ⊗ G_i,  G_i = Σ_j γ_ij conj(F_j)
    // Σ_ij γ_ij F_j† F_i       = Σ_j F_j† K_j,   K_j = Σ_i γ_ij F_i
    let basis = &generator.basis;
    let rates = &generator.rates;
    let mut anti = ComplexMatrix::zeros(n, n);
    let mut jump = ComplexMatrix::zeros(n * n, n * n);
    for (i, fi) in basis.iter().enumerate() {
        let mut g = ComplexMatrix::zeros(n, n);
        let mut k = ComplexMatrix::zeros(n, n);
        for (j, fj) in basis.iter().enumerate() {
            g.add_scaled(rates[(i, j)], &fj.conj());
            k.add_scaled(rates[(j, i)], fj);
        }
        jump += &fi.kron(&g);
        anti += &fi.adjoint().matmul(&k);
    }
    let mut dissipator = jump;
    dissipator.add_scaled(C64::new(-0.5, 0.0), &anti.kron(&ident));
    dissipator.add_scaled(C64::new(-0.5, 0.0), &ident.kron(&anti.transpose()));
    l.add_scaled(C64::new(generator.a_diss, 0.0), &dissipator);
    l
}

/// Vectorized Lindbladian `−i[H, ϱ] + Σ_k (c_k ϱ c_k† − ½{c_k†c_k, ϱ})`.
pub fn lindblad_superoperator(hamiltonian: &ComplexMatrix, collapse: &[ComplexMatrix]) -> ComplexMatrix {
    let n = hamiltonian.rows();
    let ident = ComplexMatrix::identity(n);
    let mut l = (&hamiltonian.kron(&ident) - &ident.kron(&hamiltonian.transpose()))
        .scale(C64::new(0.0, -1.0));
    for c in collapse {
        let cdc = c.adjoint().matmul(c);
        l += &c.kron(&c.conj());
        l.add_scaled(C64::new(-0.5, 0.0), &cdc.kron(&ident));
        l.add_scaled(C64::new(-0.5, 0.0), &ident.kron(&cdc.transpose()));
    }
    l
}
