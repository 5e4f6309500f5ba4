// SPDX-License-Identifier: Apache-2.0

//! Thin wrappers over faer's dense decompositions, plus the matrix
//! exponential and Moore-Penrose inverse.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Side;
use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::{Error, Result};

/// Thin SVD `m = u · diag(s) · v†`, singular values non-increasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Rank-`k` truncation `u[:, :k] · diag(s[:k]) · v[:, :k]†`.
    pub fn reconstruct(&self, k: usize) -> ComplexMatrix {
        let k = k.min(self.s.len());
        let (m, n) = (self.u.rows(), self.v.rows());
        if k == 0 {
            return ComplexMatrix::zeros(m, n);
        }
        let us = ComplexMatrix::from_fn(m, k, |i, j| self.u[(i, j)] * self.s[j]);
        us.matmul(&self.v.columns(0..k).adjoint())
    }
}

/// Eigen-decomposition of a general square matrix; `vectors` holds right
/// eigenvectors as unit-norm columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(m.rows(), 0),
            s: Vec::new(),
            v: ComplexMatrix::zeros(m.cols(), 0),
        });
    }
    let f = m.to_faer();
    let dec = f
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("svd: {e:?}")))?;
    let s = dec.S().column_vector().iter().map(|z| z.re).collect();
    Ok(Svd {
        u: ComplexMatrix::from_faer(dec.U()),
        s,
        v: ComplexMatrix::from_faer(dec.V()),
    })
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Vec::new());
    }
    m.to_faer()
        .singular_values()
        .map_err(|e| Error::Decomposition(format!("singular values: {e:?}")))
}

pub fn eig(m: &ComplexMatrix) -> Result<Eigen> {
    check_square(m, "eig")?;
    let dec = m
        .to_faer()
        .eigen()
        .map_err(|e| Error::Decomposition(format!("eig: {e:?}")))?;
    let values = dec.S().column_vector().iter().copied().collect();
    let mut vectors = ComplexMatrix::from_faer(dec.U());
    normalize_columns(&mut vectors);
    Ok(Eigen { values, vectors })
}

pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    check_square(m, "eigenvalues")?;
    m.to_faer()
        .eigenvalues()
        .map_err(|e| Error::Decomposition(format!("eigenvalues: {e:?}")))
}

/// Eigen-decomposition of a Hermitian matrix (only the lower triangle is
/// read); eigenvalues ascending, eigenvectors as columns.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square(m, "hermitian_eig")?;
    let dec = m
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("hermitian eig: {e:?}")))?;
    let values = dec.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, ComplexMatrix::from_faer(dec.U())))
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_square(m, "hermitian_eigenvalues")?;
    m.to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("hermitian eigenvalues: {e:?}")))
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(m, "inverse")?;
    let inv = m.to_faer().partial_piv_lu().inverse();
    let out = ComplexMatrix::from_faer(inv.as_ref());
    if !out.is_finite() {
        return Err(Error::InvalidParameter("matrix is singular".into()));
    }
    Ok(out)
}

/// Solves `a · x = b` with partial-pivoting LU.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(a, "solve")?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: {}x{} system with {} right-hand rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let x = a.to_faer().partial_piv_lu().solve(b.to_faer());
    let out = ComplexMatrix::from_faer(x.as_ref());
    if !out.is_finite() {
        return Err(Error::InvalidParameter("system is singular".into()));
    }
    Ok(out)
}

/// 2-norm condition number `s_max / s_min`; infinite when singular.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let s = singular_values(m)?;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Default relative cutoff for [`pinv`]: `max(rows, cols) · ε`.
pub fn default_pinv_tol(m: &ComplexMatrix) -> f64 {
    m.rows().max(m.cols()) as f64 * f64::EPSILON
}

/// Moore-Penrose pseudo-inverse. Singular values below `tol · s_max` are
/// treated as zero; `None` selects [`default_pinv_tol`].
pub fn pinv(m: &ComplexMatrix, tol: Option<f64>) -> Result<ComplexMatrix> {
    let tol = tol.unwrap_or_else(|| default_pinv_tol(m));
    if tol < 0.0 {
        return Err(Error::InvalidParameter(format!("pinv tolerance {tol} < 0")));
    }
    let dec = svd(m)?;
    let cutoff = dec.s.first().copied().unwrap_or(0.0) * tol;
    let keep = dec.s.iter().take_while(|&&s| s > cutoff && s > 0.0).count();
    if keep == 0 {
        return Ok(ComplexMatrix::zeros(m.cols(), m.rows()));
    }
    // pinv = V_k · S_k⁻¹ · U_k†
    let vs = ComplexMatrix::from_fn(m.cols(), keep, |i, j| dec.v[(i, j)] / dec.s[j]);
    Ok(vs.matmul(&dec.u.columns(0..keep).adjoint()))
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// 1-norm bounds below which each Padé degree meets unit roundoff.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with Padé approximants
/// (degrees 3–13 selected from the 1-norm).
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(m, "expm")?;
    let n = m.rows();
    if m.as_slice().iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(ComplexMatrix::identity(n));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter("expm of non-finite matrix".into()));
    }
    let norm = m.norm_one();
    let ident = ComplexMatrix::identity(n);

    for &(degree, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(m, coeffs, &ident);
            return pade_solve(&u, &v);
        }
    }

    let squarings = (norm / THETA13).log2().ceil().max(0.0) as i32;
    let a = m.scale_real(0.5f64.powi(squarings));
    let b = &PADE13;
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let mut inner_u = a6.scale_real(b[13]);
    inner_u.add_scaled(C64::from(b[11]), &a4);
    inner_u.add_scaled(C64::from(b[9]), &a2);
    let mut u = a6.matmul(&inner_u);
    u.add_scaled(C64::from(b[7]), &a6);
    u.add_scaled(C64::from(b[5]), &a4);
    u.add_scaled(C64::from(b[3]), &a2);
    u.add_scaled(C64::from(b[1]), &ident);
    let u = a.matmul(&u);

    let mut inner_v = a6.scale_real(b[12]);
    inner_v.add_scaled(C64::from(b[10]), &a4);
    inner_v.add_scaled(C64::from(b[8]), &a2);
    let mut v = a6.matmul(&inner_v);
    v.add_scaled(C64::from(b[6]), &a6);
    v.add_scaled(C64::from(b[4]), &a4);
    v.add_scaled(C64::from(b[2]), &a2);
    v.add_scaled(C64::from(b[0]), &ident);

    let mut r = pade_solve(&u, &v)?;
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}

fn pade_low(a: &ComplexMatrix, b: &[f64], ident: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let a2 = a.matmul(a);
    let mut power = ident.clone();
    let mut u = ComplexMatrix::zeros(a.rows(), a.cols());
    let mut v = ComplexMatrix::zeros(a.rows(), a.cols());
    for k in 0..b.len() / 2 {
        v.add_scaled(C64::from(b[2 * k]), &power);
        u.add_scaled(C64::from(b[2 * k + 1]), &power);
        power = power.matmul(&a2);
    }
    (a.matmul(&u), v)
}

// r = (v - u)⁻¹ (v + u)
fn pade_solve(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(&(v - u), &(v + u))
}

fn check_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{what} needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn normalize_columns(m: &mut ComplexMatrix) {
    for j in 0..m.cols() {
        let norm = (0..m.rows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..m.rows() {
                m[(i, j)] /= norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn expm_of_zero_is_exact_identity() {
        let z = ComplexMatrix::zeros(5, 5);
        assert_eq!(expm(&z).unwrap(), ComplexMatrix::identity(5));
    }

    #[test]
    fn expm_of_diagonal() {
        let d = ComplexMatrix::from_diag(&[C64::new(0.3, 0.0), C64::new(-2.0, 1.0)]);
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)] - C64::new(0.3f64.exp(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - C64::new(-2.0, 1.0).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn expm_large_norm_diagonal_uses_squaring() {
        let d = ComplexMatrix::from_diag(&[C64::new(-40.0, 3.0), C64::new(5.0, -7.0)]);
        let e = expm(&d).unwrap();
        let want = C64::new(5.0, -7.0).exp();
        assert!((e[(1, 1)] - want).norm() / want.norm() < 1e-12);
    }

    #[test]
    fn expm_against_eigendecomposition_for_normal_matrices() {
        // Oracle: exp(m) = U diag(e^λ) U† for normal m = U diag(λ) U†.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 5, 9] {
            let a = random_matrix(n, n, &mut rng).scale_real(3.0);
            let herm = a.hermitian_part();
            let (_, u) = hermitian_eig(&herm).unwrap();
            let lambdas: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.random::<f64>() * 4.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0))
                .collect();
            let m = u.matmul(&ComplexMatrix::from_diag(&lambdas)).matmul(&u.adjoint());
            let exp_l: Vec<C64> = lambdas.iter().map(|l| l.exp()).collect();
            let want = u.matmul(&ComplexMatrix::from_diag(&exp_l)).matmul(&u.adjoint());
            let got = expm(&m).unwrap();
            assert!(got.max_abs_diff(&want) < 1e-10, "n={n}: {}", got.max_abs_diff(&want));
        }
    }

    #[test]
    fn pinv_of_invertible_is_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = &random_matrix(6, 6, &mut rng) + &ComplexMatrix::identity(6).scale_real(2.0);
        let p = pinv(&m, None).unwrap();
        assert!(p.max_abs_diff(&inverse(&m).unwrap()) < 1e-10);
    }

    #[test]
    fn pinv_of_zero_is_zero() {
        let z = ComplexMatrix::zeros(3, 4);
        assert_eq!(pinv(&z, None).unwrap(), ComplexMatrix::zeros(4, 3));
    }

    #[test]
    fn pinv_rejects_negative_tolerance() {
        assert!(pinv(&ComplexMatrix::identity(2), Some(-1.0)).is_err());
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_matrix(7, 4, &mut rng);
        let d = svd(&m).unwrap();
        assert_eq!(d.s.len(), 4);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        assert!(d.reconstruct(4).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn eig_satisfies_eigen_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_matrix(8, 8, &mut rng);
        let e = eig(&m).unwrap();
        let lhs = m.matmul(&e.vectors);
        let rhs = e.vectors.matmul(&ComplexMatrix::from_diag(&e.values));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}
