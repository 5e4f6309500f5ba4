// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{linalg, ComplexMatrix};
use crate::{Error, Result};

/// Hermiticity tolerance for [`DensityMatrix`] validation.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Unit-trace tolerance for [`DensityMatrix`] validation.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue is `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-10;

/// A validated `d×d` density matrix: Hermitian, unit trace, positive
/// semi-definite (each within a tolerance).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `m` with the default tolerances.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    /// Validates `m`, using `tol` for the Hermiticity, trace and
    /// eigenvalue checks.
    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        check_density(&m, tol)?;
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace().re
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Checks the density-matrix invariants of `m` at tolerance `tol`.
pub fn check_density(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotADensityMatrix(format!(
            "shape {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NotADensityMatrix("non-finite entries".into()));
    }
    let herm_err = m.max_abs_diff(&m.adjoint());
    if herm_err > tol {
        return Err(Error::NotADensityMatrix(format!(
            "hermiticity violated by {herm_err:e}"
        )));
    }
    let tr = m.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::NotADensityMatrix(format!("trace {tr}")));
    }
    let min_eig = linalg::hermitian_eigenvalues(&m.hermitian_part())?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -tol {
        return Err(Error::NotADensityMatrix(format!(
            "negative eigenvalue {min_eig:e}"
        )));
    }
    Ok(())
}

/// A normalized pure state `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Normalizes `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(format!("state norm {norm}")));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis state `|k⟩` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); d];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Row-major vectorization: component `i·d + j` is entry `(i, j)`.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    m.as_slice().to_vec()
}

/// Inverse of [`vectorize`] for a `d×d` matrix.
pub fn devectorize(v: &[C64], d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {d}x{d}",
            v.len()
        )));
    }
    ComplexMatrix::from_vec(d, d, v.to_vec())
}

fn check_joint(rho: &ComplexMatrix, d: usize, d_env: usize) -> Result<()> {
    let n = d * d_env;
    if rho.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "joint matrix is {}x{}, expected {n}x{n} for d={d}, d_E={d_env}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Trace over the environment factor of a system-first joint operator:
/// `out(i, j) = Σ_e rho(i·d_E + e, j·d_E + e)`.
pub fn partial_trace_env(rho: &ComplexMatrix, d: usize, d_env: usize) -> Result<ComplexMatrix> {
    check_joint(rho, d, d_env)?;
    Ok(ComplexMatrix::from_fn(d, d, |i, j| {
        (0..d_env).map(|e| rho[(i * d_env + e, j * d_env + e)]).sum()
    }))
}

/// Trace over the system factor: `out(a, b) = Σ_s rho(s·d_E + a, s·d_E + b)`.
pub fn partial_trace_system(rho: &ComplexMatrix, d: usize, d_env: usize) -> Result<ComplexMatrix> {
    check_joint(rho, d, d_env)?;
    Ok(ComplexMatrix::from_fn(d_env, d_env, |a, b| {
        (0..d).map(|s| rho[(s * d_env + a, s * d_env + b)]).sum()
    }))
}

/// Trace norm `‖a − b‖₁` (sum of singular values of the difference).
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(linalg::singular_values(&(a - b))?.iter().sum())
}

/// Nearest-state projection: Hermitize, clip negative eigenvalues, and
/// renormalize the trace.
pub fn project_to_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "projection of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let (values, vectors) = linalg::hermitian_eig(&m.hermitian_part())?;
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NotADensityMatrix(
            "no positive spectrum left after clipping".into(),
        ));
    }
    let n = m.rows();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * (clipped[j] / total));
    let rho = scaled.matmul(&vectors.adjoint()).hermitian_part();
    DensityMatrix::new(rho)
}

/// Haar-random pure state: a complex standard-normal vector, normalized.
pub fn sample_pure_state(d: usize, rng: &mut impl Rng) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("pure state dimension {d} < 2")));
    }
    let amps = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(amps)
}

/// Pauli matrices and ladder operators used by the physical models.
pub mod ops {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    /// `(σ_x + iσ_y)/2 = |0⟩⟨1|`
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap()
    }

    /// Truncated bosonic annihilation operator on `n` Fock levels.
    pub fn destroy(n: usize) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(n, n);
        for k in 1..n {
            a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
        }
        a
    }

    pub fn number(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&(0..n).map(|k| k as f64).collect::<Vec<_>>())
    }

    /// `Tr(op · rho)`
    pub fn expectation(op: &ComplexMatrix, rho: &ComplexMatrix) -> C64 {
        op.matmul(rho).trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ket_bra(d: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, j)] = c(1.0, 0.0);
        m
    }

    fn random_density(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(d, d, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let p = a.matmul(&a.adjoint());
        let tr = p.trace().re;
        p.scale_real(1.0 / tr)
    }

    #[test]
    fn vectorize_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert_eq!(vectorize(&half), vec![c(0.5, 0.), c(0., 0.), c(0., 0.), c(0.5, 0.)]);
        assert_eq!(vectorize(&ket_bra(2, 0, 1)), vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
    }

    #[test]
    fn devectorize_examples() {
        let v = [c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        assert_eq!(devectorize(&v, 2).unwrap(), ket_bra(2, 0, 0));
        let v = [c(0.5, 0.), c(0., 0.), c(0., 0.), c(0.5, 0.)];
        assert_eq!(devectorize(&v, 2).unwrap(), ComplexMatrix::identity(2).scale_real(0.5));
        assert!(devectorize(&v, 3).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_bell_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density(2, &mut rng);
        let env = random_density(3, &mut rng);
        let joint = rho.kron(&env);
        assert!(partial_trace_env(&joint, 2, 3).unwrap().max_abs_diff(&rho) < 1e-15);
        assert!(partial_trace_system(&joint, 2, 3).unwrap().max_abs_diff(&env) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::normalized(vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]).unwrap();
        let reduced = partial_trace_env(&bell.projector(), 2, 2).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        assert!(partial_trace_env(&joint, 3, 3).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = ket_bra(2, 0, 0);
        let one = ket_bra(2, 1, 1);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-14);
        assert!((trace_distance(&zero, &mixed).unwrap() - 1.0).abs() < 1e-14);
        assert!(trace_distance(&zero, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn projection_clips_and_renormalizes() {
        let m = ComplexMatrix::from_real_diag(&[1.2, -0.2]);
        let p = project_to_density(&m).unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn projection_of_valid_state_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in 2..6 {
            let rho = random_density(d, &mut rng);
            let p = project_to_density(&rho).unwrap();
            assert!(p.matrix().max_abs_diff(&rho) < 1e-12);
        }
    }

    #[test]
    fn projection_of_zero_fails() {
        assert!(project_to_density(&ComplexMatrix::zeros(2, 2)).is_err());
        assert!(project_to_density(&ComplexMatrix::from_real_diag(&[-1.0, -0.5])).is_err());
    }

    #[test]
    fn pure_state_sampling_is_deterministic_and_normalized() {
        let a = sample_pure_state(3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_pure_state(3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(sample_pure_state(1, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
    }

    #[test]
    fn haar_average_is_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 2;
        let n = 100_000;
        let mut acc = ComplexMatrix::zeros(d, d);
        for _ in 0..n {
            acc += &sample_pure_state(d, &mut rng).unwrap().projector();
        }
        let mean = acc.scale_real(1.0 / n as f64);
        assert!(mean.max_abs_diff(&ComplexMatrix::identity(d).scale_real(0.5)) < 1e-2);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.6, 0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.1, -0.1])).is_err());
        assert!(DensityMatrix::new(ket_bra(2, 0, 1)).is_err());
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (ops::sigma_x(), ops::sigma_y(), ops::sigma_z());
        // σ_x σ_y = i σ_z
        assert!(x.matmul(&y).max_abs_diff(&z.scale(c(0., 1.))) < 1e-15);
        let sp = (&x + &y.scale(c(0., 1.))).scale_real(0.5);
        assert_eq!(sp, ops::sigma_plus());
        let a = ops::destroy(4);
        assert!(a.adjoint().matmul(&a).max_abs_diff(&ops::number(4)) < 1e-14);
    }
}
