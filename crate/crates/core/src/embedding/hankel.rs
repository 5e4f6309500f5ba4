// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use crate::qcore::{vectorize, ComplexMatrix};
use crate::{Error, Result};

/// Stacked Hankel data of a set of trajectories with memory depth `K`.
#[derive(Clone, Debug)]
pub struct HankelSet {
    pub depth: usize,
    pub system_dim: usize,
    /// Columns of every per-trajectory block, concatenated.
    pub h: ComplexMatrix,
    /// Per-trajectory blocks without their last column.
    pub x: ComplexMatrix,
    /// Per-trajectory blocks without their first column.
    pub y: ComplexMatrix,
    /// Trajectory index of every column of `h`.
    pub column_provenance: Vec<usize>,
    /// Trajectory index of every column of `x` (and `y`).
    pub pair_provenance: Vec<usize>,
    /// Length of every source trajectory.
    pub steps: Vec<usize>,
}

impl HankelSet {
    /// Block height `K·d²`.
    pub fn block_len(&self) -> usize {
        self.depth * self.system_dim * self.system_dim
    }
}

fn system_dim_of(trajectory: &[ComplexMatrix]) -> Result<usize> {
    let first = trajectory.first().ok_or(Error::EmptyDataset)?;
    let d = first.rows();
    if trajectory.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::DimensionMismatch("trajectory states differ in shape".into()));
    }
    Ok(d)
}

/// Column `j` stacks `vec ϱ(j), …, vec ϱ(j+K−1)`; shape `(K d²) × (T−K+1)`.
pub fn build_hankel(trajectory: &[ComplexMatrix], depth: usize) -> Result<ComplexMatrix> {
    let steps = trajectory.len();
    if depth == 0 || steps <= depth {
        return Err(Error::InvalidParameter(format!(
            "Hankel depth K = {depth} needs 1 <= K < T = {steps}"
        )));
    }
    let d = system_dim_of(trajectory)?;
    let d2 = d * d;
    let vecs: Vec<Vec<_>> = trajectory.iter().map(vectorize).collect();
    let cols = steps - depth + 1;
    Ok(ComplexMatrix::from_fn(depth * d2, cols, |i, j| vecs[j + i / d2][i % d2]))
}

/// Builds `H`, `X` and `Y` per trajectory, then concatenates horizontally.
pub fn build_shifted_and_stack(trajectories: &[Vec<ComplexMatrix>], depth: usize) -> Result<HankelSet> {
    if trajectories.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = system_dim_of(&trajectories[0])?;
    let blocks = trajectories
        .par_iter()
        .map(|t| {
            if system_dim_of(t)? != d {
                return Err(Error::DimensionMismatch("trajectories differ in system dimension".into()));
            }
            build_hankel(t, depth)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut column_provenance = Vec::new();
    let mut pair_provenance = Vec::new();
    let mut xs = Vec::with_capacity(blocks.len());
    let mut ys = Vec::with_capacity(blocks.len());
    for (l, b) in blocks.iter().enumerate() {
        let n = b.cols();
        column_provenance.extend(std::iter::repeat_n(l, n));
        pair_provenance.extend(std::iter::repeat_n(l, n - 1));
        xs.push(b.columns(0..n - 1));
        ys.push(b.columns(1..n));
    }
    Ok(HankelSet {
        depth,
        system_dim: d,
        h: ComplexMatrix::hstack(&blocks)?,
        x: ComplexMatrix::hstack(&xs)?,
        y: ComplexMatrix::hstack(&ys)?,
        column_provenance,
        pair_provenance,
        steps: trajectories.iter().map(Vec::len).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn traj(steps: usize) -> Vec<ComplexMatrix> {
        (0..steps)
            .map(|t| ComplexMatrix::from_fn(2, 2, |i, j| C64::new((10 * t + 2 * i + j) as f64, 0.0)))
            .collect()
    }

    #[test]
    fn hankel_layout() {
        let t = traj(3);
        let h = build_hankel(&t, 2).unwrap();
        assert_eq!(h.shape(), (8, 2));
        let col0: Vec<_> = vectorize(&t[0]).into_iter().chain(vectorize(&t[1])).collect();
        let col1: Vec<_> = vectorize(&t[1]).into_iter().chain(vectorize(&t[2])).collect();
        assert_eq!(h.column(0), col0);
        assert_eq!(h.column(1), col1);
        assert_eq!(build_hankel(&t, 1).unwrap().shape(), (4, 3));
        assert!(build_hankel(&t, 3).is_err());
        assert!(build_hankel(&t, 0).is_err());
    }

    #[test]
    fn stacking_never_crosses_trajectories() {
        let a = traj(6);
        let b: Vec<_> = traj(6).iter().map(|m| m.scale_real(-1.0)).collect();
        let hs = build_shifted_and_stack(&[a, b], 2).unwrap();
        assert_eq!(hs.h.cols(), 10);
        assert_eq!(hs.x.cols(), 8);
        assert_eq!(hs.pair_provenance, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        for j in 0..hs.x.cols() {
            let l = hs.pair_provenance[j];
            let k = j - 4 * l;
            assert_eq!(hs.x.column(j), hs.h.column(5 * l + k));
            assert_eq!(hs.y.column(j), hs.h.column(5 * l + k + 1));
        }
        assert!(build_shifted_and_stack(&[], 2).is_err());
    }
}
