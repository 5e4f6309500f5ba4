// SPDX-License-Identifier: Apache-2.0

use crate::models::TrajectoryDataset;
use crate::qcore::{trace_distance, ComplexMatrix};
use crate::{Error, Result};

/// Mean trace distance over steps `K..T−1` of two equally long trajectories.
pub fn dist_test(t1: &[ComplexMatrix], t2: &[ComplexMatrix], depth: usize) -> Result<f64> {
    if t1.len() != t2.len() {
        return Err(Error::DimensionMismatch(format!(
            "trajectories of length {} and {}",
            t1.len(),
            t2.len()
        )));
    }
    if t1.len() <= depth {
        return Err(Error::InvalidParameter(format!(
            "trajectory length {} must exceed K = {depth}",
            t1.len()
        )));
    }
    let mut total = 0.0;
    for (a, b) in t1[depth..].iter().zip(&t2[depth..]) {
        total += trace_distance(a, b)?;
    }
    Ok(total / (t1.len() - depth) as f64)
}

/// Mean trace distance over every paired state of two trajectory sets.
pub fn dist_trajectories(s1: &[Vec<ComplexMatrix>], s2: &[Vec<ComplexMatrix>]) -> Result<f64> {
    if s1.len() != s2.len() || s1.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "datasets with {} and {} trajectories",
            s1.len(),
            s2.len()
        )));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (a, b) in s1.iter().zip(s2) {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch("trajectory lengths differ".into()));
        }
        for (x, y) in a.iter().zip(b) {
            total += trace_distance(x, y)?;
        }
        count += a.len();
    }
    if count == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(total / count as f64)
}

/// Mean trace distance between two datasets of matching shape.
pub fn dist_dataset(s1: &TrajectoryDataset, s2: &TrajectoryDataset) -> Result<f64> {
    dist_trajectories(&s1.trajectories, &s2.trajectories)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;

    #[test]
    fn orthogonal_states_are_two_apart() {
        let zero = vec![PureState::basis(2, 0).projector(); 5];
        let one = vec![PureState::basis(2, 1).projector(); 5];
        assert!((dist_test(&zero, &one, 2).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(dist_test(&zero, &zero, 2).unwrap(), 0.0);
        assert!(dist_test(&zero, &one[..4], 2).is_err());
        assert!(dist_test(&zero, &one, 5).is_err());
        let d1 = dist_trajectories(std::slice::from_ref(&zero), std::slice::from_ref(&one)).unwrap();
        let d2 = dist_trajectories(&[zero.clone(), zero], &[one.clone(), one]).unwrap();
        assert!((d1 - d2).abs() < 1e-15);
    }
}
