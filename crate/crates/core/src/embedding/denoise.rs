// SPDX-License-Identifier: Apache-2.0

use crate::models::TrajectoryDataset;
use crate::qcore::{devectorize, linalg, project_to_density, ComplexMatrix, Trajectory};
use crate::{Error, Result};

use super::hankel::{build_shifted_and_stack, HankelSet};
use super::threshold::{optimal_rank, ThresholdConfig};

/// Rank-`eta` truncation of the stacked Hankel matrix and the trajectories
/// read back from it. State `k` of a trajectory comes from block-row 0 of
/// column `k` while `k ≤ T−K`, and from the last column otherwise.
pub fn denoise(hs: &HankelSet, eta: usize, project: bool) -> Result<(ComplexMatrix, Vec<Trajectory>)> {
    let max_rank = hs.h.rows().min(hs.h.cols());
    if eta == 0 || eta > max_rank {
        return Err(Error::InvalidParameter(format!(
            "denoising rank {eta} outside 1..={max_rank}"
        )));
    }
    let h_den = linalg::svd(&hs.h)?.reconstruct(eta);
    let trajectories = split(&h_den, hs, project)?;
    Ok((h_den, trajectories))
}

fn split(h: &ComplexMatrix, hs: &HankelSet, project: bool) -> Result<Vec<Trajectory>> {
    let d = hs.system_dim;
    let d2 = d * d;
    let mut offset = 0;
    let mut out = Vec::with_capacity(hs.steps.len());
    for &steps in &hs.steps {
        let last = steps - hs.depth;
        let mut traj = Vec::with_capacity(steps);
        for k in 0..steps {
            let (col, block) = if k <= last { (k, 0) } else { (last, k - last) };
            let v: Vec<_> = (0..d2).map(|i| h[(block * d2 + i, offset + col)]).collect();
            let rho = devectorize(&v, d)?;
            traj.push(if project { project_to_density(&rho)?.into_matrix() } else { rho });
        }
        offset += last + 1;
        out.push(traj);
    }
    Ok(out)
}

/// Denoises a dataset at the optimal rank for the given noise level and
/// returns it together with the rank used.
pub fn denoise_dataset(
    ds: &TrajectoryDataset,
    depth: usize,
    cfg: &ThresholdConfig,
    project: bool,
) -> Result<(TrajectoryDataset, usize)> {
    let hs = build_shifted_and_stack(&ds.trajectories, depth)?;
    let values = linalg::singular_values(&hs.h)?;
    let eta = optimal_rank(&values, hs.h.rows(), hs.h.cols(), cfg)?;
    if eta == 0 {
        return Err(Error::NoSignal);
    }
    let (_, trajectories) = denoise(&hs, eta, project)?;
    let mut out = ds.clone();
    out.trajectories = trajectories;
    Ok((out, eta))
}
