// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub recovered: usize,
    pub reference: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMatch {
    pub pairs: Vec<MatchedPair>,
    pub total_distance: f64,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// Reference eigenvalues left without a partner.
    pub unmatched_reference: Vec<C64>,
    /// Number of recovered eigenvalues left without a partner.
    pub unmatched_recovered: usize,
}

/// Minimum-cost assignment of every row to a distinct column of a
/// `rows × cols` cost matrix with `rows ≤ cols` (shortest augmenting paths
/// with potentials). Returns the column of each row.
pub fn assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "assignment needs rows <= cols");
    // 1-based arrays; column 0 is the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if owner[j] > 0 {
            out[owner[j] - 1] = j - 1;
        }
    }
    out
}

/// Pairs recovered and reference eigenvalues so that the summed distance
/// `|λ_rec − λ_ref|` is minimal. The shorter list is matched completely.
pub fn match_spectra(recovered: &[C64], reference: &[C64]) -> SpectrumMatch {
    let swap = recovered.len() > reference.len();
    let (rows, cols) = if swap { (reference, recovered) } else { (recovered, reference) };
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| cols.iter().map(|b| (a - b).norm()).collect())
        .collect();
    let cols_of = assignment(&cost);
    let mut pairs: Vec<MatchedPair> = cols_of
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let (rec, re) = if swap { (j, i) } else { (i, j) };
            MatchedPair { recovered: rec, reference: re, distance: cost[i][j] }
        })
        .collect();
    pairs.sort_by_key(|p| p.recovered);
    let mut taken = vec![false; reference.len()];
    for p in &pairs {
        taken[p.reference] = true;
    }
    let total_distance: f64 = pairs.iter().map(|p| p.distance).sum();
    let max_distance = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    let mean_distance = if pairs.is_empty() { 0.0 } else { total_distance / pairs.len() as f64 };
    SpectrumMatch {
        unmatched_reference: reference
            .iter()
            .zip(&taken)
            .filter(|(_, &t)| !t)
            .map(|(z, _)| *z)
            .collect(),
        unmatched_recovered: recovered.len() - pairs.len(),
        pairs,
        total_distance,
        max_distance,
        mean_distance,
    }
}
