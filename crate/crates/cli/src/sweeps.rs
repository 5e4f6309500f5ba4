// SPDX-License-Identifier: Apache-2.0

//! Fixed experiment grids written as CSV, one row per cell (or per
//! eigenvalue for the spectrum grid).

use std::time::Instant;

use anyhow::Result;
use markov_embed::analysis::{
    match_spectra, noisy_pair, reference_spectrum, sweep_finite_env, sweep_memory_depth,
    sweep_spin_boson_gamma, CellOptions, FiniteEnvFixed, SpinBosonFixed, SweepReport,
};
use markov_embed::embedding::{fit, ThresholdConfig};
use markov_embed::models::{generate_dataset, FiniteEnvConfig, ModelConfig};
use markov_embed::C64;
use serde::Serialize;

use markov_embed_cli::files::{to_json_bytes, write_atomic};
use crate::{Grid, SweepArgs};

pub const TABLE1_ENV_DIMS: [usize; 5] = [2, 3, 4, 5, 6];
pub const TABLE1_SIGMAS: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const TABLE1_STEPS: [usize; 2] = [150, 200];
pub const FIG3B_SIGMAS: [f64; 4] = [0.0, 1e-3, 1e-2, 1e-1];
pub const FIG3B_DEPTHS: [usize; 12] = [1, 5, 10, 20, 30, 40, 50, 60, 75, 100, 125, 150];
pub const FIG3C_ENV_DIMS: [usize; 3] = [2, 3, 4];
pub const FIG3C_SIGMAS: [f64; 2] = [0.0, 1e-2];
pub const FIG3D_SIGMAS: [f64; 3] = [1e-3, 1e-2, 1e-1];
pub const FIG5_GAMMAS: [f64; 4] = [0.05, 0.1, 0.2, 0.4];
pub const FIG5_DEPTHS: [usize; 7] = [25, 50, 100, 200, 300, 500, 800];

fn finite(d_env: usize) -> ModelConfig {
    ModelConfig::FiniteEnv(FiniteEnvConfig { d_env, ..FiniteEnvConfig::default() })
}

#[derive(Serialize)]
struct EigenRow {
    env_dim: usize,
    sigma: f64,
    seed: u64,
    status: String,
    rank: Option<usize>,
    source: &'static str,
    index: Option<usize>,
    re: Option<f64>,
    im: Option<f64>,
    modulus: Option<f64>,
    matched_index: Option<usize>,
    distance: Option<f64>,
}

fn eigen_rows(d_env: usize, sigma: f64, seed: u64) -> Vec<EigenRow> {
    let row = |status: String, rank, source, index, z: Option<C64>, matched: Option<(usize, f64)>| EigenRow {
        env_dim: d_env,
        sigma,
        seed,
        status,
        rank,
        source,
        index,
        re: z.map(|z| z.re),
        im: z.map(|z| z.im),
        modulus: z.map(|z| z.norm()),
        matched_index: matched.map(|m| m.0),
        distance: matched.map(|m| m.1),
    };
    let run = || -> markov_embed::Result<(usize, Vec<C64>, Vec<C64>)> {
        let model = finite(d_env);
        let (clean, test) = generate_dataset(&model, 4, 200, seed)?;
        let (noisy, _) = noisy_pair(&clean, &test, sigma, seed)?;
        let m = fit(&noisy, 75, &ThresholdConfig::with_sigma(sigma))?;
        Ok((m.rank, m.eigenvalues, reference_spectrum(&model, seed)?))
    };
    match run() {
        Err(e) => vec![row(format!("error: {e}"), None, "", None, None, None)],
        Ok((rank, recovered, reference)) => {
            let m = match_spectra(&recovered, &reference);
            let mut rec = vec![None; recovered.len()];
            let mut refm = vec![None; reference.len()];
            for p in &m.pairs {
                rec[p.recovered] = Some((p.reference, p.distance));
                refm[p.reference] = Some((p.recovered, p.distance));
            }
            let ok = || "ok".to_string();
            let mut out: Vec<EigenRow> = recovered
                .iter()
                .enumerate()
                .map(|(i, &z)| row(ok(), Some(rank), "recovered", Some(i), Some(z), rec[i]))
                .collect();
            out.extend(
                reference
                    .iter()
                    .enumerate()
                    .map(|(i, &z)| row(ok(), Some(rank), "reference", Some(i), Some(z), refm[i])),
            );
            out
        }
    }
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let count = args.seeds.unwrap_or(if args.grid == Grid::Fig5 { 1 } else { 5 });
    let seeds: Vec<u64> = (args.seed_start..args.seed_start + count).collect();
    let report: SweepReport = match args.grid {
        Grid::Table1 => sweep_finite_env(
            &TABLE1_ENV_DIMS,
            &TABLE1_SIGMAS,
            &TABLE1_STEPS,
            &FiniteEnvFixed::default(),
            &seeds,
            CellOptions::default(),
        ),
        Grid::Fig3b => sweep_memory_depth(&finite(3), 4, 200, &FIG3B_SIGMAS, &FIG3B_DEPTHS, &seeds),
        Grid::Fig3c => {
            let start = Instant::now();
            let mut rows = Vec::new();
            for &d_env in &FIG3C_ENV_DIMS {
                for &sigma in &FIG3C_SIGMAS {
                    for &seed in &seeds {
                        rows.extend(eigen_rows(d_env, sigma, seed));
                    }
                }
            }
            write_atomic(&args.out, &csv_bytes(&rows)?)?;
            eprintln!("fig3c: {} rows in {:.1} s", rows.len(), start.elapsed().as_secs_f64());
            return Ok(());
        }
        Grid::Fig3d => sweep_finite_env(
            &TABLE1_ENV_DIMS,
            &FIG3D_SIGMAS,
            &[200],
            &FiniteEnvFixed::default(),
            &seeds,
            CellOptions { denoise: true, ..CellOptions::default() },
        ),
        Grid::Fig5 => sweep_spin_boson_gamma(&FIG5_GAMMAS, &FIG5_DEPTHS, &SpinBosonFixed::default(), &seeds),
    };
    write_atomic(&args.out, &csv_bytes(&report.cells)?)?;
    if let Some(path) = &args.json {
        write_atomic(path, &to_json_bytes(&report)?)?;
    }
    eprintln!(
        "{}: {} cells, {} failed, {:.1} s",
        report.name,
        report.cells.len(),
        report.failed(),
        report.runtime_s
    );
    Ok(())
}
