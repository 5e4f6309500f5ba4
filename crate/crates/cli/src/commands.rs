// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use markov_embed::analysis::{dist_test, dist_trajectories, match_spectra, noisy_pair, reference_spectrum};
use markov_embed::embedding::{
    denoise as denoise_hankel, effective_env_dim, fit_with, natural_rank, optimal_rank, build_shifted_and_stack,
    ThresholdConfig,
};
use markov_embed::models::{generate_dataset, ModelConfig, TrajectoryDataset};
use markov_embed::qcore::{linalg, ops, ComplexMatrix};
use markov_embed::C64;
use serde::Serialize;

use markov_embed_cli::files::{
    pair, reference_from, to_json_bytes, write_atomic, write_json, DatasetFile, LoadedDataset, ModelFile, Pair,
};
use crate::{DenoiseArgs, FitArgs, GenerateArgs, PredictArgs, SpectrumArgs};

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let model = args.model.config()?;
    ensure!(args.count >= 1, "--L must be at least 1");
    ensure!(args.steps >= 1, "--T must be at least 1");
    let (clean, test) = generate_dataset(&model, args.count, args.steps, args.seed)?;
    let (noisy, noisy_test) = noisy_pair(&clean, &test, args.sigma, args.seed)?;

    let mut noisy_file = DatasetFile::from_dataset(&noisy);
    if let (Some(path), true) = (&args.out_clean, args.sigma > 0.0) {
        noisy_file.clean_file = Some(reference_from(&args.out, path));
    }
    // every output is serialized before anything touches the disk
    let mut outputs = vec![(args.out.as_path(), to_json_bytes(&noisy_file)?)];
    if let Some(path) = &args.out_clean {
        outputs.push((path, to_json_bytes(&DatasetFile::from_dataset(&clean))?));
    }
    if let Some(path) = &args.out_test {
        let single = TrajectoryDataset { trajectories: vec![noisy_test], ..noisy.clone() };
        let mut file = DatasetFile::from_dataset(&single);
        if args.sigma > 0.0 {
            file.clean_trajectories = Some(markov_embed_cli::files::trajectories_to_json(&[test]));
        }
        outputs.push((path, to_json_bytes(&file)?));
    }
    for (path, bytes) in outputs {
        write_atomic(path, &bytes)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    max_distance: f64,
    mean_distance: f64,
    matched: usize,
    unmatched_reference: usize,
}

#[derive(Serialize)]
struct FitReport {
    r: usize,
    #[serde(rename = "K")]
    depth: usize,
    d: usize,
    sigma: f64,
    effective_env_dim: usize,
    natural_rank: Option<usize>,
    eigenvalues: Vec<Pair>,
    singular_values: Vec<f64>,
    spectrum_match: Option<SpectrumSummary>,
    fingerprint: String,
    runtime_s: f64,
}

fn threshold(sigma: Option<f64>, floor: f64, ds: &TrajectoryDataset) -> Result<ThresholdConfig> {
    let cfg = ThresholdConfig { sigma: sigma.unwrap_or(ds.noise_sigma), floor };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report_path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match report_path {
        Some(p) => write_atomic(p, bytes),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let data = LoadedDataset::read(&args.data)?;
    let ds = data.file.dataset()?;
    ensure!(
        args.depth >= 1 && args.depth < ds.steps(),
        "K = {} must satisfy 1 <= K < T = {}",
        args.depth,
        ds.steps()
    );
    let cfg = threshold(args.sigma, args.floor, &ds)?;
    let start = Instant::now();
    let model = fit_with(&ds, args.depth, &cfg, args.variant.into())?;

    let spectrum_match = match &ds.metadata {
        Some(meta @ markov_embed::models::ModelMetadata { model: ModelConfig::FiniteEnv(_), .. }) => {
            let reference = reference_spectrum(&meta.model, meta.seed)?;
            let m = match_spectra(&model.eigenvalues, &reference);
            Some(SpectrumSummary {
                max_distance: m.max_distance,
                mean_distance: m.mean_distance,
                matched: m.pairs.len(),
                unmatched_reference: m.unmatched_reference.len(),
            })
        }
        _ => None,
    };
    let natural = match ds.metadata.as_ref().map(|m| m.model) {
        Some(ModelConfig::FiniteEnv(c)) => Some(natural_rank(c.d, c.d_env)),
        _ => None,
    };
    let project = args.project && !args.no_project;
    let file = ModelFile::new(&model, ds.tau, project, data.fingerprint(), ds.metadata.clone());
    let report = FitReport {
        r: model.rank,
        depth: model.depth,
        d: model.system_dim,
        sigma: cfg.sigma,
        effective_env_dim: effective_env_dim(model.rank, model.system_dim),
        natural_rank: natural,
        eigenvalues: model.eigenvalues.iter().map(|&z| pair(z)).collect(),
        singular_values: model.singular_values.clone(),
        spectrum_match,
        fingerprint: file.fingerprint.clone(),
        runtime_s: start.elapsed().as_secs_f64(),
    };
    write_json(&args.out_model, &file)?;
    emit(args.report.as_deref(), &to_json_bytes(&report)?)
}

/// Column values of one state: Bloch components for a qubit, otherwise
/// real and imaginary parts of every entry.
fn state_columns(rho: &ComplexMatrix) -> Vec<f64> {
    if rho.rows() == 2 {
        [ops::sigma_x(), ops::sigma_y(), ops::sigma_z()]
            .iter()
            .map(|op| ops::expectation(op, rho).re)
            .collect()
    } else {
        rho.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
    }
}

fn state_headers(prefix: &str, d: usize) -> Vec<String> {
    if d == 2 {
        ["sx", "sy", "sz"].iter().map(|c| format!("{prefix}_{c}")).collect()
    } else {
        (0..d)
            .flat_map(|i| (0..d).flat_map(move |j| [format!("{prefix}_re_{i}_{j}"), format!("{prefix}_im_{i}_{j}")]))
            .collect()
    }
}

#[derive(Serialize)]
struct PredictReport {
    #[serde(rename = "K")]
    depth: usize,
    horizon: usize,
    compared_steps: usize,
    dist_test_data: Option<f64>,
    dist_test_clean: Option<f64>,
}

pub fn predict(args: &PredictArgs) -> Result<()> {
    let (file, model) = ModelFile::read(&args.model)?;
    let data = LoadedDataset::read(&args.data)?;
    let ds = data.file.dataset()?;
    ensure!(ds.system_dim == model.system_dim, "test data is {0}x{0}, model expects d = {1}", ds.system_dim, model.system_dim);
    let traj = &ds.trajectories[0];
    let depth = model.depth;
    ensure!(traj.len() >= depth, "test trajectory has {} states, model needs K = {depth}", traj.len());
    let horizon = match args.horizon {
        Some(h) if h <= 0 => bail!("--horizon must be positive, got {h}"),
        Some(h) => h as usize,
        None => {
            ensure!(traj.len() > depth, "test trajectory has no steps after the first K = {depth}");
            traj.len() - depth
        }
    };
    let project = if args.project { true } else if args.no_project { false } else { file.project };
    let history = &traj[..depth];
    let predicted = model.predict_trajectory(history, horizon, project)?;
    let clean = data.clean()?.map(|c| c.into_iter().next().unwrap_or_default());

    let d = model.system_dim;
    let mut header = vec!["step".to_string(), "phase".to_string()];
    header.extend(state_headers("pred", d));
    header.extend(state_headers("data", d));
    if clean.is_some() {
        header.extend(state_headers("clean", d));
    }
    let width = state_headers("x", d).len();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for step in 0..depth + horizon {
        let (phase, pred) = if step < depth { ("history", &traj[step]) } else { ("prediction", &predicted[step - depth]) };
        let mut row = vec![step.to_string(), phase.to_string()];
        row.extend(state_columns(pred).iter().map(f64::to_string));
        let mut others = vec![Some(traj)];
        others.extend(clean.as_ref().map(Some));
        for other in others.into_iter().flatten() {
            match other.get(step) {
                Some(rho) => row.extend(state_columns(rho).iter().map(f64::to_string)),
                None => row.extend(std::iter::repeat_n(String::new(), width)),
            }
        }
        w.write_record(&row)?;
    }
    write_atomic(&args.out_csv, &w.into_inner()?)?;

    // 𝒟^test over the steps present in both the prediction and the file
    let end = traj.len().min(depth + horizon);
    let compared = end.saturating_sub(depth);
    let mut full = history.to_vec();
    full.extend(predicted.iter().take(compared).cloned());
    let score = |reference: &[ComplexMatrix]| -> Result<Option<f64>> {
        if compared == 0 {
            return Ok(None);
        }
        Ok(Some(dist_test(&full, &reference[..end], depth)?))
    };
    let report = PredictReport {
        depth,
        horizon,
        compared_steps: compared,
        dist_test_data: score(traj)?,
        dist_test_clean: clean.as_deref().map(score).transpose()?.flatten(),
    };
    emit(None, &to_json_bytes(&report)?)
}

#[derive(Serialize)]
struct DenoiseReport {
    eta: Option<usize>,
    unchanged: bool,
    dist_input_clean: Option<f64>,
    dist_denoised_clean: Option<f64>,
}

pub fn denoise(args: &DenoiseArgs) -> Result<()> {
    let data = LoadedDataset::read(&args.data)?;
    let ds = data.file.dataset()?;
    let clean = data.clean()?;
    let cfg = threshold(args.sigma, args.floor, &ds)?;
    if cfg.sigma == 0.0 && args.eta.is_none() && !args.project {
        // nothing to remove: hand back the input as is
        write_atomic(&args.out, &data.bytes)?;
        let d = clean.as_ref().map(|c| dist_trajectories(&ds.trajectories, c)).transpose()?;
        let report = DenoiseReport { eta: None, unchanged: true, dist_input_clean: d, dist_denoised_clean: d };
        return emit(args.report.as_deref(), &to_json_bytes(&report)?);
    }
    let hs = build_shifted_and_stack(&ds.trajectories, args.depth)?;
    let eta = match args.eta {
        Some(e) => e,
        None => {
            let values = linalg::singular_values(&hs.h)?;
            optimal_rank(&values, hs.h.rows(), hs.h.cols(), &cfg)?
        }
    };
    if eta == 0 {
        bail!("no signal above noise threshold");
    }
    let (_, trajectories) = denoise_hankel(&hs, eta, args.project)?;
    let denoised = TrajectoryDataset { trajectories, ..ds.clone() };
    let mut out = DatasetFile::from_dataset(&denoised);
    if let Some(name) = &data.file.clean_file {
        let target = data.path.parent().map_or_else(|| Path::new(name).to_path_buf(), |p| p.join(name));
        out.clean_file = Some(reference_from(&args.out, &target));
    }
    out.clean_trajectories = data.file.clean_trajectories.clone();
    write_json(&args.out, &out)?;
    let report = DenoiseReport {
        eta: Some(eta),
        unchanged: false,
        dist_input_clean: clean.as_ref().map(|c| dist_trajectories(&ds.trajectories, c)).transpose()?,
        dist_denoised_clean: clean.as_ref().map(|c| dist_trajectories(&denoised.trajectories, c)).transpose()?,
    };
    emit(args.report.as_deref(), &to_json_bytes(&report)?)
}

#[derive(Serialize)]
struct SpectrumRow {
    source: &'static str,
    index: usize,
    re: f64,
    im: f64,
    modulus: f64,
    phase: f64,
    matched_index: Option<usize>,
    distance: Option<f64>,
}

fn spectrum_row(source: &'static str, index: usize, z: C64, matched: Option<(usize, f64)>) -> SpectrumRow {
    SpectrumRow {
        source,
        index,
        re: z.re,
        im: z.im,
        modulus: z.norm(),
        phase: z.arg(),
        matched_index: matched.map(|m| m.0),
        distance: matched.map(|m| m.1),
    }
}

pub fn spectrum(args: &SpectrumArgs) -> Result<()> {
    let (file, model) = ModelFile::read(&args.model)?;
    let reference = file
        .training_metadata
        .as_ref()
        .map(|m| reference_spectrum(&m.model, m.seed))
        .transpose()
        .context("computing the reference channel spectrum")?
        .unwrap_or_default();
    let m = match_spectra(&model.eigenvalues, &reference);
    let mut rec_match = vec![None; model.rank];
    let mut ref_match = vec![None; reference.len()];
    for p in &m.pairs {
        rec_match[p.recovered] = Some((p.reference, p.distance));
        ref_match[p.reference] = Some((p.recovered, p.distance));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, &z) in model.eigenvalues.iter().enumerate() {
        w.serialize(spectrum_row("recovered", i, z, rec_match[i]))?;
    }
    for (i, &z) in reference.iter().enumerate() {
        w.serialize(spectrum_row("reference", i, z, ref_match[i]))?;
    }
    write_atomic(&args.out_csv, &w.into_inner()?)?;
    let summary = (!reference.is_empty()).then_some(SpectrumSummary {
        max_distance: m.max_distance,
        mean_distance: m.mean_distance,
        matched: m.pairs.len(),
        unmatched_reference: m.unmatched_reference.len(),
    });
    emit(None, &to_json_bytes(&summary)?)
}
