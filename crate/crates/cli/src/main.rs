// SPDX-License-Identifier: Apache-2.0

//! `markov-embed`: generate trajectory datasets, fit memory embeddings,
//! predict, denoise and run the experiment sweeps.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use markov_embed::embedding::DmdVariant;
use markov_embed::models::{
    FiniteEnvConfig, JcConfig, ModelConfig, RateNormalization, SpinBosonConfig,
};
use markov_embed::C64;

mod commands;
mod sweeps;

#[derive(Parser)]
#[command(name = "markov-embed", version, about = "Markovian embeddings of non-Markovian quantum trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a model and write noisy, clean and test trajectory files.
    Generate(GenerateArgs),
    /// Fit an embedding to a dataset file.
    Fit(FitArgs),
    /// Predict a test trajectory from its first K states.
    Predict(PredictArgs),
    /// Low-rank denoise a dataset file.
    Denoise(DenoiseArgs),
    /// Fitted eigenvalues next to the exact channel spectrum.
    Spectrum(SpectrumArgs),
    /// Run one of the experiment grids and write a CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Finite,
    Jc,
    SpinBoson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RateNorm {
    Basis,
    BasisSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Projected,
    Literal,
}

impl From<Variant> for DmdVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Projected => DmdVariant::Projected,
            Variant::Literal => DmdVariant::Literal,
        }
    }
}

/// Physical parameters. Unset values take the model's defaults.
#[derive(Args, Clone, Debug)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "finite")]
    pub model: ModelKind,
    /// Time step; defaults to 0.2 (finite), 0.03 (jc), 0.15 (spin-boson).
    #[arg(long)]
    pub tau: Option<f64>,
    /// System dimension (finite).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Environment dimension (finite).
    #[arg(long = "d-env", default_value_t = 2)]
    pub d_env: usize,
    #[arg(long = "a-unit", default_value_t = 1.0)]
    pub a_unit: f64,
    #[arg(long = "a-diss", default_value_t = 0.1)]
    pub a_diss: f64,
    #[arg(long = "rate-norm", value_enum, default_value = "basis-squared")]
    pub rate_norm: RateNorm,
    /// Cavity decay (jc) or spectral width (spin-boson); default 0.05.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Coupling; defaults to 2.5 (jc) or 0.5 (spin-boson).
    #[arg(long)]
    pub g: Option<f64>,
    /// Coherent amplitude of the cavity (jc).
    #[arg(long, default_value_t = 1.1)]
    pub alpha: f64,
    #[arg(long = "alpha-im", default_value_t = 0.0)]
    pub alpha_im: f64,
    /// Fock truncation; jc default picks it from the coherent amplitude,
    /// spin-boson default is 8.
    #[arg(long = "n-levels")]
    pub n_levels: Option<usize>,
    /// Tunnelling amplitude (spin-boson).
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Resonance frequency (spin-boson).
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
}

impl ModelArgs {
    pub fn config(&self) -> Result<ModelConfig> {
        let m = match self.model {
            ModelKind::Finite => {
                if self.gamma.is_some() || self.g.is_some() || self.n_levels.is_some() {
                    bail!("--gamma, --g and --n-levels do not apply to the finite model");
                }
                ModelConfig::FiniteEnv(FiniteEnvConfig {
                    d: self.d,
                    d_env: self.d_env,
                    a_unit: self.a_unit,
                    a_diss: self.a_diss,
                    tau: self.tau.unwrap_or(0.2),
                    rate_normalization: match self.rate_norm {
                        RateNorm::Basis => RateNormalization::Basis,
                        RateNorm::BasisSquared => RateNormalization::BasisSquared,
                    },
                })
            }
            ModelKind::Jc => {
                let base = JcConfig::default();
                let cfg = JcConfig {
                    gamma: self.gamma.unwrap_or(base.gamma),
                    g: self.g.unwrap_or(base.g),
                    alpha: C64::new(self.alpha, self.alpha_im),
                    tau: self.tau.unwrap_or(base.tau),
                    n_levels: self.n_levels.unwrap_or(base.n_levels),
                };
                cfg.validate()?;
                ModelConfig::JaynesCummings(cfg)
            }
            ModelKind::SpinBoson => {
                let base = SpinBosonConfig::default();
                let cfg = SpinBosonConfig {
                    delta: self.delta,
                    g: self.g.unwrap_or(base.g),
                    gamma: self.gamma.unwrap_or(base.gamma),
                    omega0: self.omega0,
                    tau: self.tau.unwrap_or(base.tau),
                    n_levels: self.n_levels.unwrap_or(base.n_levels),
                };
                cfg.validate()?;
                ModelConfig::SpinBoson(cfg)
            }
        };
        if !(m.tau() > 0.0) || !m.tau().is_finite() {
            bail!("--tau must be positive and finite");
        }
        Ok(m)
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of training trajectories.
    #[arg(long = "L", default_value_t = 4)]
    pub count: usize,
    /// Steps per trajectory.
    #[arg(long = "T", default_value_t = 200)]
    pub steps: usize,
    /// Standard deviation of the measurement noise.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noisy training dataset.
    #[arg(long)]
    pub out: PathBuf,
    /// Clean training dataset.
    #[arg(long = "out-clean")]
    pub out_clean: Option<PathBuf>,
    /// Held-out test trajectory, noisy, with its clean twin inline.
    #[arg(long = "out-test")]
    pub out_test: Option<PathBuf>,
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Memory depth.
    #[arg(long = "K", default_value_t = 75)]
    pub depth: usize,
    /// Noise level for the rank threshold; defaults to the dataset's.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Relative threshold used when sigma is 0.
    #[arg(long, default_value_t = 1e-12)]
    pub floor: f64,
    #[arg(long, value_enum, default_value = "projected")]
    pub variant: Variant,
    /// Project predictions onto density matrices by default.
    #[arg(long, overrides_with = "no_project")]
    pub project: bool,
    #[arg(long = "no-project")]
    pub no_project: bool,
    #[arg(long = "out-model")]
    pub out_model: PathBuf,
    /// JSON report; printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Test trajectory file (first trajectory is used).
    #[arg(long)]
    pub data: PathBuf,
    /// Steps to predict after the history; defaults to T−K.
    #[arg(long)]
    pub horizon: Option<i64>,
    #[arg(long = "out-csv")]
    pub out_csv: PathBuf,
    #[arg(long, overrides_with = "no_project")]
    pub project: bool,
    #[arg(long = "no-project")]
    pub no_project: bool,
}

#[derive(Args)]
pub struct DenoiseArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long = "K", default_value_t = 75)]
    pub depth: usize,
    /// Noise level for the rank threshold; defaults to the dataset's.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub floor: f64,
    /// Truncation rank; defaults to the optimal rank.
    #[arg(long)]
    pub eta: Option<usize>,
    #[arg(long)]
    pub project: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "out-csv")]
    pub out_csv: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// Effective environment dimension over d_E × σ × T.
    Table1,
    /// Prediction error against memory depth.
    Fig3b,
    /// Fitted eigenvalues against the channel spectrum.
    Fig3c,
    /// Dataset distances before and after denoising.
    Fig3d,
    /// Spin-boson rank and prediction error over γ × K.
    Fig5,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub grid: Grid,
    /// Number of seeds per grid point; defaults to 5 (1 for fig5).
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long = "seed-start", default_value_t = 0)]
    pub seed_start: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the full report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Denoise(a) => commands::denoise(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Sweep(a) => sweeps::sweep(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
