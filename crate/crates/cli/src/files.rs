// SPDX-License-Identifier: Apache-2.0

//! On-disk JSON formats for datasets and fitted models.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use markov_embed::embedding::{DmdVariant, EmbeddingModel, ThresholdConfig, MODULUS_TIE_TOL};
use markov_embed::models::{ModelMetadata, TrajectoryDataset};
use markov_embed::qcore::{ComplexMatrix, Trajectory};
use markov_embed::C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

/// Row-major matrix as nested rows of pairs.
pub type MatrixJson = Vec<Vec<Pair>>;

/// `L × T × d × d`.
pub type TrajectoriesJson = Vec<Vec<MatrixJson>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub format_version: u32,
    pub metadata: Option<ModelMetadata>,
    pub d: usize,
    pub tau: f64,
    #[serde(rename = "L")]
    pub count: usize,
    #[serde(rename = "T")]
    pub steps: usize,
    pub noise_sigma: f64,
    pub trajectories: TrajectoriesJson,
    /// Clean twin stored in a separate file, relative to this file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_file: Option<String>,
    /// Clean twin stored inline (used for test trajectories).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_trajectories: Option<TrajectoriesJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub r: usize,
    #[serde(rename = "K")]
    pub depth: usize,
    pub d: usize,
    pub tau: f64,
    pub eigenvalues: Vec<Pair>,
    /// `r × K d²`.
    pub encoder: MatrixJson,
    /// `K d² × r`.
    pub decoder: MatrixJson,
    pub singular_values: Vec<f64>,
    pub threshold: ThresholdConfig,
    pub variant: DmdVariant,
    /// Default for projecting predictions onto density matrices.
    pub project: bool,
    /// SHA-256 of the training dataset file.
    pub fingerprint: String,
    pub training_metadata: Option<ModelMetadata>,
}

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| pair(z)).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    ensure!(rows.iter().all(|r| r.len() == m), "ragged matrix rows");
    let data = rows.iter().flatten().map(|&p| complex(p)).collect();
    Ok(ComplexMatrix::from_vec(n, m, data)?)
}

pub fn trajectories_to_json(trajs: &[Trajectory]) -> TrajectoriesJson {
    trajs.iter().map(|t| t.iter().map(matrix_to_json).collect()).collect()
}

fn trajectories_from_json(json: &TrajectoriesJson, count: usize, steps: usize, d: usize) -> Result<Vec<Trajectory>> {
    ensure!(json.len() == count, "declared L = {count} but found {} trajectories", json.len());
    json.iter()
        .enumerate()
        .map(|(l, t)| {
            ensure!(t.len() == steps, "trajectory {l}: declared T = {steps} but found {} states", t.len());
            t.iter()
                .map(|m| {
                    let rho = matrix_from_json(m)?;
                    ensure!(rho.shape() == (d, d), "trajectory {l}: state is not {d}x{d}");
                    Ok(rho)
                })
                .collect()
        })
        .collect()
}

impl DatasetFile {
    pub fn from_dataset(ds: &TrajectoryDataset) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            metadata: ds.metadata.clone(),
            d: ds.system_dim,
            tau: ds.tau,
            count: ds.len(),
            steps: ds.steps(),
            noise_sigma: ds.noise_sigma,
            trajectories: trajectories_to_json(&ds.trajectories),
            clean_file: None,
            clean_trajectories: None,
        }
    }

    pub fn dataset(&self) -> Result<TrajectoryDataset> {
        let ds = TrajectoryDataset {
            system_dim: self.d,
            tau: self.tau,
            trajectories: trajectories_from_json(&self.trajectories, self.count, self.steps, self.d)?,
            noise_sigma: self.noise_sigma,
            metadata: self.metadata.clone(),
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn inline_clean(&self) -> Result<Option<Vec<Trajectory>>> {
        self.clean_trajectories
            .as_ref()
            .map(|c| trajectories_from_json(c, self.count, self.steps, self.d))
            .transpose()
    }

    fn check(&self) -> Result<()> {
        ensure!(
            self.format_version == FORMAT_VERSION,
            "unsupported dataset format_version {}",
            self.format_version
        );
        self.dataset()?;
        self.inline_clean()?;
        Ok(())
    }
}

/// A dataset file together with where it was read from.
pub struct LoadedDataset {
    pub path: PathBuf,
    pub file: DatasetFile,
    pub bytes: Vec<u8>,
}

impl LoadedDataset {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let file: DatasetFile =
            serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
        file.check().with_context(|| format!("invalid dataset {}", path.display()))?;
        Ok(Self { path: path.to_path_buf(), file, bytes })
    }

    pub fn fingerprint(&self) -> String {
        sha256_hex(&self.bytes)
    }

    /// Clean twin trajectories, inline or from the referenced file.
    pub fn clean(&self) -> Result<Option<Vec<Trajectory>>> {
        if let Some(inline) = self.file.inline_clean()? {
            return Ok(Some(inline));
        }
        let Some(name) = &self.file.clean_file else {
            return Ok(None);
        };
        let path = parent_dir(&self.path).join(name);
        let twin = Self::read(&path)?;
        ensure!(
            twin.file.count == self.file.count && twin.file.steps == self.file.steps && twin.file.d == self.file.d,
            "clean twin {} does not match the shape of {}",
            path.display(),
            self.path.display()
        );
        Ok(Some(twin.file.dataset()?.trajectories))
    }
}

impl ModelFile {
    pub fn new(model: &EmbeddingModel, tau: f64, project: bool, fingerprint: String, metadata: Option<ModelMetadata>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            r: model.rank,
            depth: model.depth,
            d: model.system_dim,
            tau,
            eigenvalues: model.eigenvalues.iter().map(|&z| pair(z)).collect(),
            encoder: matrix_to_json(&model.encoder),
            decoder: matrix_to_json(&model.decoder),
            singular_values: model.singular_values.clone(),
            threshold: model.threshold,
            variant: model.variant,
            project,
            fingerprint,
            training_metadata: metadata,
        }
    }

    pub fn model(&self) -> Result<EmbeddingModel> {
        ensure!(
            self.format_version == FORMAT_VERSION,
            "unsupported model format_version {}",
            self.format_version
        );
        let block = self.depth * self.d * self.d;
        let encoder = matrix_from_json(&self.encoder)?;
        let decoder = matrix_from_json(&self.decoder)?;
        ensure!(self.eigenvalues.len() == self.r, "expected {} eigenvalues", self.r);
        ensure!(encoder.shape() == (self.r, block), "encoder must be {}x{block}", self.r);
        ensure!(decoder.shape() == (block, self.r), "decoder must be {block}x{}", self.r);
        let eigenvalues: Vec<C64> = self.eigenvalues.iter().map(|&p| complex(p)).collect();
        for w in eigenvalues.windows(2) {
            if w[1].norm() > w[0].norm() + MODULUS_TIE_TOL {
                bail!("eigenvalues are not in descending modulus order");
            }
        }
        let err = encoder.matmul(&decoder).max_abs_diff(&ComplexMatrix::identity(self.r));
        ensure!(err <= 1e-8, "encoder·decoder deviates from identity by {err:e}");
        Ok(EmbeddingModel {
            rank: self.r,
            depth: self.depth,
            system_dim: self.d,
            eigenvalues,
            encoder,
            decoder,
            singular_values: self.singular_values.clone(),
            threshold: self.threshold,
            variant: self.variant,
        })
    }

    pub fn read(path: &Path) -> Result<(Self, EmbeddingModel)> {
        let file: Self = read_json(path)?;
        let model = file.model().with_context(|| format!("invalid model {}", path.display()))?;
        Ok((file, model))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = parent_dir(path);
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder
        .tempfile_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json_bytes(value)?)
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// How `target` is recorded inside a file written to `from`: a bare file
/// name when both share a directory, an absolute path otherwise.
pub fn reference_from(from: &Path, target: &Path) -> String {
    match target.file_name() {
        Some(name) if parent_dir(from) == parent_dir(target) => name.to_string_lossy().into_owned(),
        _ => std::path::absolute(target).unwrap_or_else(|_| target.to_path_buf()).to_string_lossy().into_owned(),
    }
}
