//! Global PCA feature extraction.
//!
//! Fits the top left singular vectors of the raw training matrix. The data
//! is deliberately *not* centered by default; a centered variant exists
//! behind an explicit flag.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;

/// A fitted PCA projection.
#[derive(Debug, Clone)]
pub struct PcaModel {
    basis: DMatrix<f64>,
    energy: f64,
    rank_deficient: bool,
    mean: Option<DVector<f64>>,
    singular_values: Vec<f64>,
}

impl PcaModel {
    /// `m x m_pca` orthonormal basis.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Fraction of squared singular-value mass retained by the basis.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// True when the last retained singular value is negligible relative to
    /// the first (the requested dimension exceeds the numerical rank).
    pub fn rank_deficient(&self) -> bool {
        self.rank_deficient
    }

    /// Retained singular values, largest first.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn input_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_centered(&self) -> bool {
        self.mean.is_some()
    }

    /// Projects a dataset, keeping its labels.
    pub fn project_dataset(&self, data: &Dataset) -> Result<Dataset> {
        data.with_samples(pca_project(self, data.samples())?)
    }

    /// Writes `basis.csv` (one basis vector per row) plus `pca.json`.
    pub fn save<P: AsRef<Path>>(&self, dir: P) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut csv = String::new();
        for j in 0..self.basis.ncols() {
            let fields: Vec<String> = self
                .basis
                .column(j)
                .iter()
                .map(|v| format!("{v:.17e}"))
                .collect();
            csv.push_str(&fields.join(","));
            csv.push('\n');
        }
        std::fs::write(dir.join("basis.csv"), csv)?;
        let meta = PcaMeta {
            format: "pca-model/v1".into(),
            input_dim: self.input_dim(),
            feature_dim: self.feature_dim(),
            energy: self.energy,
            rank_deficient: self.rank_deficient,
            singular_values: self.singular_values.clone(),
            mean: self.mean.as_ref().map(|m| m.iter().cloned().collect()),
        };
        let file = std::fs::File::create(dir.join("pca.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &meta)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(dir: P) -> Result<PcaModel> {
        let dir = dir.as_ref();
        let meta: PcaMeta = serde_json::from_reader(std::io::BufReader::new(
            std::fs::File::open(dir.join("pca.json"))?,
        ))?;
        if meta.format != "pca-model/v1" {
            return Err(Error::Config(format!(
                "unsupported PCA model format `{}`",
                meta.format
            )));
        }
        let csv_path = dir.join("basis.csv");
        let text = std::fs::read_to_string(&csv_path)?;
        let mut basis = DMatrix::zeros(meta.input_dim, meta.feature_dim);
        let mut row_count = 0usize;
        for (idx, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            for (r, field) in line.split(',').enumerate() {
                if r >= meta.input_dim {
                    return Err(Error::Csv {
                        path: csv_path.display().to_string(),
                        line: idx as u64 + 1,
                        message: "too many values in basis vector".into(),
                    });
                }
                basis[(r, idx)] = field.trim().parse::<f64>().map_err(|_| Error::Csv {
                    path: csv_path.display().to_string(),
                    line: idx as u64 + 1,
                    message: format!("`{field}` is not a number"),
                })?;
            }
            row_count += 1;
        }
        if row_count != meta.feature_dim {
            return Err(Error::Config(format!(
                "expected {} basis vectors, found {row_count}",
                meta.feature_dim
            )));
        }
        Ok(PcaModel {
            basis,
            energy: meta.energy,
            rank_deficient: meta.rank_deficient,
            mean: meta.mean.map(DVector::from_vec),
            singular_values: meta.singular_values,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct PcaMeta {
    format: String,
    input_dim: usize,
    feature_dim: usize,
    energy: f64,
    rank_deficient: bool,
    singular_values: Vec<f64>,
    mean: Option<Vec<f64>>,
}

/// Fits an uncentered PCA: the basis is the top `m_pca` left singular
/// vectors of the raw training matrix.
pub fn pca_fit(train: &DMatrix<f64>, m_pca: usize) -> Result<PcaModel> {
    fit_inner(train.clone(), m_pca, None)
}

/// Centered variant: subtracts the column mean before the decomposition and
/// remembers it for projection and reconstruction.
pub fn pca_fit_centered(train: &DMatrix<f64>, m_pca: usize) -> Result<PcaModel> {
    let mean = train.column_mean();
    let mut centered = train.clone();
    for j in 0..centered.ncols() {
        let col = centered.column(j) - &mean;
        centered.set_column(j, &col);
    }
    fit_inner(centered, m_pca, Some(mean))
}

fn fit_inner(matrix: DMatrix<f64>, m_pca: usize, mean: Option<DVector<f64>>) -> Result<PcaModel> {
    let max_dim = matrix.nrows().min(matrix.ncols());
    if m_pca == 0 || m_pca > max_dim {
        return Err(Error::InvalidParameter(format!(
            "feature dimension {m_pca} must lie in 1..={max_dim}"
        )));
    }
    let svd = matrix.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma = &svd.singular_values;
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return Err(Error::InvalidParameter(
            "training matrix is identically zero".into(),
        ));
    }
    let retained: f64 = sigma.iter().take(m_pca).map(|s| s * s).sum();
    let rank_deficient = sigma[m_pca - 1] <= 1e-12 * sigma[0];

    let mut basis = u.columns(0, m_pca).into_owned();
    linalg::fix_column_signs(&mut basis);

    Ok(PcaModel {
        basis,
        energy: retained / total,
        rank_deficient,
        mean,
        singular_values: sigma.iter().take(m_pca).cloned().collect(),
    })
}

/// Projects columns into feature space: `V^T x` (after mean subtraction in
/// the centered variant).
pub fn pca_project(model: &PcaModel, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            actual: x.nrows(),
        });
    }
    match &model.mean {
        None => Ok(model.basis.tr_mul(x)),
        Some(mean) => {
            let mut centered = x.clone();
            for j in 0..centered.ncols() {
                let col = centered.column(j) - mean;
                centered.set_column(j, &col);
            }
            Ok(model.basis.tr_mul(&centered))
        }
    }
}

/// Maps feature vectors back to the input space: `V f` (plus the mean in the
/// centered variant). Together with [`pca_project`] this is the orthogonal
/// projector onto the basis span.
pub fn pca_reconstruct(model: &PcaModel, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if features.nrows() != model.feature_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.feature_dim(),
            actual: features.nrows(),
        });
    }
    let mut out = &model.basis * features;
    if let Some(mean) = &model.mean {
        for j in 0..out.ncols() {
            let col = out.column(j) + mean;
            out.set_column(j, &col);
        }
    }
    Ok(out)
}
