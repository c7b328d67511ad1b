//! The seven classifiers: SRC, LPCA-SRC, pruned SRC, two tangent distance
//! classifiers, and the nearest-neighbor baselines.
//!
//! All SRC-family classifiers decompose the (normalized) test sample over a
//! dictionary via the homotopy solver and assign the class whose columns
//! reconstruct it with the smallest residual. The TDC variants replace
//! sparse coding with orthogonal projections onto per-class or per-sample
//! tangent subdictionaries built from unnormalized data. Ties always break
//! toward the lowest class index.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dictionary::{self, DictionaryConfig, ExtendedDictionary};
use crate::error::{Error, Result};
use crate::linalg;
use crate::solver::{self, SolverOptions};

/// The output of one classification.
#[derive(Debug, Clone)]
pub struct Prediction {
    /// Winning class index (argmin of `class_residuals`, lowest index on
    /// ties).
    pub label: usize,
    /// One residual per class.
    pub class_residuals: Vec<f64>,
    /// Homotopy breakpoints used, when sparse coding was involved.
    pub kappa: Option<usize>,
    /// Size of the dictionary this sample was decomposed over (mean
    /// subdictionary width for the TDC methods).
    pub dictionary_size: f64,
}

/// Classifier selector; the names double as the CLI-facing identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    Src,
    LpcaSrc,
    SrcPruned,
    Tdc1,
    Tdc2,
    Knn,
    KnnExt,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 7] = [
        ClassifierKind::Src,
        ClassifierKind::LpcaSrc,
        ClassifierKind::SrcPruned,
        ClassifierKind::Tdc1,
        ClassifierKind::Tdc2,
        ClassifierKind::Knn,
        ClassifierKind::KnnExt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Src => "src",
            ClassifierKind::LpcaSrc => "lpca-src",
            ClassifierKind::SrcPruned => "src-pruned",
            ClassifierKind::Tdc1 => "tdc1",
            ClassifierKind::Tdc2 => "tdc2",
            ClassifierKind::Knn => "knn",
            ClassifierKind::KnnExt => "knn-ext",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown classifier `{s}` (expected one of src, lpca-src, src-pruned, tdc1, tdc2, knn, knn-ext)"
                ))
            })
    }
}

/// Hyperparameters shared by the classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Local-PCA neighbor count `n`.
    pub neighbors: usize,
    /// Error/sparsity trade-off.
    pub lambda: f64,
    /// Tangent-hyperplane dimension estimate `d`.
    pub tangent_dim: usize,
    /// Neighbor count of the kNN baselines (odd).
    pub k: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            neighbors: 1,
            lambda: 1e-3,
            tangent_dim: 1,
            k: 1,
        }
    }
}

/// A classifier fitted to one training set; the offline phase happens once
/// in [`FittedClassifier::fit`], predictions are then read-only.
#[derive(Debug, Clone)]
pub enum FittedClassifier {
    Src {
        dictionary: DMatrix<f64>,
        labels: Vec<usize>,
        n_classes: usize,
        lambda: f64,
    },
    LpcaSrc {
        dict: ExtendedDictionary,
        lambda: f64,
    },
    SrcPruned {
        dict: ExtendedDictionary,
        lambda: f64,
    },
    Tdc1 {
        dict: ExtendedDictionary,
    },
    Tdc2 {
        dict: ExtendedDictionary,
    },
    Knn {
        samples: DMatrix<f64>,
        labels: Vec<usize>,
        n_classes: usize,
        k: usize,
    },
    KnnExt {
        dict: ExtendedDictionary,
        k: usize,
    },
}

impl FittedClassifier {
    /// Runs the offline phase of `kind` on `train`.
    pub fn fit(
        kind: ClassifierKind,
        train: &Dataset,
        params: &Params,
        seed: u64,
    ) -> Result<FittedClassifier> {
        match kind {
            ClassifierKind::Src => {
                let mut dictionary = train.samples().clone();
                linalg::normalize_columns(&mut dictionary)?;
                Ok(FittedClassifier::Src {
                    dictionary,
                    labels: train.class_indices().to_vec(),
                    n_classes: train.n_classes(),
                    lambda: params.lambda,
                })
            }
            ClassifierKind::LpcaSrc => Ok(FittedClassifier::LpcaSrc {
                dict: dictionary::build_extended(
                    train,
                    params.tangent_dim,
                    params.neighbors,
                    seed,
                )?,
                lambda: params.lambda,
            }),
            ClassifierKind::SrcPruned => Ok(FittedClassifier::SrcPruned {
                dict: dictionary::build_with(
                    train,
                    &DictionaryConfig {
                        tangent_dim: 0,
                        neighbors: params.neighbors,
                        seed,
                        normalize: true,
                        include_tangents: false,
                    },
                )?,
                lambda: params.lambda,
            }),
            ClassifierKind::Tdc1 | ClassifierKind::Tdc2 => {
                let dict = dictionary::build_with(
                    train,
                    &DictionaryConfig {
                        tangent_dim: params.tangent_dim,
                        neighbors: params.neighbors,
                        seed,
                        normalize: false,
                        include_tangents: true,
                    },
                )?;
                Ok(match kind {
                    ClassifierKind::Tdc1 => FittedClassifier::Tdc1 { dict },
                    _ => FittedClassifier::Tdc2 { dict },
                })
            }
            ClassifierKind::Knn => {
                if params.k % 2 == 0 || params.k == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "k must be odd and positive, got {}",
                        params.k
                    )));
                }
                Ok(FittedClassifier::Knn {
                    samples: train.samples().clone(),
                    labels: train.class_indices().to_vec(),
                    n_classes: train.n_classes(),
                    k: params.k,
                })
            }
            ClassifierKind::KnnExt => {
                if params.k % 2 == 0 || params.k == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "k must be odd and positive, got {}",
                        params.k
                    )));
                }
                Ok(FittedClassifier::KnnExt {
                    dict: dictionary::build_with(
                        train,
                        &DictionaryConfig {
                            tangent_dim: params.tangent_dim,
                            neighbors: params.neighbors,
                            seed,
                            normalize: false,
                            include_tangents: true,
                        },
                    )?,
                    k: params.k,
                })
            }
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            FittedClassifier::Src { .. } => ClassifierKind::Src,
            FittedClassifier::LpcaSrc { .. } => ClassifierKind::LpcaSrc,
            FittedClassifier::SrcPruned { .. } => ClassifierKind::SrcPruned,
            FittedClassifier::Tdc1 { .. } => ClassifierKind::Tdc1,
            FittedClassifier::Tdc2 { .. } => ClassifierKind::Tdc2,
            FittedClassifier::Knn { .. } => ClassifierKind::Knn,
            FittedClassifier::KnnExt { .. } => ClassifierKind::KnnExt,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            FittedClassifier::Src { n_classes, .. } | FittedClassifier::Knn { n_classes, .. } => {
                *n_classes
            }
            FittedClassifier::LpcaSrc { dict, .. }
            | FittedClassifier::SrcPruned { dict, .. }
            | FittedClassifier::Tdc1 { dict }
            | FittedClassifier::Tdc2 { dict }
            | FittedClassifier::KnnExt { dict, .. } => dict.n_classes(),
        }
    }

    /// Classifies one test sample.
    pub fn predict(&self, y: &DVector<f64>) -> Result<Prediction> {
        match self {
            FittedClassifier::Src {
                dictionary,
                labels,
                n_classes,
                lambda,
            } => predict_src_on(dictionary, labels, *n_classes, y, *lambda),
            FittedClassifier::LpcaSrc { dict, lambda }
            | FittedClassifier::SrcPruned { dict, lambda } => {
                predict_pruned_src_on(dict, y, *lambda)
            }
            FittedClassifier::Tdc1 { dict } => predict_tdc_on(dict, y, TdcSplit::PerClass),
            FittedClassifier::Tdc2 { dict } => predict_tdc_on(dict, y, TdcSplit::PerSample),
            FittedClassifier::Knn {
                samples,
                labels,
                n_classes,
                k,
            } => predict_knn_on(samples, labels, *n_classes, *k, y),
            FittedClassifier::KnnExt { dict, k } => {
                predict_knn_on(dict.columns(), dict.labels(), dict.n_classes(), *k, y)
            }
        }
    }
}

/// SRC: sparse decomposition of the normalized test sample over all
/// normalized training samples.
pub fn classify_src(train: &Dataset, y: &DVector<f64>, lambda: f64) -> Result<Prediction> {
    FittedClassifier::fit(
        ClassifierKind::Src,
        train,
        &Params {
            lambda,
            ..Params::default()
        },
        0,
    )?
    .predict(y)
}

/// LPCA-SRC: sparse decomposition over the pruned extended dictionary.
pub fn classify_lpca_src(
    dict: &ExtendedDictionary,
    y: &DVector<f64>,
    lambda: f64,
) -> Result<Prediction> {
    predict_pruned_src_on(dict, y, lambda)
}

/// Pruned SRC: LPCA-SRC without tangent vectors.
pub fn classify_src_pruned(
    train: &Dataset,
    y: &DVector<f64>,
    lambda: f64,
    n: usize,
) -> Result<Prediction> {
    FittedClassifier::fit(
        ClassifierKind::SrcPruned,
        train,
        &Params {
            neighbors: n,
            lambda,
            ..Params::default()
        },
        0,
    )?
    .predict(y)
}

/// Tangent distance classification with per-class subdictionaries.
pub fn classify_tdc1(train: &Dataset, y: &DVector<f64>, d: usize, n: usize) -> Result<Prediction> {
    FittedClassifier::fit(
        ClassifierKind::Tdc1,
        train,
        &Params {
            neighbors: n,
            tangent_dim: d,
            ..Params::default()
        },
        0,
    )?
    .predict(y)
}

/// Tangent distance classification with per-sample subdictionaries.
pub fn classify_tdc2(train: &Dataset, y: &DVector<f64>, d: usize, n: usize) -> Result<Prediction> {
    FittedClassifier::fit(
        ClassifierKind::Tdc2,
        train,
        &Params {
            neighbors: n,
            tangent_dim: d,
            ..Params::default()
        },
        0,
    )?
    .predict(y)
}

/// Majority vote over the k nearest training samples.
pub fn classify_knn(train: &Dataset, y: &DVector<f64>, k: usize) -> Result<Prediction> {
    FittedClassifier::fit(
        ClassifierKind::Knn,
        train,
        &Params {
            k,
            ..Params::default()
        },
        0,
    )?
    .predict(y)
}

/// Majority vote over the k nearest columns of an (unnormalized) extended
/// dictionary.
pub fn classify_knn_ext(dict: &ExtendedDictionary, y: &DVector<f64>, k: usize) -> Result<Prediction> {
    if k % 2 == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "k must be odd and positive, got {k}"
        )));
    }
    predict_knn_on(dict.columns(), dict.labels(), dict.n_classes(), k, y)
}

fn predict_src_on(
    dictionary: &DMatrix<f64>,
    labels: &[usize],
    n_classes: usize,
    y: &DVector<f64>,
    lambda: f64,
) -> Result<Prediction> {
    let y = linalg::normalized(y)?;
    let solution = solver::solve_lasso_on(dictionary, &y, lambda, &SolverOptions::default())?;
    let class_residuals =
        residuals_by_class(dictionary, labels, n_classes, &y, &solution.coefficients);
    Ok(Prediction {
        label: argmin(&class_residuals),
        class_residuals,
        kappa: Some(solution.iterations),
        dictionary_size: dictionary.ncols() as f64,
    })
}

fn predict_pruned_src_on(
    dict: &ExtendedDictionary,
    y: &DVector<f64>,
    lambda: f64,
) -> Result<Prediction> {
    let y = linalg::normalized(y)?;
    let pruned = dictionary::prune(dict, &y)?;
    let solution =
        solver::solve_lasso_on(&pruned.columns, &y, lambda, &SolverOptions::default())?;
    let class_residuals = residuals_by_class(
        &pruned.columns,
        &pruned.labels,
        dict.n_classes(),
        &y,
        &solution.coefficients,
    );
    Ok(Prediction {
        label: argmin(&class_residuals),
        class_residuals,
        kappa: Some(solution.iterations),
        dictionary_size: pruned.width() as f64,
    })
}

enum TdcSplit {
    PerClass,
    PerSample,
}

fn predict_tdc_on(dict: &ExtendedDictionary, y: &DVector<f64>, split: TdcSplit) -> Result<Prediction> {
    let pruned = dictionary::prune(dict, y)?;
    let n_classes = dict.n_classes();
    let y_norm = y.norm();

    let mut class_residuals = vec![y_norm; n_classes];
    let mut widths: Vec<usize> = Vec::new();
    match split {
        TdcSplit::PerClass => {
            for class in 0..n_classes {
                let cols: Vec<usize> = (0..pruned.width())
                    .filter(|&j| pruned.labels[j] == class)
                    .collect();
                if cols.is_empty() {
                    continue;
                }
                widths.push(cols.len());
                let mut portion = DMatrix::zeros(dict.dim(), cols.len());
                for (j, &c) in cols.iter().enumerate() {
                    portion.set_column(j, &pruned.columns.column(c));
                }
                class_residuals[class] = projection_residual(&portion, y);
            }
        }
        TdcSplit::PerSample => {
            for (block, range) in pruned.block_spans() {
                let class = dict.blocks()[block].class;
                let width = range.len();
                widths.push(width);
                let portion = pruned.columns.columns(range.start, width).into_owned();
                let residual = projection_residual(&portion, y);
                if residual < class_residuals[class] {
                    class_residuals[class] = residual;
                }
            }
        }
    }

    let mean_width = if widths.is_empty() {
        0.0
    } else {
        widths.iter().sum::<usize>() as f64 / widths.len() as f64
    };
    Ok(Prediction {
        label: argmin(&class_residuals),
        class_residuals,
        kappa: None,
        dictionary_size: mean_width,
    })
}

fn predict_knn_on(
    columns: &DMatrix<f64>,
    labels: &[usize],
    n_classes: usize,
    k: usize,
    y: &DVector<f64>,
) -> Result<Prediction> {
    if k > columns.ncols() {
        return Err(Error::NotEnoughNeighbors {
            requested: k,
            available: columns.ncols(),
        });
    }
    let mut order: Vec<(f64, usize)> = (0..columns.ncols())
        .map(|j| ((columns.column(j) - y).norm(), j))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-NaN").then(a.1.cmp(&b.1)));
    order.truncate(k);

    let mut votes = vec![0usize; n_classes];
    let mut summed = vec![0.0f64; n_classes];
    for &(dist, j) in &order {
        votes[labels[j]] += 1;
        summed[labels[j]] += dist;
    }

    // Encode (votes desc, summed distance asc) as residuals so the argmin
    // contract holds: the vote deficit dominates, the bracketed distance
    // term breaks vote ties.
    let max_summed = summed.iter().cloned().fold(0.0f64, f64::max);
    let class_residuals: Vec<f64> = (0..n_classes)
        .map(|c| (k - votes[c]) as f64 + summed[c] / (1.0 + max_summed))
        .collect();
    Ok(Prediction {
        label: argmin(&class_residuals),
        class_residuals,
        kappa: None,
        dictionary_size: columns.ncols() as f64,
    })
}

/// Per-class reconstruction residuals `|| y - D delta_l(alpha) ||`.
fn residuals_by_class(
    columns: &DMatrix<f64>,
    labels: &[usize],
    n_classes: usize,
    y: &DVector<f64>,
    alpha: &DVector<f64>,
) -> Vec<f64> {
    let m = columns.nrows();
    let mut approx = vec![DVector::<f64>::zeros(m); n_classes];
    for j in 0..columns.ncols() {
        let a = alpha[j];
        if a != 0.0 {
            approx[labels[j]].axpy(a, &columns.column(j), 1.0);
        }
    }
    approx.iter().map(|rec| (y - rec).norm()).collect()
}

/// Orthogonal-projection residual of `y` onto the column span, with a
/// rank-revealing QR at relative tolerance 1e-10.
fn projection_residual(columns: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    if columns.ncols() == 0 {
        return y.norm();
    }
    let qr = columns.clone().col_piv_qr();
    let r = qr.r();
    let q = qr.q();
    let lead = r[(0, 0)].abs();
    if lead == 0.0 {
        return y.norm();
    }
    let max_rank = r.nrows().min(r.ncols());
    let rank = (0..max_rank)
        .take_while(|&i| r[(i, i)].abs() > 1e-10 * lead)
        .count();
    if rank == 0 {
        return y.norm();
    }
    let q_r = q.columns(0, rank);
    let projected = &q_r * (q_r.tr_mul(y));
    (y - projected).norm()
}

fn argmin(residuals: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, &r) in residuals.iter().enumerate() {
        if r < residuals[best] {
            best = i;
        }
    }
    best
}
