//! Train/test splitting, consecutive cross-validation, experiment execution,
//! and paired significance testing.
//!
//! Cross-validation follows the consecutive protocol: the neighbor count is
//! tuned first, then the error/sparsity trade-off, then the tangent
//! dimension, holding the undetermined parameters at their defaults
//! (`lambda = 0.001`, `d = 1`). Grids are shrunk automatically to the range
//! the parameter constraint admits inside the folds.

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::classify::{ClassifierKind, FittedClassifier, Params};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::preprocess;
use crate::rng;
use crate::synth::{self, SynthConfig};

/// Draws `per_class_train` random samples from every class for training and
/// sends the remainder to test. Every class must keep at least one test
/// sample.
pub fn stratified_split(
    data: &Dataset,
    per_class_train: usize,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in 0..data.n_classes() {
        let mut members = data.class_members(class);
        if members.len() <= per_class_train {
            return Err(Error::ClassTooSmall {
                class,
                size: members.len(),
                required: per_class_train + 1,
            });
        }
        members.shuffle(&mut rng::stream(seed, &[0x5b17, class as u64]));
        let (tr, te) = members.split_at(per_class_train);
        train_idx.extend_from_slice(tr);
        test_idx.extend_from_slice(te);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((data.subset(&train_idx), data.subset(&test_idx)))
}

/// Stratified fold assignment: returns `k` disjoint validation index sets.
fn stratified_folds(data: &Dataset, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut folds = vec![Vec::new(); k];
    for class in 0..data.n_classes() {
        let mut members = data.class_members(class);
        members.shuffle(&mut rng::stream(seed, &[0xf01d, class as u64]));
        for (i, idx) in members.into_iter().enumerate() {
            folds[i % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    folds
}

/// Candidate grids for cross-validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamGrids {
    pub neighbors: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub tangent_dims: Vec<usize>,
    pub ks: Vec<usize>,
}

impl Default for ParamGrids {
    fn default() -> Self {
        Self {
            neighbors: vec![1],
            lambdas: vec![1e-3],
            tangent_dims: vec![1],
            ks: vec![1],
        }
    }
}

impl ParamGrids {
    /// The declared default search space for a training set: the full
    /// feasible neighbor range, `d` up to the same bound, a small lambda
    /// ladder, and odd `k` up to five.
    pub fn defaults_for(train: &Dataset) -> ParamGrids {
        let n_max = train.min_class_size().saturating_sub(2).max(1);
        ParamGrids {
            neighbors: (1..=n_max).collect(),
            lambdas: vec![1e-4, 1e-3, 1e-2],
            tangent_dims: (1..=n_max).collect(),
            ks: vec![1, 3, 5],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Neighbors,
    Lambda,
    TangentDim,
    K,
}

fn stages_for(kind: ClassifierKind) -> &'static [Stage] {
    match kind {
        ClassifierKind::Src => &[Stage::Lambda],
        ClassifierKind::LpcaSrc => &[Stage::Neighbors, Stage::Lambda, Stage::TangentDim],
        ClassifierKind::SrcPruned => &[Stage::Neighbors, Stage::Lambda],
        ClassifierKind::Tdc1 | ClassifierKind::Tdc2 => &[Stage::Neighbors, Stage::TangentDim],
        ClassifierKind::Knn | ClassifierKind::KnnExt => &[Stage::K],
    }
}

/// Tunes the classifier's parameters on the training set, one parameter at a
/// time in the order `n`, then `lambda`, then `d` (or `k` for the neighbor
/// baselines), scoring each candidate by stratified K-fold accuracy. Ties
/// break toward the smaller value.
pub fn cross_validate(
    train: &Dataset,
    kind: ClassifierKind,
    grids: &ParamGrids,
    folds: usize,
    seed: u64,
) -> Result<Params> {
    let mut params = Params::default();
    // Fold count shrinks for tiny classes; below two usable folds the grids
    // collapse to their smallest feasible candidates.
    let k_folds = folds.min(train.min_class_size()).max(1);

    let fold_sets = if k_folds >= 2 {
        stratified_folds(train, k_folds, seed)
    } else {
        Vec::new()
    };
    // Smallest per-class size of any fold-train set, the binding constraint
    // for neighbor counts inside the folds.
    let min_fold_train_class = if fold_sets.is_empty() {
        train.min_class_size()
    } else {
        let sizes = train.class_sizes();
        let mut min_size = usize::MAX;
        for fold in &fold_sets {
            let mut val_per_class = vec![0usize; train.n_classes()];
            for &i in fold {
                val_per_class[train.class_of(i)] += 1;
            }
            for (c, &s) in sizes.iter().enumerate() {
                min_size = min_size.min(s - val_per_class[c]);
            }
        }
        min_size
    };
    let min_fold_train_total: usize =
        train.len() - fold_sets.iter().map(Vec::len).max().unwrap_or(0);

    for &stage in stages_for(kind) {
        let candidates: Vec<f64> = match stage {
            Stage::Neighbors => {
                // n must keep n + 1 strictly inside the smallest fold class
                let feasible: Vec<f64> = grids
                    .neighbors
                    .iter()
                    .filter(|&&n| n >= 1 && n + 1 < min_fold_train_class)
                    .map(|&n| n as f64)
                    .collect();
                if feasible.is_empty() {
                    return Err(Error::ParameterConstraint {
                        d: params.tangent_dim,
                        n: grids.neighbors.first().copied().unwrap_or(0),
                        class_size: min_fold_train_class,
                    });
                }
                feasible
            }
            Stage::Lambda => grids.lambdas.iter().copied().filter(|&l| l > 0.0).collect(),
            Stage::TangentDim => {
                let feasible: Vec<f64> = grids
                    .tangent_dims
                    .iter()
                    .filter(|&&d| d >= 1 && d <= params.neighbors)
                    .map(|&d| d as f64)
                    .collect();
                if feasible.is_empty() {
                    return Err(Error::ParameterConstraint {
                        d: grids.tangent_dims.first().copied().unwrap_or(0),
                        n: params.neighbors,
                        class_size: min_fold_train_class,
                    });
                }
                feasible
            }
            Stage::K => {
                let feasible: Vec<f64> = grids
                    .ks
                    .iter()
                    .filter(|&&k| k % 2 == 1 && k <= min_fold_train_total.max(1))
                    .map(|&k| k as f64)
                    .collect();
                if feasible.is_empty() {
                    return Err(Error::InvalidParameter(
                        "no feasible odd k candidate".into(),
                    ));
                }
                feasible
            }
        };
        if candidates.is_empty() {
            return Err(Error::InvalidParameter(
                "empty candidate grid in cross-validation".into(),
            ));
        }

        let mut sorted = candidates;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();

        let chosen = if sorted.len() == 1 || fold_sets.is_empty() {
            sorted[0]
        } else {
            let mut best = sorted[0];
            let mut best_score = -1.0f64;
            for &cand in &sorted {
                let trial = apply_stage(params, stage, cand);
                let score = score_folds(train, kind, &trial, &fold_sets, seed)?;
                if score > best_score {
                    best_score = score;
                    best = cand;
                }
            }
            best
        };
        params = apply_stage(params, stage, chosen);
    }

    Ok(params)
}

fn apply_stage(mut params: Params, stage: Stage, value: f64) -> Params {
    match stage {
        Stage::Neighbors => params.neighbors = value as usize,
        Stage::Lambda => params.lambda = value,
        Stage::TangentDim => params.tangent_dim = value as usize,
        Stage::K => params.k = value as usize,
    }
    params
}

/// Pooled K-fold accuracy of one candidate configuration. Prediction failures
/// count as misclassifications; fit failures are configuration errors.
fn score_folds(
    train: &Dataset,
    kind: ClassifierKind,
    params: &Params,
    fold_sets: &[Vec<usize>],
    seed: u64,
) -> Result<f64> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for (f, val_idx) in fold_sets.iter().enumerate() {
        let in_val: std::collections::HashSet<usize> = val_idx.iter().copied().collect();
        let fit_idx: Vec<usize> = (0..train.len()).filter(|i| !in_val.contains(i)).collect();
        let fit_set = train.subset(&fit_idx);
        let fitted = FittedClassifier::fit(kind, &fit_set, params, rng::mix(seed, &[f as u64]))?;
        for &i in val_idx {
            total += 1;
            if let Ok(p) = fitted.predict(&train.sample(i)) {
                if p.label == train.class_of(i) {
                    correct += 1;
                }
            }
        }
    }
    Ok(correct as f64 / total.max(1) as f64)
}

/// Where each trial's data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// A fresh synthetic realization per trial (the seed field is replaced
    /// by the per-trial seed).
    Synthetic(SynthConfig),
    /// A fresh stratified split of one dataset per trial.
    Split {
        data: Dataset,
        per_class_train: usize,
    },
    /// The same fixed split every trial.
    Fixed { train: Dataset, test: Dataset },
}

impl DataSource {
    fn realize(&self, trial_seed: u64) -> Result<(Dataset, Dataset)> {
        match self {
            DataSource::Synthetic(config) => {
                let data = synth::generate(&SynthConfig {
                    seed: trial_seed,
                    ..config.clone()
                })?;
                Ok((data.train, data.test))
            }
            DataSource::Split {
                data,
                per_class_train,
            } => stratified_split(data, *per_class_train, trial_seed),
            DataSource::Fixed { train, test } => Ok((train.clone(), test.clone())),
        }
    }

    fn summary(&self) -> SourceSummary {
        match self {
            DataSource::Synthetic(config) => SourceSummary {
                kind: "synthetic".into(),
                classes: config.classes,
                dim: config.dim(),
                per_class_train: Some(config.per_class),
                synth: Some(config.clone()),
            },
            DataSource::Split {
                data,
                per_class_train,
            } => SourceSummary {
                kind: "split".into(),
                classes: data.n_classes(),
                dim: data.dim(),
                per_class_train: Some(*per_class_train),
                synth: None,
            },
            DataSource::Fixed { train, .. } => SourceSummary {
                kind: "fixed".into(),
                classes: train.n_classes(),
                dim: train.dim(),
                per_class_train: None,
                synth: None,
            },
        }
    }
}

/// One experiment: a classifier, a data source, and the trial protocol.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub classifier: ClassifierKind,
    pub source: DataSource,
    pub trials: usize,
    pub seed: u64,
    pub grids: ParamGrids,
    pub folds: usize,
    pub m_pca: Option<usize>,
    pub parallel_trials: bool,
}

impl ExperimentConfig {
    pub fn new(classifier: ClassifierKind, source: DataSource) -> Self {
        Self {
            classifier,
            source,
            trials: 1,
            seed: 0,
            grids: ParamGrids::default(),
            folds: 5,
            m_pca: None,
            parallel_trials: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SourceSummary {
    pub kind: String,
    pub classes: usize,
    pub dim: usize,
    pub per_class_train: Option<usize>,
    pub synth: Option<SynthConfig>,
}

/// Per-trial metrics.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub accuracy: f64,
    pub runtime_ms: f64,
    pub mean_dictionary_size: f64,
    pub mean_kappa: Option<f64>,
    pub params: Params,
    pub failed_samples: usize,
    pub aborted: bool,
}

/// Aggregated experiment output. Runtime covers the offline and online
/// classification phases; cross-validation time is excluded.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub classifier: ClassifierKind,
    pub seed: u64,
    pub trials_requested: usize,
    pub folds: usize,
    pub m_pca: Option<usize>,
    pub grids: ParamGrids,
    pub source: SourceSummary,
    pub trials: Vec<TrialRecord>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_runtime_ms: f64,
    pub mean_dictionary_size: f64,
    pub mean_kappa: Option<f64>,
    pub aborted_trials: usize,
}

impl ExperimentReport {
    /// Accuracies of the non-aborted trials in trial order.
    pub fn accuracies(&self) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| !t.aborted)
            .map(|t| t.accuracy)
            .collect()
    }

    pub fn write_json<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    /// One CSV row per trial.
    pub fn write_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
        w.write_record([
            "trial",
            "accuracy",
            "runtime_ms",
            "dictionary_size",
            "kappa",
            "n",
            "lambda",
            "d",
            "k",
            "failed_samples",
            "aborted",
        ])
        .map_err(|e| Error::Config(e.to_string()))?;
        for t in &self.trials {
            w.write_record([
                t.trial.to_string(),
                format!("{:.6}", t.accuracy),
                format!("{:.3}", t.runtime_ms),
                format!("{:.2}", t.mean_dictionary_size),
                t.mean_kappa.map(|k| format!("{k:.2}")).unwrap_or_default(),
                t.params.neighbors.to_string(),
                format!("{:e}", t.params.lambda),
                t.params.tangent_dim.to_string(),
                t.params.k.to_string(),
                t.failed_samples.to_string(),
                t.aborted.to_string(),
            ])
            .map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the full trial loop: realize data, cross-validate, fit, classify
/// the test set, and aggregate. A trial aborts when more than 1% of its test
/// samples fail to classify.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }

    let run_trial = |trial: usize| -> Result<TrialRecord> {
        let trial_seed = rng::mix(config.seed, &[trial as u64]);
        let (mut train, mut test) = config.source.realize(trial_seed)?;
        if let Some(m_pca) = config.m_pca {
            let model = preprocess::pca_fit(train.samples(), m_pca)?;
            train = model.project_dataset(&train)?;
            test = model.project_dataset(&test)?;
        }

        let params = cross_validate(&train, config.classifier, &config.grids, config.folds, trial_seed)?;

        let start = Instant::now();
        let fitted = FittedClassifier::fit(config.classifier, &train, &params, trial_seed)?;
        let mut correct = 0usize;
        let mut failed = 0usize;
        let mut size_sum = 0.0f64;
        let mut kappa_sum = 0.0f64;
        let mut kappa_count = 0usize;
        for i in 0..test.len() {
            match fitted.predict(&test.sample(i)) {
                Ok(p) => {
                    if p.label == test.class_of(i) {
                        correct += 1;
                    }
                    size_sum += p.dictionary_size;
                    if let Some(k) = p.kappa {
                        kappa_sum += k as f64;
                        kappa_count += 1;
                    }
                }
                Err(_) => failed += 1,
            }
        }
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

        let attempted = test.len();
        let scored = attempted - failed;
        let aborted = failed * 100 > attempted;
        Ok(TrialRecord {
            trial,
            accuracy: correct as f64 / scored.max(1) as f64,
            runtime_ms,
            mean_dictionary_size: size_sum / scored.max(1) as f64,
            mean_kappa: (kappa_count > 0).then(|| kappa_sum / kappa_count as f64),
            params,
            failed_samples: failed,
            aborted,
        })
    };

    let trials: Vec<TrialRecord> = if config.parallel_trials {
        (0..config.trials)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<_>>()?
    } else {
        (0..config.trials).map(run_trial).collect::<Result<_>>()?
    };

    let kept: Vec<&TrialRecord> = trials.iter().filter(|t| !t.aborted).collect();
    let n = kept.len().max(1) as f64;
    let mean_accuracy = kept.iter().map(|t| t.accuracy).sum::<f64>() / n;
    let std_accuracy = if kept.len() >= 2 {
        (kept
            .iter()
            .map(|t| (t.accuracy - mean_accuracy).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    let kappas: Vec<f64> = kept.iter().filter_map(|t| t.mean_kappa).collect();

    Ok(ExperimentReport {
        classifier: config.classifier,
        seed: config.seed,
        trials_requested: config.trials,
        folds: config.folds,
        m_pca: config.m_pca,
        grids: config.grids.clone(),
        source: config.source.summary(),
        mean_accuracy,
        std_accuracy,
        mean_runtime_ms: kept.iter().map(|t| t.runtime_ms).sum::<f64>() / n,
        mean_dictionary_size: kept.iter().map(|t| t.mean_dictionary_size).sum::<f64>() / n,
        mean_kappa: (!kappas.is_empty())
            .then(|| kappas.iter().sum::<f64>() / kappas.len() as f64),
        aborted_trials: trials.len() - kept.len(),
        trials,
    })
}

/// Result of a one-sided paired t-test of `mean(a - b) > 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairedTTest {
    pub mean_difference: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    /// One-sided p-value for the alternative `mean(a - b) > 0`.
    pub p_value: f64,
    /// Symmetric two-sided interval at level `1 - alpha`.
    pub confidence_interval: (f64, f64),
    /// One-sided lower confidence bound at level `1 - alpha`.
    pub lower_bound: f64,
    /// Set when every paired difference is exactly zero.
    pub exact_equality: bool,
}

/// Paired one-sided t-test between two equally long accuracy vectors.
/// Zero-variance inputs produce an exact-equality (or exact-shift) report
/// instead of an error.
pub fn paired_t_test_one_sided(a: &[f64], b: &[f64], alpha: f64) -> Result<PairedTTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "paired t-test needs at least two pairs".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }

    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let df = n - 1.0;

    if var == 0.0 {
        // all differences identical: degenerate but well-defined behavior
        let p_value = if mean > 0.0 {
            0.0
        } else if mean < 0.0 {
            1.0
        } else {
            0.5
        };
        return Ok(PairedTTest {
            mean_difference: mean,
            t_statistic: if mean == 0.0 {
                0.0
            } else {
                mean.signum() * f64::INFINITY
            },
            degrees_of_freedom: df,
            p_value,
            confidence_interval: (mean, mean),
            lower_bound: mean,
            exact_equality: mean == 0.0,
        });
    }

    let se = (var / n).sqrt();
    let t = mean / se;
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?;
    let p_value = 1.0 - dist.cdf(t);
    let q_two = dist.inverse_cdf(1.0 - alpha / 2.0);
    let q_one = dist.inverse_cdf(1.0 - alpha);

    Ok(PairedTTest {
        mean_difference: mean,
        t_statistic: t,
        degrees_of_freedom: df,
        p_value,
        confidence_interval: (mean - q_two * se, mean + q_two * se),
        lower_bound: mean - q_one * se,
        exact_equality: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn toy_dataset(per_class: usize) -> Dataset {
        let classes = 2;
        let mut samples = DMatrix::zeros(3, per_class * classes);
        let mut labels = Vec::new();
        let mut col = 0;
        for c in 0..classes {
            for k in 0..per_class {
                let t = 2.0 * std::f64::consts::PI * k as f64 / per_class as f64;
                samples[(0, col)] = (t + 0.8 * c as f64).cos();
                samples[(1, col)] = (t + 0.8 * c as f64).sin();
                samples[(2, col)] = 0.3 * (2.0 * t).sin();
                labels.push(c as i64);
                col += 1;
            }
        }
        Dataset::new(samples, &labels).unwrap()
    }

    #[test]
    fn split_is_exact_disjoint_and_reproducible() {
        let data = toy_dataset(10);
        let (train, test) = stratified_split(&data, 5, 77).unwrap();
        assert_eq!(train.class_sizes(), vec![5, 5]);
        assert_eq!(test.class_sizes(), vec![5, 5]);

        let (train2, _) = stratified_split(&data, 5, 77).unwrap();
        assert_eq!(train.samples(), train2.samples());

        // disjointness: no training column equals a test column
        for i in 0..train.len() {
            for j in 0..test.len() {
                assert!((train.sample(i) - test.sample(j)).norm() > 0.0);
            }
        }
    }

    #[test]
    fn split_rejects_too_small_classes() {
        let data = toy_dataset(4);
        assert!(matches!(
            stratified_split(&data, 4, 0),
            Err(Error::ClassTooSmall { .. })
        ));
    }

    #[test]
    fn single_candidate_grids_pass_through() {
        let data = toy_dataset(8);
        let grids = ParamGrids {
            neighbors: vec![3],
            lambdas: vec![0.005],
            tangent_dims: vec![1],
            ks: vec![1],
        };
        let params = cross_validate(&data, ClassifierKind::LpcaSrc, &grids, 5, 1).unwrap();
        assert_eq!(params.neighbors, 3);
        assert_eq!(params.lambda, 0.005);
        assert_eq!(params.tangent_dim, 1);
    }

    #[test]
    fn infeasible_tangent_dims_are_excluded() {
        let data = toy_dataset(8);
        let grids = ParamGrids {
            neighbors: vec![2],
            lambdas: vec![1e-3],
            tangent_dims: vec![1, 2, 4, 5], // 4 and 5 exceed n = 2
            ks: vec![1],
        };
        let params = cross_validate(&data, ClassifierKind::LpcaSrc, &grids, 4, 3).unwrap();
        assert!(params.tangent_dim <= params.neighbors);
    }

    #[test]
    fn neighbor_grid_shrinks_to_fold_feasible_range() {
        // per_class = 5 with 5 folds leaves fold-train classes of 4, so
        // n <= 2; the infeasible candidates must be dropped, not scored.
        let data = toy_dataset(5);
        let grids = ParamGrids {
            neighbors: vec![1, 2, 3, 8, 20],
            lambdas: vec![1e-3],
            tangent_dims: vec![1],
            ks: vec![1],
        };
        let params = cross_validate(&data, ClassifierKind::LpcaSrc, &grids, 5, 3).unwrap();
        assert!(params.neighbors <= 2);
    }

    #[test]
    fn t_test_equal_vectors_hit_the_boundary() {
        let a = vec![0.8, 0.9, 0.7, 0.85];
        let t = paired_t_test_one_sided(&a, &a, 0.05).unwrap();
        assert!(t.exact_equality);
        assert_abs_diff_eq!(t.p_value, 0.5, epsilon = 1e-15);
        assert_eq!(t.confidence_interval, (0.0, 0.0));
    }

    #[test]
    fn t_test_constant_shift_contains_shift() {
        let b = vec![0.70, 0.72, 0.69, 0.71, 0.73, 0.68];
        let a: Vec<f64> = b
            .iter()
            .enumerate()
            .map(|(i, x)| x + 0.03 + 1e-4 * ((i % 3) as f64 - 1.0))
            .collect();
        let t = paired_t_test_one_sided(&a, &b, 0.05).unwrap();
        assert!(t.confidence_interval.0 < 0.03 && 0.03 < t.confidence_interval.1);
        assert!(t.p_value < 0.05);
        assert!(t.lower_bound > 0.0);
    }

    #[test]
    fn experiment_smoke_and_determinism() {
        let config = ExperimentConfig {
            trials: 2,
            seed: 5,
            grids: ParamGrids {
                neighbors: vec![2],
                lambdas: vec![1e-3],
                tangent_dims: vec![1],
                ks: vec![1],
            },
            ..ExperimentConfig::new(
                ClassifierKind::LpcaSrc,
                DataSource::Synthetic(SynthConfig {
                    per_class: 6,
                    noise: 0.01,
                    ..SynthConfig::default()
                }),
            )
        };
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.trials.len(), 2);
        assert_eq!(a.mean_accuracy, b.mean_accuracy);
        assert_eq!(a.trials[0].accuracy, b.trials[0].accuracy);
        assert_eq!(a.aborted_trials, 0);

        // report means equal recomputation from the stored per-trial vector
        let recomputed =
            a.trials.iter().map(|t| t.accuracy).sum::<f64>() / a.trials.len() as f64;
        assert_abs_diff_eq!(a.mean_accuracy, recomputed, epsilon = 1e-12);
    }

    #[test]
    fn accuracy_is_invariant_under_test_permutation() {
        let data = synth::generate(&SynthConfig {
            per_class: 8,
            noise: 0.005,
            seed: 2,
            ..SynthConfig::default()
        })
        .unwrap();
        let fitted = FittedClassifier::fit(
            ClassifierKind::Src,
            &data.train,
            &Params::default(),
            0,
        )
        .unwrap();
        let evaluate = |test: &Dataset| {
            let mut correct = 0;
            for i in 0..test.len() {
                if fitted.predict(&test.sample(i)).unwrap().label == test.class_of(i) {
                    correct += 1;
                }
            }
            correct
        };
        let forward = evaluate(&data.test);
        let permuted: Vec<usize> = (0..data.test.len()).rev().collect();
        let reversed = evaluate(&data.test.subset(&permuted));
        assert_eq!(forward, reversed);
    }
}
