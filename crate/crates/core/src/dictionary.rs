//! Extended-dictionary construction and test-adaptive pruning.
//!
//! The offline phase computes a tangent basis at every training sample,
//! scales each basis vector by `c = r * gamma` (one uniform draw per sample,
//! `r` the median neighborhood radius), shifts it by the sample, and collects
//! sample-plus-tangent-vector blocks into one dictionary matrix. The online
//! phase keeps only the blocks whose training sample lies within `r` of the
//! test sample (up to sign), falling back to the closest block when none
//! would survive.

use std::ops::Range;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lpca;
use crate::rng;

/// Build options; [`build_extended`] covers the common case.
#[derive(Debug, Clone)]
pub struct DictionaryConfig {
    /// Tangent-hyperplane dimension estimate `d`.
    pub tangent_dim: usize,
    /// Local-PCA neighbor count `n`.
    pub neighbors: usize,
    /// Seed of the per-sample scale draws.
    pub seed: u64,
    /// Normalize training samples and block columns to unit norm.
    pub normalize: bool,
    /// Emit tangent vectors; `false` leaves one column per training sample
    /// (the pruned-SRC dictionary).
    pub include_tangents: bool,
}

/// One training sample together with its scaled-and-shifted tangent vectors.
#[derive(Debug, Clone)]
pub struct TangentBlock {
    /// Class index `l`.
    pub class: usize,
    /// Position `i` of the sample within its class.
    pub index_in_class: usize,
    /// Column of the sample in the training matrix.
    pub train_column: usize,
    /// Tangent scale `c = r * gamma`; zero when the block has no tangent
    /// columns.
    pub scale: f64,
    /// `m x (basis_rank + 1)` block; the training sample is the last column.
    pub columns: DMatrix<f64>,
    /// Number of tangent vectors actually emitted (rank of the local basis).
    pub basis_rank: usize,
}

impl TangentBlock {
    pub fn width(&self) -> usize {
        self.columns.ncols()
    }

    /// The training sample carried by this block.
    pub fn sample(&self) -> DVector<f64> {
        self.columns.column(self.columns.ncols() - 1).into_owned()
    }
}

/// The offline dictionary: all blocks, their concatenation, and the pruning
/// radius learned from the training data.
#[derive(Debug, Clone)]
pub struct ExtendedDictionary {
    blocks: Vec<TangentBlock>,
    columns: DMatrix<f64>,
    labels: Vec<usize>,
    block_of_column: Vec<usize>,
    pruning_radius: f64,
    radii: Vec<f64>,
    normalized: bool,
    n_classes: usize,
    class_labels: Vec<i64>,
    config: DictionaryConfig,
}

/// A test-adapted sub-dictionary.
#[derive(Debug, Clone)]
pub struct PrunedDictionary {
    pub columns: DMatrix<f64>,
    /// Class index per column.
    pub labels: Vec<usize>,
    /// Indices of the surviving blocks in the parent dictionary.
    pub retained_blocks: Vec<usize>,
    /// Parent block index per column.
    pub block_of_column: Vec<usize>,
    /// True when the radius had to grow to reach the closest sample.
    pub fallback_used: bool,
    /// The radius actually applied: `max(median radius, closest distance)`.
    pub effective_radius: f64,
}

impl PrunedDictionary {
    pub fn width(&self) -> usize {
        self.columns.ncols()
    }

    /// Column ranges grouped by parent block, in retained order.
    pub fn block_spans(&self) -> Vec<(usize, Range<usize>)> {
        let mut spans = Vec::new();
        let mut start = 0usize;
        while start < self.block_of_column.len() {
            let block = self.block_of_column[start];
            let mut end = start;
            while end < self.block_of_column.len() && self.block_of_column[end] == block {
                end += 1;
            }
            spans.push((block, start..end));
            start = end;
        }
        spans
    }
}

impl ExtendedDictionary {
    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn blocks(&self) -> &[TangentBlock] {
        &self.blocks
    }

    pub fn block_of_column(&self) -> &[usize] {
        &self.block_of_column
    }

    /// Median distance to the (n+1)st same-class neighbor.
    pub fn pruning_radius(&self) -> f64 {
        self.pruning_radius
    }

    /// Per-sample neighborhood radii, in block order.
    pub fn sample_radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn class_labels(&self) -> &[i64] {
        &self.class_labels
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn config(&self) -> &DictionaryConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.columns.ncols()
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    /// Replaces the pruning radius (used to disable pruning in reductions).
    pub fn override_pruning_radius(&mut self, radius: f64) {
        self.pruning_radius = radius;
    }
}

/// Builds the normalized extended dictionary with tangent vectors.
pub fn build_extended(train: &Dataset, d: usize, n: usize, seed: u64) -> Result<ExtendedDictionary> {
    build_with(
        train,
        &DictionaryConfig {
            tangent_dim: d,
            neighbors: n,
            seed,
            normalize: true,
            include_tangents: true,
        },
    )
}

/// Builds an extended dictionary under explicit options.
pub fn build_with(train: &Dataset, config: &DictionaryConfig) -> Result<ExtendedDictionary> {
    let n = config.neighbors;
    let d = config.tangent_dim;
    let mut samples = train.samples().clone();
    if config.normalize {
        linalg::normalize_columns(&mut samples)?;
    }

    // Per-sample tangent bases and neighborhood radii, class by class.
    struct Prepared {
        class: usize,
        index_in_class: usize,
        train_column: usize,
        basis: DMatrix<f64>,
        radius: f64,
    }
    let mut prepared: Vec<Prepared> = Vec::with_capacity(train.len());
    for class in 0..train.n_classes() {
        let members = train.class_members(class);
        let class_size = members.len();
        if config.include_tangents {
            if !(1 <= d && d <= n && n + 1 < class_size) {
                return Err(Error::ParameterConstraint {
                    d,
                    n,
                    class_size,
                });
            }
        } else if !(1 <= n && n + 1 < class_size) {
            return Err(Error::ParameterConstraint {
                d: 0,
                n,
                class_size,
            });
        }
        let mut points = DMatrix::zeros(samples.nrows(), class_size);
        for (j, &col) in members.iter().enumerate() {
            points.set_column(j, &samples.column(col));
        }
        for (i, &col) in members.iter().enumerate() {
            if config.include_tangents {
                let tb = lpca::tangent_basis(&points, i, d, n).map_err(|e| match e {
                    Error::DegenerateNeighborhood { sample, .. } => {
                        Error::DegenerateNeighborhood { class, sample }
                    }
                    other => other,
                })?;
                prepared.push(Prepared {
                    class,
                    index_in_class: i,
                    train_column: col,
                    basis: tb.basis,
                    radius: tb.neighborhood_radius,
                });
            } else {
                let (_, dist) = lpca::nearest_neighbors(&points, i, n + 1)?;
                let radius = dist[n];
                if radius * radius <= 1e-24 {
                    return Err(Error::DegenerateNeighborhood { class, sample: i });
                }
                prepared.push(Prepared {
                    class,
                    index_in_class: i,
                    train_column: col,
                    basis: DMatrix::zeros(samples.nrows(), 0),
                    radius,
                });
            }
        }
    }

    let radii: Vec<f64> = prepared.iter().map(|p| p.radius).collect();
    let pruning_radius = linalg::median(&radii);

    // One scale draw per training sample, keyed by (seed, class, index), so
    // the build is reproducible regardless of evaluation order.
    let mut blocks = Vec::with_capacity(prepared.len());
    for p in &prepared {
        let sample = samples.column(p.train_column).into_owned();
        let rank = p.basis.ncols();
        let (scale, mut columns) = if config.include_tangents {
            let gamma: f64 = rng::stream(config.seed, &[p.class as u64, p.index_in_class as u64])
                .random();
            let scale = pruning_radius * gamma;
            let mut cols = DMatrix::zeros(samples.nrows(), rank + 1);
            for k in 0..rank {
                cols.set_column(k, &(p.basis.column(k) * scale + &sample));
            }
            cols.set_column(rank, &sample);
            (scale, cols)
        } else {
            let mut cols = DMatrix::zeros(samples.nrows(), 1);
            cols.set_column(0, &sample);
            (0.0, cols)
        };
        if config.normalize {
            linalg::normalize_columns(&mut columns).map_err(|_| Error::DegenerateNeighborhood {
                class: p.class,
                sample: p.index_in_class,
            })?;
        }
        blocks.push(TangentBlock {
            class: p.class,
            index_in_class: p.index_in_class,
            train_column: p.train_column,
            scale,
            columns,
            basis_rank: rank,
        });
    }

    Ok(assemble(
        blocks,
        pruning_radius,
        radii,
        config.clone(),
        train.n_classes(),
        train.class_labels().to_vec(),
    ))
}

fn assemble(
    blocks: Vec<TangentBlock>,
    pruning_radius: f64,
    radii: Vec<f64>,
    config: DictionaryConfig,
    n_classes: usize,
    class_labels: Vec<i64>,
) -> ExtendedDictionary {
    let m = blocks[0].columns.nrows();
    let total: usize = blocks.iter().map(TangentBlock::width).sum();
    let mut columns = DMatrix::zeros(m, total);
    let mut labels = Vec::with_capacity(total);
    let mut block_of_column = Vec::with_capacity(total);
    let mut cursor = 0usize;
    for (b, block) in blocks.iter().enumerate() {
        for j in 0..block.width() {
            columns.set_column(cursor, &block.columns.column(j));
            labels.push(block.class);
            block_of_column.push(b);
            cursor += 1;
        }
    }
    ExtendedDictionary {
        blocks,
        columns,
        labels,
        block_of_column,
        pruning_radius,
        radii,
        normalized: config.normalize,
        n_classes,
        class_labels,
        config,
    }
}

/// Prunes the dictionary relative to a test sample: a block survives when its
/// training sample (or its negative) lies within the pruning radius of `y`.
/// The radius grows to the closest-sample distance when necessary, so the
/// result is never empty.
pub fn prune(dict: &ExtendedDictionary, y: &DVector<f64>) -> Result<PrunedDictionary> {
    if y.len() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            actual: y.len(),
        });
    }
    if dict.normalized && (y.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "test sample must be unit-norm for a normalized dictionary (norm = {})",
            y.norm()
        )));
    }

    // Distance to each block's sample up to sign.
    let distances: Vec<f64> = dict
        .blocks
        .iter()
        .map(|b| {
            let x = b.columns.column(b.width() - 1);
            let d_plus = (y - &x).norm();
            let d_minus = (y + x).norm();
            d_plus.min(d_minus)
        })
        .collect();
    let closest = distances
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let r1 = dict.pruning_radius;
    let effective_radius = r1.max(closest);
    let fallback_used = closest > r1;

    let retained_blocks: Vec<usize> = (0..dict.blocks.len())
        .filter(|&b| distances[b] <= effective_radius)
        .collect();
    debug_assert!(!retained_blocks.is_empty());

    let width: usize = retained_blocks
        .iter()
        .map(|&b| dict.blocks[b].width())
        .sum();
    let mut columns = DMatrix::zeros(dict.dim(), width);
    let mut labels = Vec::with_capacity(width);
    let mut block_of_column = Vec::with_capacity(width);
    let mut cursor = 0usize;
    for &b in &retained_blocks {
        let block = &dict.blocks[b];
        for j in 0..block.width() {
            columns.set_column(cursor, &block.columns.column(j));
            labels.push(block.class);
            block_of_column.push(b);
            cursor += 1;
        }
    }

    Ok(PrunedDictionary {
        columns,
        labels,
        retained_blocks,
        block_of_column,
        fallback_used,
        effective_radius,
    })
}

#[derive(Serialize, Deserialize)]
struct BlockMeta {
    class: usize,
    index_in_class: usize,
    train_column: usize,
    scale: f64,
    basis_rank: usize,
    width: usize,
}

#[derive(Serialize, Deserialize)]
struct DictionaryMeta {
    format: String,
    dim: usize,
    n_classes: usize,
    class_labels: Vec<i64>,
    pruning_radius: f64,
    radii: Vec<f64>,
    normalized: bool,
    tangent_dim: usize,
    neighbors: usize,
    seed: u64,
    include_tangents: bool,
    blocks: Vec<BlockMeta>,
}

impl ExtendedDictionary {
    /// Writes the dictionary as `columns.csv` (one column per row) plus a
    /// `dictionary.json` sidecar holding labels, radii, and the block map.
    pub fn save<P: AsRef<Path>>(&self, dir: P) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut csv = String::new();
        for j in 0..self.columns.ncols() {
            let fields: Vec<String> = self
                .columns
                .column(j)
                .iter()
                .map(|v| format!("{v:.17e}"))
                .collect();
            csv.push_str(&fields.join(","));
            csv.push('\n');
        }
        std::fs::write(dir.join("columns.csv"), csv)?;

        let meta = DictionaryMeta {
            format: "extended-dictionary/v1".into(),
            dim: self.dim(),
            n_classes: self.n_classes,
            class_labels: self.class_labels.clone(),
            pruning_radius: self.pruning_radius,
            radii: self.radii.clone(),
            normalized: self.normalized,
            tangent_dim: self.config.tangent_dim,
            neighbors: self.config.neighbors,
            seed: self.config.seed,
            include_tangents: self.config.include_tangents,
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockMeta {
                    class: b.class,
                    index_in_class: b.index_in_class,
                    train_column: b.train_column,
                    scale: b.scale,
                    basis_rank: b.basis_rank,
                    width: b.width(),
                })
                .collect(),
        };
        let file = std::fs::File::create(dir.join("dictionary.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &meta)?;
        Ok(())
    }

    /// Loads a dictionary written by [`ExtendedDictionary::save`].
    pub fn load<P: AsRef<Path>>(dir: P) -> Result<ExtendedDictionary> {
        let dir = dir.as_ref();
        let meta: DictionaryMeta =
            serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(
                dir.join("dictionary.json"),
            )?))?;
        if meta.format != "extended-dictionary/v1" {
            return Err(Error::Config(format!(
                "unsupported dictionary format `{}`",
                meta.format
            )));
        }

        let csv_path = dir.join("columns.csv");
        let text = std::fs::read_to_string(&csv_path)?;
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut col = Vec::with_capacity(meta.dim);
            for field in line.split(',') {
                col.push(field.trim().parse::<f64>().map_err(|_| Error::Csv {
                    path: csv_path.display().to_string(),
                    line: idx as u64 + 1,
                    message: format!("`{field}` is not a number"),
                })?);
            }
            if col.len() != meta.dim {
                return Err(Error::Csv {
                    path: csv_path.display().to_string(),
                    line: idx as u64 + 1,
                    message: format!("expected {} values, found {}", meta.dim, col.len()),
                });
            }
            cols.push(col);
        }
        let total: usize = meta.blocks.iter().map(|b| b.width).sum();
        if cols.len() != total {
            return Err(Error::Config(format!(
                "column count {} does not match block map total {total}",
                cols.len()
            )));
        }

        let mut blocks = Vec::with_capacity(meta.blocks.len());
        let mut cursor = 0usize;
        for b in &meta.blocks {
            let mut columns = DMatrix::zeros(meta.dim, b.width);
            for j in 0..b.width {
                for r in 0..meta.dim {
                    columns[(r, j)] = cols[cursor + j][r];
                }
            }
            cursor += b.width;
            blocks.push(TangentBlock {
                class: b.class,
                index_in_class: b.index_in_class,
                train_column: b.train_column,
                scale: b.scale,
                columns,
                basis_rank: b.basis_rank,
            });
        }

        let config = DictionaryConfig {
            tangent_dim: meta.tangent_dim,
            neighbors: meta.neighbors,
            seed: meta.seed,
            normalize: meta.normalized,
            include_tangents: meta.include_tangents,
        };
        Ok(assemble(
            blocks,
            meta.pruning_radius,
            meta.radii,
            config,
            meta.n_classes,
            meta.class_labels,
        ))
    }
}
