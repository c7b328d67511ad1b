//! Labeled sample collections and their CSV form.
//!
//! Samples are stored column-major: an `m x N` matrix holds `N` samples of
//! dimension `m`, one per column. Raw integer class labels are remapped to
//! contiguous class indices `0..L` sorted by label value, so "lowest class
//! index" tie-breaking is well defined everywhere.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A labeled set of samples, one sample per matrix column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: DMatrix<f64>,
    class_of: Vec<usize>,
    class_labels: Vec<i64>,
}

impl Dataset {
    /// Builds a dataset from a sample matrix and one raw label per column.
    pub fn new(samples: DMatrix<f64>, labels: &[i64]) -> Result<Self> {
        if labels.len() != samples.ncols() {
            return Err(Error::DimensionMismatch {
                expected: samples.ncols(),
                actual: labels.len(),
            });
        }
        if samples.ncols() == 0 || samples.nrows() == 0 {
            return Err(Error::InvalidParameter("dataset must be nonempty".into()));
        }
        let mut class_labels: Vec<i64> = labels.to_vec();
        class_labels.sort_unstable();
        class_labels.dedup();
        let class_of = labels
            .iter()
            .map(|l| class_labels.binary_search(l).expect("label present"))
            .collect();
        Ok(Self {
            samples,
            class_of,
            class_labels,
        })
    }

    /// Builds a dataset that already uses contiguous class indices `0..L`.
    pub fn from_class_indices(
        samples: DMatrix<f64>,
        class_of: Vec<usize>,
        class_labels: Vec<i64>,
    ) -> Result<Self> {
        if class_of.len() != samples.ncols() {
            return Err(Error::DimensionMismatch {
                expected: samples.ncols(),
                actual: class_of.len(),
            });
        }
        if let Some(&c) = class_of.iter().find(|&&c| c >= class_labels.len()) {
            return Err(Error::InvalidParameter(format!(
                "class index {c} out of range for {} classes",
                class_labels.len()
            )));
        }
        Ok(Self {
            samples,
            class_of,
            class_labels,
        })
    }

    /// Sample dimension `m`.
    pub fn dim(&self) -> usize {
        self.samples.nrows()
    }

    /// Number of samples `N`.
    pub fn len(&self) -> usize {
        self.samples.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.ncols() == 0
    }

    /// Number of classes `L`.
    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    /// The `i`-th sample as an owned vector.
    pub fn sample(&self, i: usize) -> DVector<f64> {
        self.samples.column(i).into_owned()
    }

    /// Class index (in `0..L`) of sample `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// All class indices, one per column.
    pub fn class_indices(&self) -> &[usize] {
        &self.class_of
    }

    /// Raw label value of class index `c`.
    pub fn raw_label(&self, c: usize) -> i64 {
        self.class_labels[c]
    }

    pub fn class_labels(&self) -> &[i64] {
        &self.class_labels
    }

    /// Column indices of the samples in class `c`.
    pub fn class_members(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.class_of[i] == c).collect()
    }

    /// The samples of class `c` as an `m x N_c` matrix.
    pub fn class_points(&self, c: usize) -> DMatrix<f64> {
        let members = self.class_members(c);
        let mut out = DMatrix::zeros(self.dim(), members.len());
        for (j, &i) in members.iter().enumerate() {
            out.set_column(j, &self.samples.column(i));
        }
        out
    }

    /// Per-class sample counts.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.n_classes()];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// Size of the smallest class.
    pub fn min_class_size(&self) -> usize {
        self.class_sizes().into_iter().min().unwrap_or(0)
    }

    /// A new dataset holding the given columns (class labels preserved).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut samples = DMatrix::zeros(self.dim(), indices.len());
        let mut class_of = Vec::with_capacity(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            samples.set_column(j, &self.samples.column(i));
            class_of.push(self.class_of[i]);
        }
        Dataset {
            samples,
            class_of,
            class_labels: self.class_labels.clone(),
        }
    }

    /// Replaces the sample matrix, keeping labels (used after projections).
    pub fn with_samples(&self, samples: DMatrix<f64>) -> Result<Dataset> {
        if samples.ncols() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: samples.ncols(),
            });
        }
        Ok(Dataset {
            samples,
            class_of: self.class_of.clone(),
            class_labels: self.class_labels.clone(),
        })
    }

    /// Reads a dataset from CSV: one sample per row, integer label in the
    /// first column, features after. A single header line is skipped when the
    /// first field does not parse as an integer.
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Dataset> {
        let path_str = path.as_ref().display().to_string();
        let file = std::fs::File::open(path.as_ref())?;
        let reader = BufReader::new(file);

        let mut labels: Vec<i64> = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut width: Option<usize> = None;

        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx as u64 + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let label = match fields[0].parse::<i64>() {
                Ok(l) => l,
                Err(_) if idx == 0 => continue, // header line
                Err(_) => {
                    return Err(Error::Csv {
                        path: path_str,
                        line: lineno,
                        message: format!("label `{}` is not an integer", fields[0]),
                    })
                }
            };
            if fields.len() < 2 {
                return Err(Error::Csv {
                    path: path_str,
                    line: lineno,
                    message: "row has a label but no features".into(),
                });
            }
            let mut row = Vec::with_capacity(fields.len() - 1);
            for f in &fields[1..] {
                match f.parse::<f64>() {
                    Ok(v) if v.is_finite() => row.push(v),
                    _ => {
                        return Err(Error::Csv {
                            path: path_str,
                            line: lineno,
                            message: format!("feature `{f}` is not a finite number"),
                        })
                    }
                }
            }
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::Csv {
                        path: path_str,
                        line: lineno,
                        message: format!("expected {w} features, found {}", row.len()),
                    })
                }
                _ => {}
            }
            labels.push(label);
            rows.push(row);
        }

        if rows.is_empty() {
            return Err(Error::Csv {
                path: path_str,
                line: 0,
                message: "no samples found".into(),
            });
        }
        let m = width.unwrap();
        let n = rows.len();
        let samples = DMatrix::from_fn(m, n, |r, c| rows[c][r]);
        Dataset::new(samples, &labels)
    }

    /// Writes the dataset in the CSV form accepted by [`Dataset::read_csv`].
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        for i in 0..self.len() {
            let mut row = String::new();
            row.push_str(&self.raw_label(self.class_of[i]).to_string());
            for r in 0..self.dim() {
                row.push(',');
                row.push_str(&format!("{:.17e}", self.samples[(r, i)]));
            }
            writeln!(file, "{row}")?;
        }
        Ok(())
    }
}
