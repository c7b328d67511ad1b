//! Synthetic sinusoid-on-sphere benchmark.
//!
//! Each class is a closed curve
//! `p(t) = [cos(t + phi), sin(t + phi), A sin(w t)]` normalized onto the unit
//! sphere, with the phase `phi = 2 pi / (3 l)` separating classes `l = 1..L`.
//! Samples are taken on a regular grid in `t`, padded with zero "noise
//! dimensions", perturbed with i.i.d. Gaussian noise in every coordinate, and
//! re-normalized. The test grid is offset by half a step by default so test
//! samples fall between their same-class training neighbors.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Generator settings. The defaults reproduce the benchmark geometry:
/// four classes in 53 ambient dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Number of classes `L`.
    pub classes: usize,
    /// Samples per class in both the training and the test set.
    pub per_class: usize,
    /// Noise standard deviation.
    pub noise: f64,
    /// Sinusoid amplitude `A`.
    pub amplitude: f64,
    /// Sinusoid frequency `w`.
    pub frequency: f64,
    /// Count of zero-padded coordinates appended to the 3-d curve.
    pub noise_dims: usize,
    /// Test-grid offset as a fraction of the grid step.
    pub test_offset: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            classes: 4,
            per_class: 25,
            noise: 0.01,
            amplitude: 0.5,
            frequency: 3.0,
            noise_dims: 50,
            test_offset: 0.5,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 {
            return Err(Error::InvalidParameter("classes must be positive".into()));
        }
        if self.per_class < 3 {
            return Err(Error::InvalidParameter(format!(
                "per_class must be at least 3, got {}",
                self.per_class
            )));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise must be nonnegative, got {}",
                self.noise
            )));
        }
        Ok(())
    }

    /// Ambient dimension `m` (3 curve coordinates plus the padding).
    pub fn dim(&self) -> usize {
        3 + self.noise_dims
    }
}

/// A generated benchmark instance.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub train: Dataset,
    /// Independent noise on a half-step-offset copy of the grid.
    pub test: Dataset,
    /// Pre-noise unit vectors of the training grid, for SNR accounting.
    pub clean_train: DMatrix<f64>,
}

/// Generates matching train and test sets plus the clean training points.
pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let (train, clean_train) = generate_role(config, 0, 0.0)?;
    let (test, _) = generate_role(config, 1, config.test_offset)?;
    Ok(SynthData {
        train,
        test,
        clean_train,
    })
}

fn generate_role(config: &SynthConfig, role: u64, offset: f64) -> Result<(Dataset, DMatrix<f64>)> {
    let m = config.dim();
    let total = config.classes * config.per_class;
    let mut clean = DMatrix::zeros(m, total);
    let mut noisy = DMatrix::zeros(m, total);
    let mut labels = Vec::with_capacity(total);

    let noise = Normal::new(0.0, config.noise).map_err(|e| {
        Error::InvalidParameter(format!("invalid noise level {}: {e}", config.noise))
    })?;

    let mut col = 0usize;
    for class in 0..config.classes {
        // classes are 1-based in the phase formula
        let phase = 2.0 * std::f64::consts::PI / (3.0 * (class + 1) as f64);
        for k in 0..config.per_class {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + offset) / config.per_class as f64;
            let mut p = DVector::zeros(m);
            p[0] = (t + phase).cos();
            p[1] = (t + phase).sin();
            p[2] = config.amplitude * (config.frequency * t).sin();
            let norm3 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            p.scale_mut(1.0 / norm3);
            clean.set_column(col, &p);

            let mut sample = p;
            if config.noise > 0.0 {
                let mut stream = rng::stream(config.seed, &[role, class as u64, k as u64]);
                for r in 0..m {
                    sample[r] += noise.sample(&mut stream);
                }
                let norm = sample.norm();
                if norm == 0.0 {
                    return Err(Error::ZeroNormSample { index: col });
                }
                sample.scale_mut(1.0 / norm);
            }
            noisy.set_column(col, &sample);
            labels.push(class as i64 + 1);
            col += 1;
        }
    }

    Ok((Dataset::new(noisy, &labels)?, clean))
}

/// Mean per-sample signal-to-noise ratio in decibels.
#[derive(Debug, Clone, Copy)]
pub struct SnrReport {
    /// Mean of `10 log10(||clean||^2 / ||noisy - clean||^2)` over samples;
    /// infinite when any sample carries no noise at all.
    pub mean_db: f64,
    /// Number of samples whose noise was exactly zero.
    pub infinite_samples: usize,
}

/// Computes the mean training-sample SNR between a clean and a noisy matrix
/// of equal shape.
pub fn mean_snr(clean: &DMatrix<f64>, noisy: &DMatrix<f64>) -> Result<SnrReport> {
    if clean.shape() != noisy.shape() {
        return Err(Error::DimensionMismatch {
            expected: clean.ncols(),
            actual: noisy.ncols(),
        });
    }
    let mut sum_db = 0.0f64;
    let mut infinite = 0usize;
    for j in 0..clean.ncols() {
        let signal = clean.column(j).norm_squared();
        let noise = (noisy.column(j) - clean.column(j)).norm_squared();
        if noise == 0.0 {
            infinite += 1;
        } else {
            sum_db += 10.0 * (signal / noise).log10();
        }
    }
    if infinite > 0 {
        Ok(SnrReport {
            mean_db: f64::INFINITY,
            infinite_samples: infinite,
        })
    } else {
        Ok(SnrReport {
            mean_db: sum_db / clean.ncols() as f64,
            infinite_samples: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn noiseless_samples_are_unit_with_zero_padding() {
        let config = SynthConfig {
            noise: 0.0,
            per_class: 10,
            seed: 3,
            ..SynthConfig::default()
        };
        let data = generate(&config).unwrap();
        for j in 0..data.train.len() {
            assert_abs_diff_eq!(data.train.samples().column(j).norm(), 1.0, epsilon = 1e-12);
            for r in 3..config.dim() {
                assert_eq!(data.train.samples()[(r, j)], 0.0);
            }
        }
    }

    #[test]
    fn first_class_first_point_closed_form() {
        // t = 0 in class 1 (phase 2 pi / 3): the curve point is
        // [cos(2 pi/3), sin(2 pi/3), 0] = [-1/2, sqrt(3)/2, 0], already unit.
        let config = SynthConfig {
            noise: 0.0,
            per_class: 8,
            ..SynthConfig::default()
        };
        let data = generate(&config).unwrap();
        let p = data.train.sample(0);
        assert_abs_diff_eq!(p[0], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 3.0f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn noisy_samples_are_unit_norm() {
        let config = SynthConfig {
            noise: 0.05,
            per_class: 6,
            seed: 11,
            ..SynthConfig::default()
        };
        let data = generate(&config).unwrap();
        for j in 0..data.train.len() {
            assert_abs_diff_eq!(data.train.samples().column(j).norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn class_sizes_are_exact() {
        let config = SynthConfig {
            per_class: 7,
            seed: 5,
            ..SynthConfig::default()
        };
        let data = generate(&config).unwrap();
        assert_eq!(data.train.class_sizes(), vec![7, 7, 7, 7]);
        assert_eq!(data.test.class_sizes(), vec![7, 7, 7, 7]);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = SynthConfig {
            per_class: 5,
            seed: 9,
            ..SynthConfig::default()
        };
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a.train.samples(), b.train.samples());
        assert_eq!(a.test.samples(), b.test.samples());
    }

    #[test]
    fn snr_flags_exact_copies() {
        let m = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let report = mean_snr(&m, &m).unwrap();
        assert!(report.mean_db.is_infinite());
        assert_eq!(report.infinite_samples, 2);
    }

    #[test]
    fn snr_zero_decibels_when_noise_matches_signal() {
        let clean = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let noisy = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        let report = mean_snr(&clean, &noisy).unwrap();
        assert_abs_diff_eq!(report.mean_db, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn snr_decreases_with_noise() {
        let mut last = f64::INFINITY;
        for (i, eta) in [0.001, 0.01, 0.05].into_iter().enumerate() {
            let config = SynthConfig {
                noise: eta,
                per_class: 25,
                seed: 100 + i as u64,
                ..SynthConfig::default()
            };
            let data = generate(&config).unwrap();
            let snr = mean_snr(&data.clean_train, data.train.samples())
                .unwrap()
                .mean_db;
            assert!(snr < last, "snr {snr} not below {last}");
            last = snr;
        }
    }
}
