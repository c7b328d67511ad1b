//! Small shared numeric helpers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Scales every column to unit Euclidean norm. Fails on a zero column.
pub fn normalize_columns(matrix: &mut DMatrix<f64>) -> Result<()> {
    for j in 0..matrix.ncols() {
        let norm = matrix.column(j).norm();
        if norm == 0.0 {
            return Err(Error::ZeroNormSample { index: j });
        }
        matrix.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok(())
}

/// Returns the unit-norm copy of a vector. Fails on the zero vector.
pub fn normalized(v: &DVector<f64>) -> Result<DVector<f64>> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNormSample { index: 0 });
    }
    Ok(v / norm)
}

/// Flips each column so its largest-magnitude entry is positive. Makes
/// singular-vector output reproducible across backends.
pub fn fix_column_signs(matrix: &mut DMatrix<f64>) {
    for j in 0..matrix.ncols() {
        let col = matrix.column(j);
        let mut lead = 0usize;
        let mut best = -1.0f64;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                lead = i;
            }
        }
        if matrix[(lead, j)] < 0.0 {
            matrix.column_mut(j).neg_mut();
        }
    }
}

/// Median with the midpoint convention for even counts.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Largest principal angle (in radians) between the column spans of two
/// orthonormal bases of equal rank. Computed through the sine (the residual
/// of projecting one basis onto the other), which stays accurate for tiny
/// angles where the cosine saturates.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.ncols(), b.ncols(), "bases must have equal rank");
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * (a.transpose() * b);
    let svd = residual.svd(false, false);
    let max_sigma = svd
        .singular_values
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .clamp(0.0, 1.0);
    max_sigma.asin()
}
