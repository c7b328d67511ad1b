//! Independent oracles shared by the integration suites. Everything here
//! deliberately recomputes results through routes different from the library
//! code it checks.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random dictionary with unit-norm Gaussian-ish columns.
pub fn random_unit_dictionary(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
    let mut d = DMatrix::from_fn(m, n, |_, _| sample_gauss(&mut rng));
    for j in 0..n {
        let norm = d.column(j).norm();
        d.column_mut(j).scale_mut(1.0 / norm);
    }
    d
}

pub fn random_unit_vector(m: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545f4914f6cdd1d));
    let v = DVector::from_fn(m, |_, _| sample_gauss(&mut rng));
    let norm = v.norm();
    v / norm
}

/// Box-Muller; keeps the oracle independent of the library's RNG plumbing.
fn sample_gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn lasso_objective(dict: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, alpha: &DVector<f64>) -> f64 {
    let residual = y - dict * alpha;
    0.5 * residual.norm_squared() + lambda * alpha.abs().sum()
}

/// Duality gap of the LASSO at `alpha`; zero exactly at the optimum.
pub fn lasso_duality_gap(
    dict: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    alpha: &DVector<f64>,
) -> f64 {
    let residual = y - dict * alpha;
    let primal = 0.5 * residual.norm_squared() + lambda * alpha.abs().sum();
    let corr_inf = dict.tr_mul(&residual).amax();
    let scale = if corr_inf > lambda && corr_inf > 0.0 {
        lambda / corr_inf
    } else {
        1.0
    };
    let theta = &residual * scale;
    let dual = 0.5 * y.norm_squared() - 0.5 * (y - &theta).norm_squared();
    primal - dual
}

/// Cyclic coordinate descent run to a target duality gap. The independent
/// reference solution for the homotopy solver.
pub fn lasso_coordinate_descent(
    dict: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    gap_tol: f64,
) -> DVector<f64> {
    assert!(lambda > 0.0, "coordinate descent oracle needs lambda > 0");
    let n = dict.ncols();
    let gram = dict.tr_mul(dict);
    let mut alpha = DVector::<f64>::zeros(n);
    // corr = D^T y - G alpha, maintained incrementally
    let mut corr = dict.tr_mul(y);
    let max_sweeps = 200_000;
    for sweep in 0..max_sweeps {
        let mut moved = 0.0f64;
        for j in 0..n {
            let gjj = gram[(j, j)];
            let old = alpha[j];
            let rho = corr[j] + gjj * old;
            let new = soft_threshold(rho, lambda) / gjj;
            if new != old {
                let delta = new - old;
                for i in 0..n {
                    corr[i] -= gram[(i, j)] * delta;
                }
                alpha[j] = new;
                moved = moved.max(delta.abs());
            }
        }
        if (sweep % 4 == 3 || moved == 0.0)
            && lasso_duality_gap(dict, y, lambda, &alpha) <= gap_tol
        {
            return alpha;
        }
    }
    panic!("coordinate descent oracle failed to reach gap {gap_tol}");
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Every exact 2-sparse representation of `y` over `dict`, found by
/// exhaustive pair enumeration.
pub fn two_sparse_representations(
    dict: &DMatrix<f64>,
    y: &DVector<f64>,
    residual_tol: f64,
) -> Vec<(usize, usize, f64, f64)> {
    let n = dict.ncols();
    let mut found = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = dict.column(i);
            let b = dict.column(j);
            // 2x2 normal equations
            let g11 = a.dot(&a);
            let g12 = a.dot(&b);
            let g22 = b.dot(&b);
            let det = g11 * g22 - g12 * g12;
            if det.abs() < 1e-12 {
                continue;
            }
            let r1 = a.dot(y);
            let r2 = b.dot(y);
            let ci = (g22 * r1 - g12 * r2) / det;
            let cj = (g11 * r2 - g12 * r1) / det;
            let residual = (y - a * ci - b * cj).norm();
            if residual <= residual_tol {
                found.push((i, j, ci, cj));
            }
        }
    }
    found
}

/// Tangent basis recomputed independently: full-sort neighbor selection,
/// separately coded centering and Epanechnikov weighting, and one dense SVD
/// of the assembled weighted matrix.
pub fn tangent_basis_oracle(
    class_points: &DMatrix<f64>,
    center: usize,
    d: usize,
    n: usize,
) -> DMatrix<f64> {
    let (indices, distances) = sorted_neighbors(class_points, center);
    let eps = distances[n] * distances[n];
    let m = class_points.nrows();
    let mut b = DMatrix::zeros(m, n);
    for j in 0..n {
        let w = (1.0 - distances[j] * distances[j] / eps).max(0.0).sqrt();
        let col = (class_points.column(indices[j]) - class_points.column(center)) * w;
        b.set_column(j, &col);
    }
    let svd = b.svd(true, false);
    svd.u.unwrap().columns(0, d).into_owned()
}

/// Full-sort nearest neighbors (excluding the query), the reference for the
/// linear-scan implementation.
pub fn sorted_neighbors(points: &DMatrix<f64>, query: usize) -> (Vec<usize>, Vec<f64>) {
    let mut order: Vec<(f64, usize)> = (0..points.ncols())
        .filter(|&j| j != query)
        .map(|j| ((points.column(j) - points.column(query)).norm(), j))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    (
        order.iter().map(|&(_, j)| j).collect(),
        order.iter().map(|&(d, _)| d).collect(),
    )
}

/// Least-squares residual `min_z || y - B z ||` computed through the SVD
/// pseudoinverse, the reference for the QR projection path.
pub fn least_squares_residual_oracle(columns: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    if columns.ncols() == 0 {
        return y.norm();
    }
    let svd = columns.clone().svd(true, false);
    let u = svd.u.as_ref().unwrap();
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if sigma_max == 0.0 {
        return y.norm();
    }
    let mut projected = DVector::zeros(y.len());
    for k in 0..svd.singular_values.len() {
        if svd.singular_values[k] > 1e-10 * sigma_max {
            let uk = u.column(k);
            projected.axpy(uk.dot(y), &uk, 1.0);
        }
    }
    (y - projected).norm()
}
