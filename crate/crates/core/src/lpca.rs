//! Weighted local principal component analysis.
//!
//! Approximates the tangent hyperplane of a class manifold at one sample:
//! take the n+1 nearest same-class neighbors, center the nearest n around the
//! sample, weight them by an Epanechnikov kernel of their distances (scaled
//! by the (n+1)st-neighbor distance), and read the basis off the leading left
//! singular vectors of the weighted matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Orthonormal basis of the approximate tangent hyperplane at one sample.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    /// `m x d_eff` orthonormal basis; `d_eff < d` when the weighted
    /// neighborhood is rank-deficient.
    pub basis: DMatrix<f64>,
    /// Index of the center sample within its class point set.
    pub center_index: usize,
    /// Distance to the (n+1)st same-class neighbor (unsquared).
    pub neighborhood_radius: f64,
    /// Squared distance to the (n+1)st neighbor, the kernel bandwidth.
    pub epsilon_pca: f64,
}

/// Brute-force k-nearest-neighbor query within a point set, excluding the
/// query point itself. Results are sorted by ascending distance with
/// ascending-index tie-breaks.
pub fn nearest_neighbors(
    points: &DMatrix<f64>,
    query_index: usize,
    count: usize,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let n_points = points.ncols();
    if count >= n_points {
        return Err(Error::NotEnoughNeighbors {
            requested: count,
            available: n_points.saturating_sub(1),
        });
    }
    let query = points.column(query_index);
    let mut order: Vec<(f64, usize)> = (0..n_points)
        .filter(|&j| j != query_index)
        .map(|j| ((points.column(j) - query).norm(), j))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-NaN distance").then(a.1.cmp(&b.1)));
    order.truncate(count);
    let indices = order.iter().map(|&(_, j)| j).collect();
    let distances = order.iter().map(|&(d, _)| d).collect();
    Ok((indices, distances))
}

/// Computes the weighted local-PCA tangent basis at column `center` of
/// `class_points`, using `d` basis vectors and `n` neighbors.
///
/// Requires `1 <= d <= n < class_size - 1`, so that the center has n+1
/// same-class neighbors.
pub fn tangent_basis(
    class_points: &DMatrix<f64>,
    center: usize,
    d: usize,
    n: usize,
) -> Result<TangentBasis> {
    let class_size = class_points.ncols();
    if !(1 <= d && d <= n && n + 1 < class_size) {
        return Err(Error::ParameterConstraint {
            d,
            n,
            class_size,
        });
    }

    let (indices, distances) = nearest_neighbors(class_points, center, n + 1)?;
    let epsilon_pca = distances[n] * distances[n];
    if epsilon_pca <= 1e-24 {
        return Err(Error::DegenerateNeighborhood {
            class: 0,
            sample: center,
        });
    }

    let m = class_points.nrows();
    let x_center = class_points.column(center);
    // Columns centered around the sample, scaled by the kernel weights:
    // B = [x_ij - x_i] * diag(sqrt(K(dist_j / sqrt(eps)))).
    let mut weighted = DMatrix::zeros(m, n);
    for j in 0..n {
        let neighbor = class_points.column(indices[j]);
        let u = distances[j] * distances[j] / epsilon_pca;
        let weight = (1.0 - u).max(0.0).sqrt();
        weighted.set_column(j, &((neighbor - x_center) * weight));
    }

    let svd = weighted.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0f64, f64::max);
    let rank = sigma
        .iter()
        .filter(|&&s| s > 1e-12 * sigma_max && s > 0.0)
        .count();
    let d_eff = d.min(rank);

    let mut basis = u.columns(0, d_eff).into_owned();
    linalg::fix_column_signs(&mut basis);

    Ok(TangentBasis {
        basis,
        center_index: center,
        neighborhood_radius: distances[n],
        epsilon_pca,
    })
}
