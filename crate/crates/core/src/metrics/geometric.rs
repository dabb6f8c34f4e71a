//! Nearest-neighbour set distances: Hausdorff and symmetric Chamfer.
//! Both scan all `n_a * n_b` pairs.

use super::pairwise::nearest_squared;
use crate::cloud::{check_same_dim, PointCloud};
use crate::error::Result;

/// `max(max_i min_j |a_i - b_j|, max_j min_i |a_i - b_j|)`.
pub fn hausdorff_value(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    check_same_dim(a, b)?;
    let (ra, rb) = nearest_squared(a, b);
    let worst = ra.iter().chain(&rb).fold(0.0f64, |m, &v| m.max(v));
    Ok(worst.sqrt())
}

/// `(mean_i min_j |a_i - b_j| + mean_j min_i |a_i - b_j|) / 2`, unsquared.
pub fn chamfer_value(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    check_same_dim(a, b)?;
    let (ra, rb) = nearest_squared(a, b);
    let mean_a = ra.iter().map(|v| v.sqrt()).sum::<f64>() / ra.len() as f64;
    let mean_b = rb.iter().map(|v| v.sqrt()).sum::<f64>() / rb.len() as f64;
    Ok(0.5 * (mean_a + mean_b))
}
