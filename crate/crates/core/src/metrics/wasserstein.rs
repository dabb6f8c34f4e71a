//! Exact 2-Wasserstein distance between uniform empirical measures.

use super::assignment::solve_assignment;
use super::transport::solve_transport;
use crate::cloud::{check_same_dim, squared_distance, PointCloud};
use crate::error::Result;

fn cost_matrix(a: &PointCloud, b: &PointCloud) -> Vec<f64> {
    let mut cost = Vec::with_capacity(a.n() * b.n());
    for x in a.rows() {
        cost.extend(b.rows().map(|y| squared_distance(x, y)));
    }
    cost
}

/// `(min_pi sum pi_ij |a_i - b_j|^2)^(1/2)` with masses `1/n_a` and `1/n_b`.
///
/// Equal sizes reduce to a permutation and go through the assignment
/// solver; otherwise the full transportation problem is solved with integer
/// masses `n_b` per source and `n_a` per sink.
pub fn wasserstein2_value(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    check_same_dim(a, b)?;
    let cost = cost_matrix(a, b);
    let (na, nb) = (a.n(), b.n());
    let mean_cost = if na == nb {
        let assign = solve_assignment(&cost, na, nb)?;
        let total: f64 = assign
            .iter()
            .enumerate()
            .map(|(i, &j)| cost[i * nb + j])
            .sum();
        total / na as f64
    } else {
        let plan = solve_transport(&cost, &vec![nb as u64; na], &vec![na as u64; nb])?;
        plan.total_cost / (na as f64 * nb as f64)
    };
    Ok(mean_cost.max(0.0).sqrt())
}
