//! Entropic optimal transport by log-domain Sinkhorn scaling.
//!
//! Uniform marginals, squared-Euclidean cost. The dual potentials `f`, `g`
//! are updated with stabilised log-sum-exp sweeps and the plan is
//! `pi_ij = a_i b_j exp((f_i + g_j - C_ij) / eps)`. After each `g` update
//! the column marginals are exact; convergence is declared once the largest
//! row-marginal violation drops below the tolerance. The reported value is
//! `sqrt(<pi, C>)` without debiasing.
//!
//! Small `eps` is reached by annealing: the regularisation starts at the
//! largest cost and halves down to the target, each stage warm-started from
//! the previous potentials. The iteration cap and tolerance govern the final
//! stage; the fixed point is the same as for a cold start.

use crate::cloud::{check_same_dim, squared_distance, PointCloud};
use crate::error::{Error, Result};

/// Violation accepted before moving to the next annealing stage.
const STAGE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SinkhornOutcome {
    pub value: f64,
    /// Iterations spent in the final stage.
    pub iterations: usize,
    pub converged: bool,
    pub violation: f64,
}

#[inline]
fn log_sum_exp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + it.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Orders the pair so that `(a, b)` and `(b, a)` run the identical
/// iteration; the problem is symmetric but truncated iterates are not.
fn canonical<'a>(a: &'a PointCloud, b: &'a PointCloud) -> (&'a PointCloud, &'a PointCloud) {
    let key = |c: &PointCloud| c.n();
    let swap = match key(a).cmp(&key(b)) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .is_some_and(|o| o.is_gt()),
    };
    if swap {
        (b, a)
    } else {
        (a, b)
    }
}

struct Problem {
    na: usize,
    nb: usize,
    log_a: f64,
    log_b: f64,
    /// Row-major `na x nb` and its transpose.
    cost: Vec<f64>,
    cost_t: Vec<f64>,
}

struct Stage {
    iterations: usize,
    converged: bool,
    violation: f64,
}

impl Problem {
    /// Sinkhorn sweeps at one `eps` on absolute-unit potentials.
    fn run(&self, f: &mut Vec<f64>, g: &mut [f64], eps: f64, max_iter: usize, tol: f64) -> Result<Stage> {
        let (na, nb) = (self.na, self.nb);
        let inv = 1.0 / eps;
        let mass_a = (self.log_a).exp();
        let mut f_next = vec![0.0; na];
        let mut iterations = 0;
        let mut violation = f64::INFINITY;
        while iterations < max_iter {
            for (fi, row) in f_next.iter_mut().zip(self.cost.chunks_exact(nb)) {
                *fi = -eps * log_sum_exp(row.iter().zip(g.iter()).map(|(c, gj)| (gj - c) * inv + self.log_b));
            }
            if iterations > 0 {
                violation = f
                    .iter()
                    .zip(&f_next)
                    .map(|(fo, fnew)| mass_a * (((fo - fnew) * inv).exp() - 1.0).abs())
                    .fold(0.0, f64::max);
                if violation < tol {
                    return Ok(Stage { iterations, converged: true, violation });
                }
            }
            std::mem::swap(f, &mut f_next);
            for (gj, col) in g.iter_mut().zip(self.cost_t.chunks_exact(na)) {
                *gj = -eps * log_sum_exp(col.iter().zip(f.iter()).map(|(c, fi)| (fi - c) * inv + self.log_a));
            }
            if f.iter().chain(g.iter()).any(|v| !v.is_finite()) {
                return Err(Error::NumericalFailure(format!(
                    "Sinkhorn potentials became non-finite at iteration {iterations}; \
                     try a larger epsilon (got {eps})"
                )));
            }
            iterations += 1;
        }
        Ok(Stage { iterations, converged: false, violation })
    }
}

/// `eps` values visited: halving from the largest cost down to the target.
fn schedule(max_cost: f64, eps: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut e = max_cost;
    while e > 2.0 * eps {
        out.push(e);
        e *= 0.5;
    }
    out.push(eps);
    out
}

pub(crate) fn sinkhorn_value(
    a: &PointCloud,
    b: &PointCloud,
    eps: f64,
    max_iter: usize,
    tol: f64,
) -> Result<SinkhornOutcome> {
    check_same_dim(a, b)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {eps}")));
    }
    if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
        return Err(Error::invalid("tolerance and iteration cap must be positive"));
    }
    let (a, b) = canonical(a, b);
    let (na, nb) = (a.n(), b.n());
    let mut cost = vec![0.0; na * nb];
    let mut cost_t = vec![0.0; na * nb];
    for i in 0..na {
        for j in 0..nb {
            let c = squared_distance(a.row(i), b.row(j));
            cost[i * nb + j] = c;
            cost_t[j * na + i] = c;
        }
    }
    let max_cost = cost.iter().copied().fold(0.0, f64::max);
    let problem = Problem {
        na,
        nb,
        log_a: -(na as f64).ln(),
        log_b: -(nb as f64).ln(),
        cost,
        cost_t,
    };

    let mut f = vec![0.0; na];
    let mut g = vec![0.0; nb];
    let stages = schedule(max_cost, eps);
    let last = stages.len() - 1;
    let mut fin = None;
    for (s, &e) in stages.iter().enumerate() {
        if s < last {
            problem.run(&mut f, &mut g, e, max_iter, tol.max(STAGE_TOL))?;
        } else {
            fin = Some(problem.run(&mut f, &mut g, e, max_iter, tol)?);
        }
    }
    let fin = fin.expect("schedule ends at the target epsilon");

    let inv = 1.0 / eps;
    let mut total = 0.0;
    for (fi, crow) in f.iter().zip(problem.cost.chunks_exact(nb)) {
        let mut part = 0.0;
        for (gj, c) in g.iter().zip(crow) {
            part += ((fi + gj - c) * inv + problem.log_a + problem.log_b).exp() * c;
        }
        total += part;
    }
    if !total.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "non-finite transport cost; try a larger epsilon (got {eps})"
        )));
    }
    Ok(SinkhornOutcome {
        value: total.max(0.0).sqrt(),
        iterations: fin.iterations,
        converged: fin.converged,
        violation: fin.violation,
    })
}
