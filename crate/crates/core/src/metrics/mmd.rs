//! Biased (V-statistic) MMD with a Gaussian RBF kernel.
//!
//! `k(x, y) = exp(-|x - y|^2 / (2 h^2))`. Under the median heuristic `h` is
//! the median of the `N (N - 1) / 2` off-diagonal pairwise distances of the
//! pooled sample, so the statistic is invariant to uniform rescaling.

use super::pairwise::{for_each_tile, Tile};
use crate::cloud::{check_same_dim, PointCloud};
use crate::error::{Error, Result};

/// Pooled pair counts above this are resolved by the two-pass bucket
/// search instead of materialising every distance.
const COLLECT_LIMIT: u64 = 1 << 23;
const BUCKET_SHIFT: u32 = 41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MmdOutcome {
    pub value: f64,
    pub bandwidth: f64,
    pub degenerate: bool,
}

pub(crate) fn mmd_value(a: &PointCloud, b: &PointCloud, bandwidth: Option<f64>) -> Result<MmdOutcome> {
    check_same_dim(a, b)?;
    let h = match bandwidth {
        Some(h) => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid(format!("bandwidth must be positive, got {h}")));
            }
            h
        }
        None => {
            let pooled = a.concat(b)?;
            let h = median_pairwise_distance(&pooled);
            if h <= 0.0 {
                return Ok(MmdOutcome {
                    value: 0.0,
                    bandwidth: 0.0,
                    degenerate: true,
                });
            }
            h
        }
    };
    let gamma = 1.0 / (2.0 * h * h);
    let kaa = kernel_mean(a, a, gamma);
    let kbb = kernel_mean(b, b, gamma);
    let kab = kernel_mean(a, b, gamma);
    let sq = kaa + kbb - 2.0 * kab;
    if !sq.is_finite() {
        return Err(Error::NumericalFailure("non-finite kernel sum".into()));
    }
    Ok(MmdOutcome {
        value: sq.max(0.0).sqrt(),
        bandwidth: h,
        degenerate: false,
    })
}

fn kernel_mean(x: &PointCloud, y: &PointCloud, gamma: f64) -> f64 {
    let mut total = 0.0;
    for_each_tile(x, y, false, |t| {
        let part: f64 = t.d2.iter().map(|&v| (-gamma * v).exp()).sum();
        total += part;
    });
    total / (x.n() as f64 * y.n() as f64)
}

fn for_each_pair(u: &PointCloud, mut f: impl FnMut(f64)) {
    for_each_tile(u, u, true, |t: &Tile<'_>| {
        for i in 0..t.rows {
            let gi = t.i0 + i;
            for j in 0..t.cols {
                if t.j0 + j > gi {
                    f(t.get(i, j));
                }
            }
        }
    });
}

fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Median over all unordered pairs `i < j` of `|u_i - u_j|`; the mean of
/// the two middle values when the count is even. Zero for a single point.
pub(crate) fn median_pairwise_distance(u: &PointCloud) -> f64 {
    let pairs = pair_count(u.n());
    if pairs == 0 {
        return 0.0;
    }
    let (lo, hi) = if pairs <= COLLECT_LIMIT {
        middle_by_collection(u, pairs)
    } else {
        middle_by_buckets(u, pairs)
    };
    0.5 * (lo.sqrt() + hi.sqrt())
}

fn middle_ranks(pairs: u64) -> (usize, usize) {
    (((pairs - 1) / 2) as usize, (pairs / 2) as usize)
}

fn middle_by_collection(u: &PointCloud, pairs: u64) -> (f64, f64) {
    let mut all = Vec::with_capacity(pairs as usize);
    for_each_pair(u, |v| all.push(v));
    let (k0, k1) = middle_ranks(pairs);
    let (left, hi, _) = all.select_nth_unstable_by(k1, f64::total_cmp);
    let hi = *hi;
    let lo = if k0 == k1 {
        hi
    } else {
        left.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    (lo, hi)
}

/// Exact order statistics in two sweeps: bucket counts keyed on the high
/// bits of the (nonnegative) squared distance, then a gather of the one or
/// two buckets holding the middle ranks.
fn middle_by_buckets(u: &PointCloud, pairs: u64) -> (f64, f64) {
    let key = |v: f64| (v.to_bits() >> BUCKET_SHIFT) as usize;
    let mut counts = vec![0u64; 1usize << (63 - BUCKET_SHIFT)];
    for_each_pair(u, |v| counts[key(v)] += 1);

    let (k0, k1) = middle_ranks(pairs);
    let (mut b0, mut b1, mut below0) = (None, None, 0u64);
    let mut seen = 0u64;
    for (b, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if b0.is_none() && seen + c > k0 as u64 {
            b0 = Some(b);
            below0 = seen;
        }
        if seen + c > k1 as u64 {
            b1 = Some(b);
            break;
        }
        seen += c;
    }
    let (b0, b1) = (b0.expect("rank k0 located"), b1.expect("rank k1 located"));
    drop(counts);

    let mut gathered = Vec::new();
    for_each_pair(u, |v| {
        let k = key(v);
        if k == b0 || k == b1 {
            gathered.push(v);
        }
    });
    gathered.sort_unstable_by(f64::total_cmp);
    let r0 = k0 - below0 as usize;
    (gathered[r0], gathered[r0 + (k1 - k0)])
}
