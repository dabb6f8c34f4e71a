use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{evaluate, MetricConfig, MetricId};
use crate::synth::seed::derive_seed;
use crate::synth::{sample_gmm, GmmSpec, BASE_COMPONENT_OFFSET, BASE_SIGMA};

/// Medians below this are dominated by timer resolution.
const RESOLUTION_FLOOR: f64 = 10e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub metric_id: MetricId,
    pub n: usize,
    pub d: usize,
    /// Median over repeats, seconds.
    pub wall_time: f64,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSlope {
    pub metric_id: MetricId,
    /// Least-squares slope of `ln wall_time` against `ln n`.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub slopes: Vec<MetricSlope>,
    pub warnings: Vec<String>,
}

/// Slope of the least-squares line through `(ln x, ln y)`; `None` with
/// fewer than two distinct sizes.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Median wall time of `repeats` evaluations per metric and size, on pairs
/// drawn from the base four-component mixture (B shifted by one unit).
/// Runs on the calling thread.
pub fn runtime_bench(
    metrics: &[MetricConfig],
    sizes: &[usize],
    d: usize,
    repeats: usize,
    seed: u64,
) -> Result<BenchReport> {
    if repeats < 3 {
        return Err(Error::invalid(format!("repeats must be at least 3, got {repeats}")));
    }
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sizes must be non-empty and strictly increasing"));
    }
    if sizes[0] < 2 {
        return Err(Error::invalid("sizes must be at least 2"));
    }
    if metrics.is_empty() {
        return Err(Error::invalid("no metrics to benchmark"));
    }
    for m in metrics {
        m.validate()?;
    }
    let spec = GmmSpec::antipodal(4, d, BASE_COMPONENT_OFFSET, BASE_SIGMA)?;

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for &n in sizes {
        let a = sample_gmm(&spec, n, derive_seed(seed, n as u64, "bench-a"))?;
        let b = sample_gmm(&spec, n, derive_seed(seed, n as u64, "bench-b"))?.translated(0, 1.0)?;
        for m in metrics {
            let times = (0..repeats)
                .map(|_| evaluate(&a, &b, m).map(|r| r.wall_time))
                .collect::<Result<Vec<_>>>()?;
            let wall_time = median(times).max(f64::MIN_POSITIVE);
            if wall_time < RESOLUTION_FLOOR {
                warnings.push(format!(
                    "{} at n = {n}: median {:.3e} s is near timer resolution; \
                     increase n or d",
                    m.metric_id, wall_time
                ));
            }
            records.push(BenchRecord {
                metric_id: m.metric_id,
                n,
                d,
                wall_time,
                repeats,
            });
        }
    }
    let slopes = metrics
        .iter()
        .map(|m| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter(|r| r.metric_id == m.metric_id)
                .map(|r| (r.n as f64, r.wall_time))
                .unzip();
            MetricSlope {
                metric_id: m.metric_id,
                slope: loglog_slope(&xs, &ys),
            }
        })
        .collect();
    Ok(BenchReport { records, slopes, warnings })
}
