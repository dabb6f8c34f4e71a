//! Evaluation protocols: the resplit distance ratio (RDR), the cross-domain
//! performance drop (CDDR) and its correlation with distances, and runtime
//! scaling.

mod bench;
mod cddr;
mod rdr;

pub use bench::{loglog_slope, runtime_bench, BenchRecord, BenchReport, MetricSlope};
pub use cddr::{
    cddr, cddr_report, distance_cddr_correlation, CddrRecord, CddrReport, CorrelationRecord,
};
pub use rdr::{rdr_protocol, EvalRecord, RdrReport, SplitFailure};

/// Mean and sample standard deviation (divisor `n - 1`, zero for one value).
pub(crate) fn summarize(vals: &[f64]) -> Option<(f64, f64)> {
    if vals.is_empty() {
        return None;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}
