use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::summarize;
use crate::cloud::{check_same_dim, PointCloud};
use crate::error::{Error, Result};
use crate::metrics::{distance, evaluate, MetricConfig, MetricId};
use crate::synth::seed::stream;

/// Distance between two halves of one sample over the distance of a
/// reference pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub label: String,
    pub numerator_distance: f64,
    pub denominator_distance: f64,
    pub rdr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFailure {
    pub split: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdrReport {
    pub metric: MetricId,
    pub records: Vec<EvalRecord>,
    pub failures: Vec<SplitFailure>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

/// Split `cloud` into random halves `splits` times (split `i` shuffles with
/// seed `seed + i`) and divide each half-to-half distance by the distance
/// of the reference pair, which is computed once.
pub fn rdr_protocol(
    cloud: &PointCloud,
    reference: (&PointCloud, &PointCloud),
    metric: &MetricConfig,
    splits: usize,
    seed: u64,
) -> Result<RdrReport> {
    if cloud.n() < 4 {
        return Err(Error::invalid(format!("RDR needs at least 4 points, got {}", cloud.n())));
    }
    if splits == 0 {
        return Err(Error::invalid("splits must be at least 1"));
    }
    check_same_dim(reference.0, reference.1)?;
    check_same_dim(cloud, reference.0)?;

    let den = evaluate(reference.0, reference.1, metric)?;
    if den.degenerate || den.value <= 0.0 {
        return Err(Error::NumericalFailure(format!(
            "reference pair has {} distance {}; RDR is undefined",
            metric.metric_id, den.value
        )));
    }

    let n = cloud.n();
    let mut records = Vec::with_capacity(splits);
    let mut failures = Vec::new();
    for i in 0..splits {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stream(seed.wrapping_add(i as u64)));
        let (left, right) = order.split_at_mut(n / 2);
        left.sort_unstable();
        right.sort_unstable();
        let outcome = cloud
            .select_rows(left)
            .and_then(|a1| cloud.select_rows(right).map(|a2| (a1, a2)))
            .and_then(|(a1, a2)| distance(&a1, &a2, metric));
        match outcome {
            Ok(num) => records.push(EvalRecord {
                label: format!("split-{i}"),
                numerator_distance: num,
                denominator_distance: den.value,
                rdr: num / den.value,
            }),
            Err(e) => failures.push(SplitFailure { split: i, error: e.to_string() }),
        }
    }
    let ratios: Vec<f64> = records.iter().map(|r| r.rdr).collect();
    let summary = summarize(&ratios);
    Ok(RdrReport {
        metric: metric.metric_id,
        records,
        failures,
        mean: summary.map(|s| s.0),
        std: summary.map(|s| s.1),
    })
}
