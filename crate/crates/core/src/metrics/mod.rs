//! The comparison distances and a uniform entry point, [`evaluate`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cfd::cfd;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};

pub mod assignment;
mod geometric;
mod mmd;
mod pairwise;
mod sinkhorn;
pub mod transport;
mod wasserstein;

pub use geometric::{chamfer_value, hausdorff_value};
pub use wasserstein::wasserstein2_value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Cfd,
    Wasserstein2Exact,
    Sinkhorn,
    MmdRbf,
    Hausdorff,
    Chamfer,
}

impl MetricId {
    pub const ALL: [MetricId; 6] = [
        MetricId::Cfd,
        MetricId::Wasserstein2Exact,
        MetricId::Sinkhorn,
        MetricId::MmdRbf,
        MetricId::Hausdorff,
        MetricId::Chamfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::Cfd => "cfd",
            MetricId::Wasserstein2Exact => "wasserstein2_exact",
            MetricId::Sinkhorn => "sinkhorn",
            MetricId::MmdRbf => "mmd_rbf",
            MetricId::Hausdorff => "hausdorff",
            MetricId::Chamfer => "chamfer",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown metric '{s}' (expected one of cfd, wasserstein2_exact, \
                     sinkhorn, mmd_rbf, hausdorff, chamfer)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthPolicy {
    MedianHeuristic,
    Fixed,
}

/// Which distance to compute and its tuning knobs. Fields that do not
/// apply to `metric_id` are carried along but ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub metric_id: MetricId,
    pub sinkhorn_epsilon: f64,
    pub sinkhorn_max_iter: usize,
    pub sinkhorn_tol: f64,
    pub mmd_bandwidth_policy: BandwidthPolicy,
    pub mmd_fixed_bandwidth: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            metric_id: MetricId::Cfd,
            sinkhorn_epsilon: 0.1,
            sinkhorn_max_iter: 1000,
            sinkhorn_tol: 1e-9,
            mmd_bandwidth_policy: BandwidthPolicy::MedianHeuristic,
            mmd_fixed_bandwidth: 1.0,
        }
    }
}

impl MetricConfig {
    pub fn new(metric_id: MetricId) -> Self {
        Self {
            metric_id,
            ..Self::default()
        }
    }

    pub fn sinkhorn(epsilon: f64) -> Self {
        Self {
            metric_id: MetricId::Sinkhorn,
            sinkhorn_epsilon: epsilon,
            ..Self::default()
        }
    }

    /// Default configuration for each of the six distances.
    pub fn all_defaults() -> Vec<Self> {
        MetricId::ALL.into_iter().map(Self::new).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sinkhorn_epsilon > 0.0 && self.sinkhorn_epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "sinkhorn_epsilon must be positive, got {}",
                self.sinkhorn_epsilon
            )));
        }
        if !(self.sinkhorn_tol > 0.0 && self.sinkhorn_tol.is_finite()) {
            return Err(Error::invalid(format!(
                "sinkhorn_tol must be positive, got {}",
                self.sinkhorn_tol
            )));
        }
        if self.sinkhorn_max_iter == 0 {
            return Err(Error::invalid("sinkhorn_max_iter must be positive"));
        }
        if self.mmd_bandwidth_policy == BandwidthPolicy::Fixed
            && !(self.mmd_fixed_bandwidth > 0.0 && self.mmd_fixed_bandwidth.is_finite())
        {
            return Err(Error::invalid(format!(
                "mmd_fixed_bandwidth must be positive, got {}",
                self.mmd_fixed_bandwidth
            )));
        }
        Ok(())
    }
}

/// A distance value with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub metric_id: MetricId,
    pub value: f64,
    /// Seconds.
    pub wall_time: f64,
    pub config_snapshot: MetricConfig,
    pub degenerate: bool,
    /// False only for an iterative solver that hit its cap.
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
}

/// Compute the distance selected by `cfg` between `a` and `b`.
pub fn evaluate(a: &PointCloud, b: &PointCloud, cfg: &MetricConfig) -> Result<MetricResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut out = MetricResult {
        metric_id: cfg.metric_id,
        value: 0.0,
        wall_time: 0.0,
        config_snapshot: cfg.clone(),
        degenerate: false,
        converged: true,
        iterations: None,
        bandwidth: None,
    };
    match cfg.metric_id {
        MetricId::Cfd => {
            let bd = cfd(a, b)?;
            out.value = bd.cfd;
            out.degenerate = bd.degenerate;
        }
        MetricId::Wasserstein2Exact => out.value = wasserstein2_value(a, b)?,
        MetricId::Sinkhorn => {
            let s = sinkhorn::sinkhorn_value(
                a,
                b,
                cfg.sinkhorn_epsilon,
                cfg.sinkhorn_max_iter,
                cfg.sinkhorn_tol,
            )?;
            out.value = s.value;
            out.converged = s.converged;
            out.iterations = Some(s.iterations);
        }
        MetricId::MmdRbf => {
            let fixed = match cfg.mmd_bandwidth_policy {
                BandwidthPolicy::MedianHeuristic => None,
                BandwidthPolicy::Fixed => Some(cfg.mmd_fixed_bandwidth),
            };
            let m = mmd::mmd_value(a, b, fixed)?;
            out.value = m.value;
            out.degenerate = m.degenerate;
            out.bandwidth = Some(m.bandwidth);
        }
        MetricId::Hausdorff => out.value = hausdorff_value(a, b)?,
        MetricId::Chamfer => out.value = chamfer_value(a, b)?,
    }
    out.wall_time = start.elapsed().as_secs_f64();
    if !(out.value.is_finite() && out.value >= 0.0) {
        return Err(Error::NumericalFailure(format!(
            "{} produced {}",
            cfg.metric_id, out.value
        )));
    }
    Ok(out)
}

/// Just the value, for callers that do not need timing or metadata.
pub fn distance(a: &PointCloud, b: &PointCloud, cfg: &MetricConfig) -> Result<f64> {
    evaluate(a, b, cfg).map(|r| r.value)
}
