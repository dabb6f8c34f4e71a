//! The five controlled sweeps: displacement, dispersion, scaling, topology
//! and outlier contamination.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gmm::{sample_gmm, GmmSpec};
use super::seed::{derive_seed, stream};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::metrics::{distance, MetricConfig, MetricId};

/// Spread of the base mixture and of every topology component.
pub const BASE_SIGMA: f64 = 2.5;
/// Base mixture means sit at `+-c e_1`, `+-c e_2`.
pub const BASE_COMPONENT_OFFSET: f64 = 2.0;
/// Offset along `e_1` held fixed while the dispersion sweep varies sigma.
pub const DISPERSION_OFFSET: f64 = 10.0;
/// Offset of the base pair that the scaling sweep rescales.
pub const SCALING_OFFSET: f64 = 2.0;
/// Offset of the base pair that the outlier sweep contaminates.
pub const OUTLIER_OFFSET: f64 = 2.0;
/// Spread of the replacement draws, centred at the origin.
pub const OUTLIER_TAU: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Displacement,
    Dispersion,
    Scaling,
    Topology,
    Outliers,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Displacement,
        ExperimentKind::Dispersion,
        ExperimentKind::Scaling,
        ExperimentKind::Topology,
        ExperimentKind::Outliers,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Displacement => "displacement",
            ExperimentKind::Dispersion => "dispersion",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Topology => "topology",
            ExperimentKind::Outliers => "outliers",
        }
    }

    /// Grid swept when none is given: offsets, spreads, scale factors,
    /// component counts or contamination percentages respectively.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            ExperimentKind::Displacement => vec![0.25, 0.5, 1.0, 2.0, 3.0, 4.0],
            ExperimentKind::Dispersion => vec![0.5, 1.0, 2.0, 4.0, 8.0],
            ExperimentKind::Scaling => vec![1.0, 2.0, 4.0, 8.0],
            ExperimentKind::Topology => vec![1.0, 2.0, 4.0, 8.0],
            ExperimentKind::Outliers => vec![0.0, 1.0, 2.0, 5.0],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown experiment '{s}' (expected displacement, dispersion, \
                     scaling, topology or outliers)"
                ))
            })
    }
}

/// How group B relates to group A in the sweeps built on a shifted pair
/// (displacement, dispersion, scaling, outliers).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// B is A's points moved by the offset. Every distance then sees the
    /// controlled change alone, free of finite-sample matching noise.
    #[default]
    Translated,
    /// B is an independent draw from the same law, then moved.
    Resampled,
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "translated" => Ok(Pairing::Translated),
            "resampled" => Ok(Pairing::Resampled),
            _ => Err(Error::invalid(format!(
                "unknown pairing '{s}' (expected translated or resampled)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub parameter_grid: Vec<f64>,
    pub metrics: Vec<MetricConfig>,
    #[serde(default)]
    pub pairing: Pairing,
}

impl ExperimentConfig {
    /// 50 trials from seed 42 over the default grid, all six distances.
    pub fn new(experiment: ExperimentKind, d: usize, n: usize) -> Self {
        Self {
            experiment,
            d,
            n,
            trials: 50,
            base_seed: 42,
            parameter_grid: experiment.default_grid(),
            metrics: MetricConfig::all_defaults(),
            pairing: Pairing::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.d < 2 {
            return Err(Error::invalid(format!("d must be at least 2, got {}", self.d)));
        }
        if self.n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {}", self.n)));
        }
        let grid = &self.parameter_grid;
        if grid.is_empty() {
            return Err(Error::invalid("parameter grid is empty"));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameter grid must be finite"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("parameter grid must be strictly increasing"));
        }
        let ok = |pred: fn(f64) -> bool, what: &str| -> Result<()> {
            match grid.iter().find(|&&v| !pred(v)) {
                Some(v) => Err(Error::invalid(format!(
                    "{} grid value {v} is not {what}",
                    self.experiment
                ))),
                None => Ok(()),
            }
        };
        match self.experiment {
            ExperimentKind::Displacement => {}
            ExperimentKind::Dispersion | ExperimentKind::Scaling => {
                ok(|v| v > 0.0, "positive")?
            }
            ExperimentKind::Topology => {
                ok(|v| v >= 1.0 && v.fract() == 0.0, "a positive integer")?;
                let k_max = *grid.last().unwrap() as usize;
                if k_max / 2 > self.d {
                    return Err(Error::invalid(format!(
                        "K = {k_max} needs d >= {}",
                        k_max / 2
                    )));
                }
            }
            ExperimentKind::Outliers => ok(|v| (0.0..=100.0).contains(&v), "a percentage")?,
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("no metrics configured"));
        }
        for (i, m) in self.metrics.iter().enumerate() {
            m.validate()?;
            if self.metrics[..i].iter().any(|p| p.metric_id == m.metric_id) {
                return Err(Error::invalid(format!("metric {} listed twice", m.metric_id)));
            }
        }
        Ok(())
    }

    fn require(&self, kind: ExperimentKind) -> Result<()> {
        if self.experiment != kind {
            return Err(Error::invalid(format!(
                "configuration is for {}, not {kind}",
                self.experiment
            )));
        }
        self.validate()
    }

    fn seed_a(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    fn seed(&self, trial: usize, label: &str) -> u64 {
        derive_seed(self.base_seed, trial as u64, label)
    }
}

/// One distance evaluation; `value` is absent when the metric failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub metric: MetricId,
    pub level: f64,
    pub trial: usize,
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAggregate {
    pub metric: MetricId,
    pub level: f64,
    /// Trials with a value.
    pub count: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation (divisor `count - 1`); zero for one trial.
    pub std: Option<f64>,
    /// `mean` divided by the mean at the first grid level.
    pub normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub experiment: ExperimentKind,
    pub levels: Vec<f64>,
    pub metrics: Vec<MetricId>,
    /// Ordered by metric, then level, then trial.
    pub cells: Vec<SweepCell>,
    /// Ordered by metric, then level.
    pub aggregates: Vec<SweepAggregate>,
}

impl SweepResult {
    /// Assemble from raw cells, recomputing every aggregate.
    pub fn from_cells(
        experiment: ExperimentKind,
        levels: Vec<f64>,
        metrics: Vec<MetricId>,
        mut cells: Vec<SweepCell>,
    ) -> Result<Self> {
        let pos = |xs: &[f64], v: f64| xs.iter().position(|&x| x == v);
        for c in &cells {
            if !metrics.contains(&c.metric) || pos(&levels, c.level).is_none() {
                return Err(Error::invalid(format!(
                    "cell ({}, {}, {}) lies outside the sweep",
                    c.metric, c.level, c.trial
                )));
            }
        }
        let key = |c: &SweepCell| {
            (
                metrics.iter().position(|&m| m == c.metric).unwrap(),
                pos(&levels, c.level).unwrap(),
                c.trial,
            )
        };
        cells.sort_by_key(key);
        if let Some(w) = cells.windows(2).find(|w| key(&w[0]) == key(&w[1])) {
            return Err(Error::invalid(format!(
                "duplicate cell ({}, {}, {})",
                w[0].metric, w[0].level, w[0].trial
            )));
        }

        let mut aggregates = Vec::with_capacity(metrics.len() * levels.len());
        for &m in &metrics {
            let mut first_mean = None;
            for (li, &level) in levels.iter().enumerate() {
                let vals: Vec<f64> = cells
                    .iter()
                    .filter(|c| c.metric == m && c.level == level)
                    .filter_map(|c| c.value)
                    .collect();
                let (mean, std) = mean_std(&vals);
                if li == 0 {
                    first_mean = mean;
                }
                let normalized = match (mean, first_mean) {
                    (Some(x), Some(f)) if f != 0.0 => Some(x / f),
                    _ => None,
                };
                aggregates.push(SweepAggregate {
                    metric: m,
                    level,
                    count: vals.len(),
                    mean,
                    std,
                    normalized,
                });
            }
        }
        Ok(Self {
            experiment,
            levels,
            metrics,
            cells,
            aggregates,
        })
    }

    pub fn aggregate(&self, metric: MetricId, level: f64) -> Option<&SweepAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.metric == metric && a.level == level)
    }

    /// Means across the grid for one metric, in grid order.
    pub fn means(&self, metric: MetricId) -> Vec<Option<f64>> {
        self.levels
            .iter()
            .map(|&l| self.aggregate(metric, l).and_then(|a| a.mean))
            .collect()
    }

    /// Per-trial values across the grid for one metric, in grid order.
    pub fn trial_values(&self, metric: MetricId, trial: usize) -> Vec<Option<f64>> {
        self.levels
            .iter()
            .map(|&l| {
                self.cells
                    .iter()
                    .find(|c| c.metric == metric && c.level == l && c.trial == trial)
                    .and_then(|c| c.value)
            })
            .collect()
    }
}

fn mean_std(vals: &[f64]) -> (Option<f64>, Option<f64>) {
    if vals.is_empty() {
        return (None, None);
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let std = if vals.len() == 1 {
        0.0
    } else {
        (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (Some(mean), Some(std))
}

fn base_mixture(d: usize, sigma: f64) -> Result<GmmSpec> {
    GmmSpec::antipodal(4, d, BASE_COMPONENT_OFFSET, sigma)
}

/// A from the base mixture, B paired per `cfg.pairing` and moved by
/// `offset` along the first axis.
fn shifted_pair(cfg: &ExperimentConfig, trial: usize, spec: &GmmSpec, offset: f64) -> Result<(PointCloud, PointCloud)> {
    let a = sample_gmm(spec, cfg.n, cfg.seed_a(trial))?;
    let b = match cfg.pairing {
        Pairing::Translated => a.translated(0, offset)?,
        Pairing::Resampled => sample_gmm(spec, cfg.n, cfg.seed(trial, "group-b"))?.translated(0, offset)?,
    };
    Ok((a, b))
}

/// Overwrites the first `count` rows of a fixed random permutation with
/// draws from `N(0, tau^2 I)`. Larger counts extend smaller ones.
fn contaminate(cloud: &PointCloud, count: usize, cfg: &ExperimentConfig, trial: usize, tag: &str) -> PointCloud {
    let mut order: Vec<usize> = (0..cloud.n()).collect();
    order.shuffle(&mut stream(cfg.seed(trial, &format!("outlier-rows-{tag}"))));
    let mut draws = stream(cfg.seed(trial, &format!("outlier-draws-{tag}")));
    let mut out = cloud.clone();
    for &i in &order[..count] {
        for v in out.row_mut(i) {
            let z: f64 = draws.sample(StandardNormal);
            *v = OUTLIER_TAU * z;
        }
    }
    out
}

fn trial_pairs(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<(PointCloud, PointCloud)>> {
    let grid = &cfg.parameter_grid;
    match cfg.experiment {
        ExperimentKind::Displacement => {
            let spec = base_mixture(cfg.d, BASE_SIGMA)?;
            let (a, b0) = shifted_pair(cfg, trial, &spec, 0.0)?;
            grid.iter()
                .map(|&delta| Ok((a.clone(), b0.translated(0, delta)?)))
                .collect()
        }
        ExperimentKind::Dispersion => grid
            .iter()
            .map(|&sigma| shifted_pair(cfg, trial, &base_mixture(cfg.d, sigma)?, DISPERSION_OFFSET))
            .collect(),
        ExperimentKind::Scaling => {
            let spec = base_mixture(cfg.d, BASE_SIGMA)?;
            let (a, b) = shifted_pair(cfg, trial, &spec, SCALING_OFFSET)?;
            grid.iter()
                .map(|&alpha| Ok((a.scaled(alpha)?, b.scaled(alpha)?)))
                .collect()
        }
        ExperimentKind::Topology => {
            let a = sample_gmm(&GmmSpec::isotropic(cfg.d, BASE_SIGMA)?, cfg.n, cfg.seed_a(trial))?;
            let seed_b = cfg.seed(trial, "group-b");
            grid.iter()
                .map(|&k| {
                    let spec = GmmSpec::antipodal(k as usize, cfg.d, BASE_COMPONENT_OFFSET, BASE_SIGMA)?;
                    Ok((a.clone(), sample_gmm(&spec, cfg.n, seed_b)?))
                })
                .collect()
        }
        ExperimentKind::Outliers => {
            let spec = base_mixture(cfg.d, BASE_SIGMA)?;
            let (a, b) = shifted_pair(cfg, trial, &spec, OUTLIER_OFFSET)?;
            grid.iter()
                .map(|&eps| {
                    let count = (eps * cfg.n as f64 / 100.0).floor() as usize;
                    Ok((
                        contaminate(&a, count, cfg, trial, "a"),
                        contaminate(&b, count, cfg, trial, "b"),
                    ))
                })
                .collect()
        }
    }
}

/// Run the sweep named by `cfg.experiment`. Trials run on the current
/// rayon pool; the result does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let per_trial: Vec<Vec<SweepCell>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let pairs = trial_pairs(cfg, t)?;
            let mut cells = Vec::with_capacity(pairs.len() * cfg.metrics.len());
            for (&level, (a, b)) in cfg.parameter_grid.iter().zip(&pairs) {
                for m in &cfg.metrics {
                    let (value, error) = match distance(a, b, m) {
                        Ok(v) => (Some(v), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    cells.push(SweepCell {
                        metric: m.metric_id,
                        level,
                        trial: t,
                        value,
                        error,
                    });
                }
            }
            Ok(cells)
        })
        .collect::<Result<_>>()?;
    SweepResult::from_cells(
        cfg.experiment,
        cfg.parameter_grid.clone(),
        cfg.metrics.iter().map(|m| m.metric_id).collect(),
        per_trial.into_iter().flatten().collect(),
    )
}

pub fn run_displacement(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.require(ExperimentKind::Displacement)?;
    run_experiment(cfg)
}

pub fn run_dispersion(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.require(ExperimentKind::Dispersion)?;
    run_experiment(cfg)
}

pub fn run_scaling(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.require(ExperimentKind::Scaling)?;
    run_experiment(cfg)
}

pub fn run_topology(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.require(ExperimentKind::Topology)?;
    run_experiment(cfg)
}

pub fn run_outliers(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.require(ExperimentKind::Outliers)?;
    run_experiment(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind, metrics: &[MetricId]) -> ExperimentConfig {
        ExperimentConfig {
            trials: 3,
            metrics: metrics.iter().copied().map(MetricConfig::new).collect(),
            ..ExperimentConfig::new(kind, 8, 40)
        }
    }

    #[test]
    fn validation() {
        let mut c = small(ExperimentKind::Displacement, &[MetricId::Cfd]);
        assert!(c.validate().is_ok());
        c.parameter_grid = vec![1.0, 1.0];
        assert!(c.validate().is_err());
        c.parameter_grid = vec![];
        assert!(c.validate().is_err());
        let mut c = small(ExperimentKind::Topology, &[MetricId::Cfd]);
        c.parameter_grid = vec![1.0, 2.5];
        assert!(c.validate().is_err());
        let mut c = small(ExperimentKind::Scaling, &[MetricId::Cfd, MetricId::Cfd]);
        assert!(c.validate().is_err());
        c.metrics.pop();
        c.trials = 0;
        assert!(c.validate().is_err());
        let c = small(ExperimentKind::Scaling, &[MetricId::Cfd]);
        assert!(run_dispersion(&c).is_err());
    }

    #[test]
    fn cells_and_aggregates_line_up() {
        let cfg = small(ExperimentKind::Displacement, &[MetricId::Cfd, MetricId::Hausdorff]);
        let r = run_displacement(&cfg).unwrap();
        assert_eq!(r.cells.len(), 2 * 6 * 3);
        assert_eq!(r.aggregates.len(), 2 * 6);
        assert_eq!(r.levels, cfg.parameter_grid);
        for a in &r.aggregates {
            let vals: Vec<f64> = r
                .cells
                .iter()
                .filter(|c| c.metric == a.metric && c.level == a.level)
                .map(|c| c.value.unwrap())
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((a.mean.unwrap() - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        }
        let again = SweepResult::from_cells(r.experiment, r.levels.clone(), r.metrics.clone(), r.cells.clone()).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn translated_pairing_isolates_offset() {
        let cfg = small(ExperimentKind::Displacement, &[MetricId::Hausdorff, MetricId::Wasserstein2Exact]);
        let r = run_displacement(&cfg).unwrap();
        for m in [MetricId::Hausdorff, MetricId::Wasserstein2Exact] {
            for (mean, &delta) in r.means(m).iter().zip(&cfg.parameter_grid) {
                assert!((mean.unwrap() - delta).abs() < 1e-9 * delta.max(1.0));
            }
        }
    }

    #[test]
    fn outlier_zero_matches_displacement() {
        let metrics = [MetricId::Cfd, MetricId::Chamfer];
        let mut out = small(ExperimentKind::Outliers, &metrics);
        out.parameter_grid = vec![0.0, 5.0];
        let mut disp = small(ExperimentKind::Displacement, &metrics);
        disp.parameter_grid = vec![OUTLIER_OFFSET];
        let ro = run_outliers(&out).unwrap();
        let rd = run_displacement(&disp).unwrap();
        for m in metrics {
            for t in 0..3 {
                assert_eq!(ro.trial_values(m, t)[0], rd.trial_values(m, t)[0]);
            }
        }
    }

    #[test]
    fn resampled_pairing_differs_but_is_reproducible() {
        let mut cfg = small(ExperimentKind::Displacement, &[MetricId::Cfd]);
        cfg.pairing = Pairing::Resampled;
        let r1 = run_experiment(&cfg).unwrap();
        let r2 = run_experiment(&cfg).unwrap();
        assert_eq!(r1, r2);
        cfg.pairing = Pairing::Translated;
        assert_ne!(run_experiment(&cfg).unwrap(), r1);
    }

    #[test]
    fn topology_centroid_of_b_near_origin() {
        let cfg = small(ExperimentKind::Topology, &[MetricId::Cfd]);
        for t in 0..cfg.trials {
            let pairs = trial_pairs(&cfg, t).unwrap();
            for (_, b) in &pairs {
                let band = 3.0 * BASE_SIGMA * 2.0 / (cfg.n as f64).sqrt();
                assert!(crate::cloud::centroid(b).iter().all(|v| v.abs() < band));
            }
        }
    }
}
