//! Equal-weight spherical Gaussian mixtures.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::seed::{derive_seed, stream};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmSpec {
    k: usize,
    d: usize,
    /// `k x d`, row-major.
    means: Vec<f64>,
    sigma: f64,
}

impl GmmSpec {
    pub fn new(means: Vec<Vec<f64>>, sigma: f64) -> Result<Self> {
        let k = means.len();
        if k == 0 {
            return Err(Error::invalid("a mixture needs at least one component"));
        }
        let d = means[0].len();
        if d == 0 {
            return Err(Error::invalid("component means must have dimension >= 1"));
        }
        if let Some(bad) = means.iter().position(|m| m.len() != d) {
            return Err(Error::invalid(format!(
                "component {bad} has dimension {}, expected {d}",
                means[bad].len()
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        let means: Vec<f64> = means.into_iter().flatten().collect();
        if means.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("component means must be finite"));
        }
        Ok(Self { k, d, means, sigma })
    }

    /// Single component at the origin.
    pub fn isotropic(d: usize, sigma: f64) -> Result<Self> {
        Self::antipodal(1, d, 0.0, sigma)
    }

    /// `k` components at `+-c e_j`, `j = 0, 1, ...`, filling axes pairwise;
    /// an odd `k` puts the leftover component at the origin. The means
    /// always sum to zero.
    pub fn antipodal(k: usize, d: usize, c: f64, sigma: f64) -> Result<Self> {
        if k == 0 || d == 0 {
            return Err(Error::invalid("k and d must be positive"));
        }
        if k / 2 > d {
            return Err(Error::invalid(format!(
                "{k} antipodal components need d >= {}, got {d}",
                k / 2
            )));
        }
        let mut means = Vec::with_capacity(k);
        for j in 0..k / 2 {
            for sign in [1.0, -1.0] {
                let mut m = vec![0.0; d];
                m[j] = sign * c;
                means.push(m);
            }
        }
        if k % 2 == 1 {
            means.push(vec![0.0; d]);
        }
        Self::new(means, sigma)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mean(&self, c: usize) -> &[f64] {
        &self.means[c * self.d..(c + 1) * self.d]
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma, ..self.clone() })
    }

    /// Sum of the component means, one entry per coordinate.
    pub fn mean_sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.d];
        for c in 0..self.k {
            for (acc, v) in s.iter_mut().zip(self.mean(c)) {
                *acc += v;
            }
        }
        s
    }
}

/// `n` i.i.d. draws from `spec`. Component labels and Gaussian noise come
/// from separate sub-streams of `seed`, so two specs that differ only in
/// `sigma` share both.
pub fn sample_gmm(spec: &GmmSpec, n: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let mut labels = stream(derive_seed(seed, 0, "gmm-component"));
    let mut noise = stream(derive_seed(seed, 0, "gmm-noise"));
    let mut data = Vec::with_capacity(n * spec.d);
    for _ in 0..n {
        let c = if spec.k == 1 { 0 } else { labels.random_range(0..spec.k) };
        for &m in spec.mean(c) {
            let z: f64 = noise.sample(StandardNormal);
            data.push(m + spec.sigma * z);
        }
    }
    PointCloud::new(data, n, spec.d)
}
