//! Dense point clouds and their first two moments.

use crate::error::{Error, Result};

/// An `n x d` matrix of finite reals stored row-major, one sample per row.
///
/// Construction validates shape and finiteness, so every `PointCloud` in
/// circulation has at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointCloud {
    pub fn new(data: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!("empty cloud ({n} x {d})")));
        }
        let expected = n
            .checked_mul(d)
            .ok_or_else(|| Error::invalid("cloud shape overflows"))?;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "buffer holds {} values, shape {n} x {d} needs {expected}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("empty cloud (no rows)"))?;
        let d = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::invalid(format!(
                    "row {i} has {} columns, expected {d}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(data, rows.len(), d)
    }

    /// One-dimensional cloud from scalars.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Mutable access for in-crate generators; callers must keep entries finite.
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    /// Every coordinate multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.data.iter().map(|v| v * alpha).collect(), self.n, self.d)
    }

    /// Copy shifted by `delta` along coordinate `axis`.
    pub fn translated(&self, axis: usize, delta: f64) -> Result<Self> {
        if axis >= self.d {
            return Err(Error::invalid(format!(
                "axis {axis} out of range for d = {}",
                self.d
            )));
        }
        let mut out = self.clone();
        for row in out.data.chunks_exact_mut(self.d) {
            row[axis] += delta;
        }
        Self::new(out.data, self.n, self.d)
    }

    /// New cloud made of the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            if i >= self.n {
                return Err(Error::invalid(format!("row index {i} out of range")));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(data, idx.len(), self.d)
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &PointCloud) -> Result<Self> {
        check_same_dim(self, other)?;
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Self::new(data, self.n + other.n, self.d)
    }
}

pub(crate) fn check_same_dim(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch(a.d, b.d));
    }
    Ok(())
}

/// Coordinate-wise mean of the rows.
pub fn centroid(cloud: &PointCloud) -> Vec<f64> {
    let mut mu = vec![0.0; cloud.d];
    for row in cloud.rows() {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    let inv = 1.0 / cloud.n as f64;
    for m in &mut mu {
        *m *= inv;
    }
    mu
}

/// Mean squared Euclidean deviation from the centroid, denominator `n`.
pub fn dispersion(cloud: &PointCloud) -> f64 {
    moments(cloud).1
}

/// Values per block in [`moments`]; a block stays in cache between its
/// two passes.
const MOMENT_BLOCK: usize = 1 << 14;

/// Centroid and dispersion in one sweep over memory: exact two-pass
/// moments per cache-sized block of rows, merged with the pairwise update
/// `M2 = M2_a + M2_b + |mu_b - mu_a|^2 n_a n_b / n`.
pub(crate) fn moments(cloud: &PointCloud) -> (Vec<f64>, f64) {
    let d = cloud.d;
    let rows_per_block = (MOMENT_BLOCK / d).max(1);
    let mut mu = vec![0.0; d];
    let mut m2 = 0.0;
    let mut count = 0usize;
    let mut local = vec![0.0; d];
    for block in cloud.data.chunks(rows_per_block * d) {
        let nb = block.len() / d;
        local.fill(0.0);
        for row in block.chunks_exact(d) {
            for (m, v) in local.iter_mut().zip(row) {
                *m += v;
            }
        }
        let inv = 1.0 / nb as f64;
        for m in &mut local {
            *m *= inv;
        }
        let local_m2: f64 = block.chunks_exact(d).map(|row| squared_distance(row, &local)).sum();
        if count == 0 {
            mu.copy_from_slice(&local);
            m2 = local_m2;
        } else {
            let total = (count + nb) as f64;
            let gap = squared_distance(&mu, &local);
            let t = nb as f64 / total;
            for (m, l) in mu.iter_mut().zip(&local) {
                *m += (l - *m) * t;
            }
            m2 += local_m2 + gap * count as f64 * t;
        }
        count += nb;
    }
    (mu, m2 / count as f64)
}

pub(crate) fn dispersion_about(cloud: &PointCloud, mu: &[f64]) -> f64 {
    let mut acc = 0.0;
    for row in cloud.rows() {
        acc += squared_distance(row, mu);
    }
    acc / cloud.n as f64
}

#[inline]
pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}
