//! Distances between groups of embeddings.
//!
//! The central quantity is the cross-fusion distance ([`cfd()`]): the fused
//! cloud of two groups is split into within-group dispersion and centroid
//! displacement, and the distance is the negative log of the within share.
//! It is linear in `n * d`, invariant to global rescaling, and zero exactly
//! when the two centroids coincide.
//!
//! Alongside it the crate ships the usual comparison distances
//! ([`metrics`]): exact and entropic 2-Wasserstein, RBF-kernel MMD,
//! Hausdorff and symmetric Chamfer. [`synth`] generates seeded Gaussian
//! mixture clouds and runs Monte-Carlo sweeps over displacement, dispersion,
//! scaling, topology and outlier contamination. [`eval`] holds the
//! split-ratio calibration protocol, degradation-rate correlation and a
//! runtime scaling bench. [`io`] reads and writes matrices, manifests and
//! reports.
//!
//! ```
//! use fusedist::{cfd, PointCloud};
//!
//! let a = PointCloud::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
//! let b = PointCloud::from_rows(&[vec![4.0], vec![6.0]]).unwrap();
//! let out = cfd(&a, &b).unwrap();
//! assert!((out.cfs - 0.2).abs() < 1e-12);
//! assert!((out.cfd - 0.2f64.ln().abs()).abs() < 1e-12);
//! ```

pub mod cfd;
pub mod cloud;
pub mod error;
pub mod eval;
pub mod io;
pub mod metrics;
pub mod synth;

pub use cfd::{cfd, cfd_union_oracle, CfdBreakdown, DEGENERACY_EPS};
pub use cloud::{centroid, dispersion, PointCloud};
pub use error::{Error, Result};
pub use metrics::{evaluate, BandwidthPolicy, MetricConfig, MetricId, MetricResult};
