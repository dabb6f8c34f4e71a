//! Seeded synthetic clouds and the Monte-Carlo sweeps built on them.

mod experiment;
mod gmm;
pub mod seed;

pub use experiment::{
    run_dispersion, run_displacement, run_experiment, run_outliers, run_scaling, run_topology,
    ExperimentConfig, ExperimentKind, Pairing, SweepAggregate, SweepCell, SweepResult,
    BASE_COMPONENT_OFFSET, BASE_SIGMA, DISPERSION_OFFSET, OUTLIER_OFFSET, OUTLIER_TAU,
    SCALING_OFFSET,
};
pub use gmm::{sample_gmm, GmmSpec};
