//! Values frozen from independent implementations (numpy / scipy) and
//! statistical behaviour of the sweeps and protocols.

use fusedist::eval::{distance_cddr_correlation, rdr_protocol};
use fusedist::synth::{
    run_experiment, sample_gmm, ExperimentConfig, ExperimentKind, GmmSpec, Pairing, BASE_SIGMA,
};
use fusedist::{cfd, evaluate, MetricConfig, MetricId, PointCloud};

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "{got} vs {want}");
}

fn small_pair() -> (PointCloud, PointCloud) {
    let a = PointCloud::from_rows(&[[0.0, 1.0], [2.0, 3.0], [4.0, -1.0]]).unwrap();
    let b = PointCloud::from_rows(&[[1.0, 1.0], [5.0, 2.0]]).unwrap();
    (a, b)
}

#[test]
fn unequal_sizes_against_scipy() {
    let (a, b) = small_pair();
    let v = |id| evaluate(&a, &b, &MetricConfig::new(id)).unwrap().value;
    close(v(MetricId::Cfd), 0.059423420470800764, 1e-12);
    // Transport LP solved with scipy.optimize.linprog (HiGHS).
    close(v(MetricId::Wasserstein2Exact), 2.48327740429189, 1e-9);
    close(v(MetricId::Hausdorff), 3.1622776601683795, 1e-12);
    close(v(MetricId::Chamfer), 2.1069603546534568, 1e-12);
    let m = evaluate(&a, &b, &MetricConfig::new(MetricId::MmdRbf)).unwrap();
    close(m.bandwidth.unwrap(), 3.3839144678161843, 1e-12);
    close(m.value, 0.31579182459491206, 1e-10);
}

#[test]
fn sinkhorn_approaches_exact_from_above() {
    let (a, b) = small_pair();
    let exact = evaluate(&a, &b, &MetricConfig::new(MetricId::Wasserstein2Exact)).unwrap().value;
    let mut prev = f64::INFINITY;
    for eps in [1.0, 0.1, 0.01, 0.001] {
        let s = evaluate(&a, &b, &MetricConfig::sinkhorn(eps)).unwrap();
        assert!(s.converged);
        assert!(s.value >= exact * (1.0 - 1e-9), "eps {eps}: {}", s.value);
        assert!(s.value <= prev * (1.0 + 1e-8), "eps {eps}: {} > {prev}", s.value);
        prev = s.value;
    }
    close(prev, exact, 1e-3);
}

#[test]
fn published_table_correlations_by_pearson() {
    // numpy.corrcoef on the published averaged columns.
    let drops = [0.3469, 0.1204, 0.1459, 0.0726];
    let cfd_col = [0.4282, 0.2243, 0.0459, 0.0254];
    let w2_col = [36.9427, 30.9044, 20.2304, 13.0406];
    close(distance_cddr_correlation(&cfd_col, &drops).unwrap(), 0.882650605829509, 1e-12);
    close(distance_cddr_correlation(&w2_col, &drops).unwrap(), 0.799206906359308, 1e-12);
}

fn config(kind: ExperimentKind, metrics: &[MetricId], trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        trials,
        metrics: metrics.iter().copied().map(MetricConfig::new).collect(),
        ..ExperimentConfig::new(kind, 32, 300)
    }
}

#[test]
fn resampled_displacement_at_zero_offset() {
    let mut cfg = config(ExperimentKind::Displacement, &[MetricId::Cfd], 5);
    cfg.pairing = Pairing::Resampled;
    cfg.parameter_grid = vec![0.0, 1.0];
    let r = run_experiment(&cfg).unwrap();
    assert!(r.means(MetricId::Cfd)[0].unwrap() < 0.01);
}

#[test]
fn wasserstein_is_affine_in_offset() {
    let mut cfg = config(ExperimentKind::Displacement, &[MetricId::Wasserstein2Exact], 3);
    cfg.parameter_grid = vec![1.0, 2.0, 3.0, 4.0];
    let r = run_experiment(&cfg).unwrap();
    let y: Vec<f64> = r.means(MetricId::Wasserstein2Exact).into_iter().map(Option::unwrap).collect();
    let x = &cfg.parameter_grid;
    let (mx, my) = (x.iter().sum::<f64>() / 4.0, y.iter().sum::<f64>() / 4.0);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(r2 > 0.99, "R^2 = {r2}, means {y:?}");
}

#[test]
fn very_wide_dispersion_hides_offset() {
    let mut cfg = config(ExperimentKind::Dispersion, &[MetricId::Cfd], 3);
    cfg.parameter_grid = vec![100.0];
    let r = run_experiment(&cfg).unwrap();
    assert!(r.means(MetricId::Cfd)[0].unwrap() < 0.05);
}

#[test]
fn unimodal_topology_matches_identity_baseline() {
    let mut cfg = config(ExperimentKind::Topology, &[MetricId::Cfd], 5);
    cfg.parameter_grid = vec![1.0];
    let r = run_experiment(&cfg).unwrap();
    assert!(r.means(MetricId::Cfd)[0].unwrap() < 0.01);
}

#[test]
fn scaling_sweep_contracts() {
    let ids = [MetricId::Cfd, MetricId::Hausdorff, MetricId::MmdRbf];
    let r = run_experiment(&config(ExperimentKind::Scaling, &ids, 3)).unwrap();
    for t in 0..3 {
        let cfd_vals: Vec<f64> = r.trial_values(MetricId::Cfd, t).into_iter().map(Option::unwrap).collect();
        let h: Vec<f64> = r.trial_values(MetricId::Hausdorff, t).into_iter().map(Option::unwrap).collect();
        let mmd: Vec<f64> = r.trial_values(MetricId::MmdRbf, t).into_iter().map(Option::unwrap).collect();
        for v in &cfd_vals {
            close(*v, cfd_vals[0], 1e-9);
        }
        close(h[3], 8.0 * h[0], 1e-9);
        let (lo, hi) = mmd.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!((hi - lo) / lo < 1e-6);
    }
}

#[test]
fn cfd_resplit_ratio_shrinks_with_sample_size() {
    let spec = GmmSpec::antipodal(4, 16, 2.0, BASE_SIGMA).unwrap();
    let metric = MetricConfig::new(MetricId::Cfd);
    let mean_rdr = |n: usize| {
        let cloud = sample_gmm(&spec, n, 1).unwrap();
        let ra = sample_gmm(&spec, n, 2).unwrap();
        let rb = ra.translated(0, 10.0 * BASE_SIGMA).unwrap();
        rdr_protocol(&cloud, (&ra, &rb), &metric, 50, 7).unwrap().mean.unwrap()
    };
    let (small, large) = (mean_rdr(400), mean_rdr(4000));
    assert!(large < small, "{large} !< {small}");
}

#[test]
fn worked_breakdown() {
    let a = PointCloud::from_column(&[0.0, 2.0]).unwrap();
    let b = PointCloud::from_column(&[4.0, 6.0]).unwrap();
    let bd = cfd(&a, &b).unwrap();
    assert_eq!((bd.sigma2_a, bd.sigma2_b, bd.sigma2_ab), (1.0, 1.0, 5.0));
    assert!((bd.cfd + 0.2f64.ln()).abs() < 1e-12);
}
