use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fusedist::eval::{cddr_report, rdr_protocol, runtime_bench};
use fusedist::io::{
    encode_aggregate_csv, encode_bench_csv, encode_sweep_csv, load_matrix, CddrManifest,
    RunManifest, Task,
};
use fusedist::synth::{run_experiment, ExperimentConfig, ExperimentKind, Pairing};
use fusedist::{cfd, evaluate, BandwidthPolicy, CfdBreakdown, Error, MetricConfig, MetricId, MetricResult, Result};

#[derive(Parser)]
#[command(name = "fusedist", version, about = "Distances between groups of embeddings")]
struct Cli {
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, env = "FUSEDIST_THREADS")]
    threads: Option<usize>,

    /// Run on a single thread (reference mode).
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two matrix files (CSV or FDM1 binary).
    Dist(DistArgs),
    /// Monte-Carlo sweep of one controlled experiment.
    Sweep(SweepArgs),
    /// Resplit distance ratio of one sample against a reference pair.
    Rdr(RdrArgs),
    /// Performance drops and their correlation with distances.
    Cddr(CddrArgs),
    /// Runtime against sample size.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct MetricFlags {
    /// Sinkhorn regularisation.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sinkhorn iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Sinkhorn marginal tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Fixed MMD bandwidth instead of the median heuristic.
    #[arg(long)]
    bandwidth: Option<f64>,
}

impl MetricFlags {
    fn config(&self, id: MetricId) -> MetricConfig {
        let mut c = MetricConfig::new(id);
        if let Some(e) = self.epsilon {
            c.sinkhorn_epsilon = e;
        }
        if let Some(m) = self.max_iter {
            c.sinkhorn_max_iter = m;
        }
        if let Some(t) = self.tol {
            c.sinkhorn_tol = t;
        }
        if let Some(h) = self.bandwidth {
            c.mmd_bandwidth_policy = BandwidthPolicy::Fixed;
            c.mmd_fixed_bandwidth = h;
        }
        c
    }
}

#[derive(Args)]
struct DistArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    metric: MetricId,
    /// Include the full decomposition (cfd only).
    #[arg(long)]
    breakdown: bool,
    #[command(flatten)]
    flags: MetricFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, required_unless_present = "manifest")]
    experiment: Option<ExperimentKind>,
    #[arg(long, default_value_t = 32)]
    d: usize,
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated grid replacing the experiment default.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Comma-separated metric ids (default: all six).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<MetricId>>,
    #[arg(long, default_value = "translated")]
    pairing: Pairing,
    #[command(flatten)]
    flags: MetricFlags,
    /// Directory for the CSV, JSON and manifest files; aggregates go to
    /// stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run manifest; replaces every configuration flag.
    #[arg(long, conflicts_with_all = ["experiment", "grid", "metrics"])]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct RdrArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ref_a: PathBuf,
    #[arg(long)]
    ref_b: PathBuf,
    #[arg(long)]
    metric: MetricId,
    #[arg(long, default_value_t = 50)]
    splits: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    flags: MetricFlags,
}

#[derive(Args)]
struct CddrArgs {
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000,16000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 128)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "cfd,mmd_rbf,hausdorff,chamfer")]
    metrics: Vec<MetricId>,
    #[command(flatten)]
    flags: MetricFlags,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DistOutput {
    #[serde(flatten)]
    result: MetricResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<CfdBreakdown>,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn dist(args: DistArgs) -> Result<()> {
    if args.breakdown && args.metric != MetricId::Cfd {
        return Err(Error::InvalidInput("--breakdown applies to --metric cfd only".into()));
    }
    let a = load_matrix(&args.a, None)?;
    let b = load_matrix(&args.b, None)?;
    let result = evaluate(&a, &b, &args.flags.config(args.metric))?;
    let breakdown = if args.breakdown { Some(cfd(&a, &b)?) } else { None };
    print!("{}", json(&DistOutput { result, breakdown }));
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let (config, out) = match &args.manifest {
        Some(path) => {
            let m = RunManifest::load(path)?;
            let Task::Sweep { config } = m.task else {
                return Err(Error::InvalidInput(format!("{}: not a sweep manifest", path.display())));
            };
            (config, args.out.clone().or(m.output_dir))
        }
        None => {
            let kind = args.experiment.expect("clap enforces --experiment");
            let ids = args.metrics.clone().unwrap_or_else(|| MetricId::ALL.to_vec());
            let config = ExperimentConfig {
                experiment: kind,
                d: args.d,
                n: args.n,
                trials: args.trials,
                base_seed: args.seed,
                parameter_grid: args.grid.clone().unwrap_or_else(|| kind.default_grid()),
                metrics: ids.into_iter().map(|id| args.flags.config(id)).collect(),
                pairing: args.pairing,
            };
            (config, args.out.clone())
        }
    };
    let result = run_experiment(&config)?;
    let Some(dir) = out else {
        print!("{}", encode_aggregate_csv(&result));
        return Ok(());
    };
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let stem = config.experiment.as_str();
    write(&dir.join(format!("{stem}_cells.csv")), &encode_sweep_csv(&result))?;
    write(&dir.join(format!("{stem}_aggregates.csv")), &encode_aggregate_csv(&result))?;
    write(&dir.join(format!("{stem}.json")), &json(&result))?;
    let manifest = RunManifest {
        task: Task::Sweep { config },
        inputs: Vec::new(),
        output_dir: Some(dir.clone()),
    };
    manifest.save(&dir.join(format!("{stem}_manifest.json")))?;
    for (id, failed) in result.metrics.iter().map(|&m| {
        (m, result.cells.iter().filter(|c| c.metric == m && c.value.is_none()).count())
    }) {
        if failed > 0 {
            eprintln!("warning: {failed} {id} cells failed; reasons in {stem}.json");
        }
    }
    Ok(())
}

fn rdr(args: RdrArgs) -> Result<()> {
    let cloud = load_matrix(&args.input, None)?;
    let ra = load_matrix(&args.ref_a, None)?;
    let rb = load_matrix(&args.ref_b, None)?;
    let report = rdr_protocol(&cloud, (&ra, &rb), &args.flags.config(args.metric), args.splits, args.seed)?;
    print!("{}", json(&report));
    Ok(())
}

fn cddr(args: CddrArgs) -> Result<()> {
    let manifest = CddrManifest::load(&args.manifest)?;
    print!("{}", json(&cddr_report(&manifest)?));
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let metrics: Vec<MetricConfig> = args.metrics.iter().map(|&id| args.flags.config(id)).collect();
    let report = runtime_bench(&metrics, &args.sizes, args.d, args.repeats, args.seed)?;
    let csv = encode_bench_csv(&report.records);
    match &args.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    for s in &report.slopes {
        match s.slope {
            Some(v) => eprintln!("{}: log-log slope {v:.3}", s.metric_id),
            None => eprintln!("{}: log-log slope undefined", s.metric_id),
        }
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let threads = if cli.serial { 1 } else { cli.threads.unwrap_or(0) };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    match cli.command {
        Command::Dist(a) => dist(a),
        Command::Sweep(a) => sweep(a),
        Command::Rdr(a) => rdr(a),
        Command::Cddr(a) => cddr(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
