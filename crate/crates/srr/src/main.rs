use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use srr_core::analysis::{self, BreachReport, StopReason};
use srr_core::market::{self, Alignment};
use srr_core::pca::{self, CovarianceDivisor};
use srr_core::synthetic::NormalStream;
use srr_core::{DMatrix, DVector, GbmSpec, PipelineConfig, SigmaMethod, SvdMode};

use srr::io::{self, PriceLayout};
use srr::manifest::{InputDigest, RunManifest};

#[derive(Parser)]
#[command(
    name = "srr",
    version,
    about = "Shadow riskless rate estimation from price histories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the moving-window SRR pipeline over a price file.
    Srr(SrrArgs),
    /// Write a seeded correlated-GBM price file (wide layout).
    Simulate(SimulateArgs),
    /// Quantile summary of one column of a series file.
    Stats(StatsArgs),
    /// Pick n assets at capitalization percentiles.
    Select(SelectArgs),
    /// Minimum-variance rate over principal-component composites.
    MinRate(MinRateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Auto,
    Long,
    Wide,
}

impl From<LayoutArg> for PriceLayout {
    fn from(v: LayoutArg) -> Self {
        match v {
            LayoutArg::Auto => PriceLayout::Auto,
            LayoutArg::Long => PriceLayout::Long,
            LayoutArg::Wide => PriceLayout::Wide,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignArg {
    Intersect,
    ErrorOnGap,
}

impl From<AlignArg> for Alignment {
    fn from(v: AlignArg) -> Self {
        match v {
            AlignArg::Intersect => Alignment::IntersectDates,
            AlignArg::ErrorOnGap => Alignment::ErrorOnGap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Regression,
}

#[derive(Clone, Copy, ValueEnum)]
enum SvdModeArg {
    Min,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum DivisorArg {
    #[value(name = "m-1")]
    SampleMinusOne,
    #[value(name = "m")]
    Population,
}

impl From<DivisorArg> for CovarianceDivisor {
    fn from(v: DivisorArg) -> Self {
        match v {
            DivisorArg::SampleMinusOne => CovarianceDivisor::SampleMinusOne,
            DivisorArg::Population => CovarianceDivisor::Population,
        }
    }
}

#[derive(Args)]
struct PriceInput {
    /// Price file (long `date,asset_id,price` or wide `date,<ids>`).
    #[arg(long)]
    prices: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    layout: LayoutArg,
    /// Date alignment across assets.
    #[arg(long, value_enum, default_value = "intersect")]
    align: AlignArg,
}

#[derive(Args)]
struct SrrArgs {
    #[command(flatten)]
    input: PriceInput,
    /// Window length in trading days.
    #[arg(long, default_value_t = srr_core::pipeline::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, value_enum, default_value = "direct")]
    method: MethodArg,
    /// Band of the singular-value clamp.
    #[arg(long, default_value_t = srr_core::pipeline::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Band of the secondary clamp on nu.
    #[arg(long, default_value_t = srr_core::pipeline::DEFAULT_DELTA_NU)]
    delta_nu: f64,
    /// Band of the secondary clamp on each sigma_pi component.
    #[arg(long, default_value_t = srr_core::pipeline::DEFAULT_DELTA_SIGMA)]
    delta_sigma: f64,
    /// Which singular values are clamped [default: min for direct, all for regression].
    #[arg(long, value_enum)]
    svd_mode: Option<SvdModeArg>,
    /// Covariance divisor for the PCA.
    #[arg(long, value_enum, default_value = "m-1")]
    divisor: DivisorArg,
    /// Series CSV. The singular-value dump and manifest are written next to
    /// it as `<stem>.singular.csv` and `<stem>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
    /// Run the per-date stage on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of assets.
    #[arg(long)]
    n: usize,
    /// Number of price observations per asset.
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    seed: u64,
    /// Per-day drifts, comma separated (drawn from the seed when omitted).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    mu: Option<Vec<f64>>,
    /// Per-day loadings, N×(N−1) row-major, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    sigma: Option<Vec<f64>>,
    /// Wide-layout price CSV; the manifest goes to `<stem>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// Series CSV written by `srr srr`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "nu_hat")]
    column: String,
}

#[derive(Args)]
struct SelectArgs {
    /// Universe CSV with columns `asset_id,market_cap`.
    #[arg(long)]
    universe: PathBuf,
    #[arg(long)]
    n: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Breaching,
    Previous,
}

#[derive(Args)]
struct MinRateArgs {
    #[command(flatten)]
    input: PriceInput,
    /// Starting number of composites.
    #[arg(long)]
    k0: usize,
    #[arg(long)]
    tol_sigma: f64,
    #[arg(long)]
    tol_r: f64,
    /// Use only the trailing rows of the return panel.
    #[arg(long)]
    window: Option<usize>,
    /// Portfolio reported when a tolerance is breached.
    #[arg(long, value_enum, default_value = "breaching")]
    report: ReportArg,
    /// Also solve the long-only minimum-variance problem on the raw assets.
    #[arg(long)]
    compare: bool,
}

/// Exit code 1: input could not be read or parsed. Exit code 2: the
/// computation itself failed.
enum Failure {
    Ingest(String),
    Compute(String),
}

impl Failure {
    fn ingest(e: impl std::fmt::Display) -> Self {
        Self::Ingest(e.to_string())
    }

    fn compute(e: impl std::fmt::Display) -> Self {
        Self::Compute(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_returns(input: &PriceInput) -> Result<(srr_core::ReturnMatrix, Vec<u8>), Failure> {
    let bytes = io::load_bytes(&input.prices).map_err(Failure::ingest)?;
    let series = io::parse_prices(&bytes, input.layout.into()).map_err(Failure::ingest)?;
    let returns = market::log_returns(&series, input.align.into()).map_err(Failure::ingest)?;
    Ok((returns, bytes))
}

fn cmd_srr(args: SrrArgs) -> Outcome {
    let method = match args.method {
        MethodArg::Direct => SigmaMethod::Direct,
        MethodArg::Regression => SigmaMethod::Regression,
    };
    let mut cfg = PipelineConfig::for_method(method);
    cfg.window = args.window;
    cfg.epsilon = args.epsilon;
    cfg.delta_nu = args.delta_nu;
    cfg.delta_sigma = args.delta_sigma;
    if let Some(mode) = args.svd_mode {
        cfg.svd_mode = match mode {
            SvdModeArg::Min => SvdMode::MinOnly,
            SvdModeArg::All => SvdMode::All,
        };
    }
    cfg.calibration.covariance_divisor = args.divisor.into();
    cfg.calibration.regression_divisor = args.divisor.into();

    let (returns, bytes) = load_returns(&args.input)?;
    let rows = if args.sequential {
        srr_core::run_srr_series(&returns, &cfg)
    } else {
        srr::run_srr_series_parallel(&returns, &cfg)
    }
    .map_err(Failure::compute)?;

    let singular = sibling(&args.out, ".singular.csv");
    let manifest_path = sibling(&args.out, ".manifest.json");
    io::write_series_csv(&args.out, &rows).map_err(Failure::compute)?;
    io::write_singular_values(&singular, &rows).map_err(Failure::compute)?;
    let mut manifest = RunManifest::new("srr");
    manifest.config = Some((&cfg).into());
    manifest.input = Some(InputDigest::of_bytes(&bytes));
    manifest.outputs = vec![file_name(&args.out), file_name(&singular)];
    manifest.write(&manifest_path).map_err(Failure::compute)
}

/// Drifts around 4e-4 per day and loadings around 1% per day, drawn from a
/// stream derived from the seed.
fn random_parameters(n: usize, seed: u64) -> (DVector<f64>, DMatrix<f64>) {
    let mut z = NormalStream::new(seed ^ 0x5eed_9a7a_3e7e_75c1);
    let mu = DVector::from_fn(n, |_, _| 0.0004 + 0.0002 * z.next());
    let scale = 0.01 / ((n - 1) as f64).sqrt();
    let sigma = DMatrix::from_fn(n, n - 1, |_, _| scale * z.next());
    (mu, sigma)
}

fn cmd_simulate(args: SimulateArgs) -> Outcome {
    if args.n < 2 {
        return Err(Failure::compute("simulation needs at least 2 assets"));
    }
    let (mut mu, mut sigma) = random_parameters(args.n, args.seed);
    if let Some(values) = args.mu {
        if values.len() != args.n {
            return Err(Failure::compute(format!(
                "--mu needs {} values, got {}",
                args.n,
                values.len()
            )));
        }
        mu = DVector::from_vec(values);
    }
    if let Some(values) = args.sigma {
        let want = args.n * (args.n - 1);
        if values.len() != want {
            return Err(Failure::compute(format!(
                "--sigma needs {want} values, got {}",
                values.len()
            )));
        }
        sigma = DMatrix::from_row_slice(args.n, args.n - 1, &values);
    }
    let spec = GbmSpec::new(mu, sigma, args.steps, args.seed);
    let sim = srr_core::simulate_gbm(&spec).map_err(Failure::compute)?;
    io::write_prices_wide(&args.out, &sim.prices).map_err(Failure::compute)?;
    let mut manifest = RunManifest::new("simulate");
    manifest.seed = Some(args.seed);
    manifest.outputs = vec![file_name(&args.out)];
    manifest
        .write(&sibling(&args.out, ".manifest.json"))
        .map_err(Failure::compute)
}

fn cmd_stats(args: StatsArgs) -> Outcome {
    let values = io::read_series_column(&args.input, &args.column).map_err(Failure::ingest)?;
    let q = analysis::quantiles(&values).map_err(Failure::compute)?;
    println!("column,count,min,p25,p50,p75,max,mean");
    println!(
        "{},{},{},{},{},{},{},{}",
        args.column,
        q.count,
        io::num(q.min),
        io::num(q.p25),
        io::num(q.p50),
        io::num(q.p75),
        io::num(q.max),
        io::num(q.mean)
    );
    Ok(())
}

fn cmd_select(args: SelectArgs) -> Outcome {
    let universe = io::load_universe(&args.universe).map_err(Failure::ingest)?;
    let picked = market::select_assets(&universe, args.n).map_err(Failure::compute)?;
    for id in picked {
        println!("{id}");
    }
    Ok(())
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::ToleranceBreach => "tolerance-breach",
        StopReason::ZeroVariance => "zero-variance",
        StopReason::Exhausted => "exhausted",
    }
}

fn cmd_min_rate(args: MinRateArgs) -> Outcome {
    let (returns, _) = load_returns(&args.input)?;
    let panel = match args.window {
        Some(m) => market::window(&returns, returns.rows() - 1, m).map_err(Failure::compute)?,
        None => returns,
    };
    let p = pca::pca_of_panel(panel.values(), CovarianceDivisor::SampleMinusOne)
        .map_err(Failure::compute)?;
    let report = match args.report {
        ReportArg::Breaching => BreachReport::Breaching,
        ReportArg::Previous => BreachReport::Previous,
    };
    let means = p.column_means.clone();
    let res = analysis::min_rate(&p, &means, args.k0, args.tol_sigma, args.tol_r, report)
        .map_err(Failure::compute)?;
    println!("field,value");
    println!("j_star,{}", res.j_star);
    println!("r,{}", io::num(res.r));
    println!("sigma_r,{}", io::num(res.sigma_r));
    println!("stop,{}", stop_name(res.stop));
    for (i, w) in res.weights.iter().enumerate() {
        println!("q_{},{}", i + 1, io::num(*w));
    }
    if args.compare {
        let (x0, _) = pca::center_columns(panel.values()).map_err(Failure::compute)?;
        let cov = x0.tr_mul(&x0) / (panel.rows() as f64 - 1.0);
        let full = analysis::compare_full_universe(&means, &cov).map_err(Failure::compute)?;
        println!("r_n,{}", io::num(full.r_n));
        println!("sigma_r_n,{}", io::num(full.sigma_r_n));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Srr(a) => cmd_srr(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Select(a) => cmd_select(a),
        Command::MinRate(a) => cmd_min_rate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Ingest(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
