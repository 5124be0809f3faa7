use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::de::DeserializeOwned;
use serde::Serialize;

use ordrisk::bench::{
    resolve_methods, run_coverage_study, run_newsvendor_study, BoundMode, Distribution, NewsvendorConfig,
};
use ordrisk::calibrate::{calibrate_gamma, calibrate_phi_radius};
use ordrisk::crossing::{noncrossing_probability, Boundary};
use ordrisk::divergence::PhiFamily;
use ordrisk::risk::RiskSpec;
use ordrisk::specfun::{DEFAULT_ROOT_TOL, DEFAULT_SEED};

/// Calibrated ordered risk: ambiguity-set calibration, risk evaluation and
/// coverage studies.
#[derive(Parser)]
#[command(name = "ordrisk", version)]
struct Cli {
    /// Worker threads for calibration and benchmarks (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the size of an ambiguity set.
    #[command(subcommand)]
    Calibrate(CalibrateCmd),
    /// Evaluate risk functionals on data.
    #[command(subcommand)]
    Risk(RiskCmd),
    /// Probability that uniform order statistics stay above a boundary.
    Crossing {
        /// CSV file with the nondecreasing boundary values.
        #[arg(long)]
        boundary: PathBuf,
    },
    /// Monte-Carlo studies.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Subcommand)]
enum CalibrateCmd {
    /// Radius of a φ-divergence ball.
    Phi(PhiArgs),
    /// Level γ of the CVaR-bar weights.
    Gamma {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
        tol: f64,
    },
}

#[derive(Args)]
struct PhiArgs {
    /// kl, burg, hellinger, chi2 or tv.
    #[arg(long)]
    family: PhiFamily,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0.005)]
    beta: f64,
    /// Number of simulated simplex points.
    #[arg(long, default_value_t = 10_000)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum RiskCmd {
    /// Evaluate one risk specification on a data file.
    Eval {
        /// JSON risk specification, inline or as @path.
        #[arg(long)]
        spec: String,
        /// CSV file of numbers.
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Newsvendor case study.
    Newsvendor {
        /// JSON study configuration; omitted fields take the default settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the per-trial CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical coverage P[proxy ≥ E[Z]] of a risk specification.
    Coverage {
        /// JSON risk specification, inline or as @path.
        #[arg(long)]
        spec: String,
        /// JSON distribution, inline or as @path.
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 5_000)]
        trials: usize,
        /// Slots per dataset, including the bound slot.
        #[arg(long)]
        n: usize,
        /// Target miscoverage; reported alongside the estimate.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BoundArg::Exact)]
        bound: BoundArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Exact,
    Sample,
    None,
}

impl From<BoundArg> for BoundMode {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Exact => BoundMode::Exact,
            BoundArg::Sample => BoundMode::Sample,
            BoundArg::None => BoundMode::None,
        }
    }
}

/// Failure with its exit status: 2 for bad input, 1 for numerical trouble.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ordrisk::Error> for Failure {
    fn from(e: ordrisk::Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

/// Parses an inline JSON document, or the file it names when prefixed by `@`.
fn parse_json_arg<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("invalid {what}: {e}")))
}

/// All numbers of a CSV file in reading order. A first row that does not
/// parse is taken as a header.
fn read_numbers(path: &Path) -> CliResult<Vec<f64>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let parsed: Result<Vec<f64>, _> = record.iter().filter(|f| !f.is_empty()).map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => out.extend(values),
            Err(_) if row == 0 => continue,
            Err(e) => {
                return Err(Failure::input(format!(
                    "{}: row {}: {e}",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Failure::input(format!("{} contains no numbers", path.display())));
    }
    Ok(out)
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: 1,
        message: format!("cannot serialize output: {e}"),
    })?;
    writeln!(io::stdout(), "{text}").map_err(|e| Failure {
        code: 1,
        message: format!("cannot write output: {e}"),
    })
}

#[derive(Serialize)]
struct RiskOutput<'a> {
    value: f64,
    n: usize,
    spec: &'a RiskSpec,
}

#[derive(Serialize)]
struct CrossingOutput {
    probability: f64,
    m: usize,
}

#[derive(Serialize)]
struct CoverageOutput {
    #[serde(flatten)]
    report: ordrisk::bench::CoverageReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meets_target: Option<bool>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Calibrate(CalibrateCmd::Phi(a)) => {
            info!("simulating {} simplex points for {}", a.m, a.family);
            let c = calibrate_phi_radius(a.family, a.n, a.delta, a.beta, a.m, a.seed, cli.threads)?;
            print_json(&c)
        }
        Command::Calibrate(CalibrateCmd::Gamma { n, delta, tol }) => {
            let c = calibrate_gamma(n, delta, tol)?;
            for w in &c.warnings {
                log::warn!("{w}");
            }
            print_json(&c)
        }
        Command::Risk(RiskCmd::Eval { spec, data }) => {
            let spec: RiskSpec = parse_json_arg(&spec, "risk specification")?;
            let x = read_numbers(&data)?;
            let value = spec.evaluate(&x)?;
            print_json(&RiskOutput {
                value,
                n: x.len(),
                spec: &spec,
            })
        }
        Command::Crossing { boundary } => {
            let b = Boundary::new(read_numbers(&boundary)?)?;
            print_json(&CrossingOutput {
                probability: noncrossing_probability(&b),
                m: b.len(),
            })
        }
        Command::Bench(BenchCmd::Newsvendor { config, out }) => {
            let cfg: NewsvendorConfig = match config {
                Some(path) => serde_json::from_str(&read_text(&path)?)
                    .map_err(|e| Failure::input(format!("invalid study configuration: {e}")))?,
                None => NewsvendorConfig::default(),
            };
            cfg.validate()?;
            info!("calibrating {} methods", cfg.methods.len());
            let methods = resolve_methods(&cfg, &cfg.methods, cli.threads)?;
            info!("running {} trials", cfg.trials);
            let result = run_newsvendor_study(&cfg, &methods)?;
            if let Some(path) = out {
                let mut w = csv::Writer::from_path(&path)
                    .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
                for row in &result.rows {
                    w.serialize(row).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                }
                w.flush().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            }
            print_json(&result.summary)
        }
        Command::Bench(BenchCmd::Coverage {
            spec,
            dist,
            trials,
            n,
            delta,
            seed,
            bound,
        }) => {
            let spec: RiskSpec = parse_json_arg(&spec, "risk specification")?;
            let dist: Distribution = parse_json_arg(&dist, "distribution")?;
            if let Some(d) = delta {
                if !(d > 0.0 && d < 1.0) {
                    return Err(Failure::input(format!("δ must lie in (0, 1), got {d}")));
                }
            }
            let report = run_coverage_study(&spec, &dist, n, trials, seed, bound.into())?;
            let target = delta.map(|d| 1.0 - d);
            let meets_target = target.map(|t| report.coverage >= t - 3.0 * (t * (1.0 - t) / trials as f64).sqrt());
            print_json(&CoverageOutput {
                report,
                target,
                meets_target,
            })
        }
        Command::Selftest => {
            let results = ordrisk::selftest::run_all();
            let mut failed = 0;
            for r in &results {
                if r.passed {
                    println!("ok    {}", r.name);
                } else {
                    failed += 1;
                    println!("FAIL  {}: {}", r.name, r.detail);
                }
            }
            if failed > 0 {
                return Err(Failure {
                    code: 1,
                    message: format!("{failed} of {} checks failed", results.len()),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
