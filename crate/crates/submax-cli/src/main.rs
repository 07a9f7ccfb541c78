//! `submax`: submatrix detection from the command line.
//!
//! Exit codes: 0 success (detect: no rejection), 3 rejection, 1 usage error,
//! 2 data error. Every stochastic subcommand requires an explicit --seed;
//! there is no time-based fallback.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use submax::{
    alternating_search, brute_force_max, build_detector, calibrate_threshold, detection_boundary,
    estimate_power, generate_null, plant_parameter_shift, plant_signal, Calibration,
    DetectorConfig, Error, ExperimentPlan, Law, LawDescriptor, NoiseModel, ObservationMatrix,
    ProblemShape, SearchConfig, SignalSpec, SubmatrixSupport, TestReport, DEFAULT_BUDGET,
};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_DATA: i32 = 2;
const EXIT_REJECT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "submax",
    about = "Detect an elevated-mean submatrix planted in a noisy matrix",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a matrix and emit it as CSV (optionally with a planted block).
    Generate(GenerateArgs),
    /// Print the empirical null quantile of a detector statistic.
    Calibrate(CalibrateArgs),
    /// Run a detector on a matrix CSV. Exit code 3 signals rejection.
    Detect(DetectArgs),
    /// Estimate a power curve over an amplitude grid and emit it as CSV.
    Power(PowerArgs),
    /// Print the closed-form detection boundary for a shape.
    Boundary(BoundaryArgs),
    /// Compare the search heuristic against brute-force enumeration.
    OracleCompare(OracleCompareArgs),
}

#[derive(Args, Clone)]
struct NoiseArgs {
    /// Null law: gaussian, poisson, bernoulli, exponential, gaussian-variance.
    #[arg(long, default_value = "gaussian")]
    noise: String,
    /// Noise scale for the gaussian law.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Null parameter for the exponential-family laws.
    #[arg(long)]
    theta0: Option<f64>,
}

impl NoiseArgs {
    fn model(&self) -> Result<NoiseModel, Error> {
        if self.noise == "gaussian" {
            return Ok(NoiseModel::Gaussian { sigma: self.sigma });
        }
        let law = Law::parse(&self.noise)?;
        let theta0 = self.theta0.ok_or_else(|| {
            Error::InvalidConfig(format!("--noise {} needs --theta0", self.noise))
        })?;
        Ok(NoiseModel::Law(LawDescriptor::new(law, theta0)?))
    }
}

#[derive(Args, Clone)]
struct DetectorParams {
    /// Registry name of the detector.
    #[arg(long, default_value = "combined")]
    detector: String,
    /// Target level for analytic linear thresholds.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Override for the scan-side threshold (e.g. a calibrated value).
    #[arg(long)]
    threshold: Option<f64>,
    /// Override for the linear threshold H.
    #[arg(long = "linear-threshold")]
    linear_threshold: Option<f64>,
    /// Scan threshold inflation for studentized/expfam/two-sided.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Exact scan by enumeration instead of the search heuristic.
    #[arg(long, default_value_t = false)]
    exact: bool,
    /// Enumeration budget (candidate supports).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Search restarts K.
    #[arg(long, default_value_t = 1000)]
    restarts: usize,
    /// Adaptive grid pairs, e.g. "4x4,8x8"; defaults to the dyadic grid.
    #[arg(long)]
    grid: Option<String>,
    /// Rectangle grid step fraction.
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// High-criticism grid start.
    #[arg(long, default_value_t = 0.5)]
    t0: f64,
    /// High-criticism threshold constant (> 2).
    #[arg(long = "hc-c", default_value_t = 4.0)]
    hc_c: f64,
    /// Observation law for the expfam detector.
    #[arg(long)]
    law: Option<String>,
    /// Null parameter for --law.
    #[arg(long = "law-theta0")]
    law_theta0: Option<f64>,
}

impl DetectorParams {
    fn needs_search(&self) -> bool {
        !self.exact
            && matches!(
                self.detector.as_str(),
                "scan" | "combined" | "adaptive" | "studentized" | "expfam" | "two-sided"
            )
    }

    fn config(&self, shape: Option<ProblemShape>, seed: Option<u64>) -> Result<DetectorConfig, Error> {
        let grid = match &self.grid {
            Some(text) => Some(parse_grid(text)?),
            None => None,
        };
        let law = match (&self.law, self.law_theta0) {
            (Some(name), Some(theta0)) => Some(LawDescriptor::new(Law::parse(name)?, theta0)?),
            (Some(_), None) => {
                return Err(Error::InvalidConfig("--law needs --law-theta0".into()))
            }
            (None, Some(_)) => {
                return Err(Error::InvalidConfig("--law-theta0 needs --law".into()))
            }
            (None, None) => None,
        };
        let search = seed.map(|s| SearchConfig::new(s).with_restarts(self.restarts));
        Ok(DetectorConfig {
            shape,
            alpha: self.alpha,
            linear_threshold: self.linear_threshold,
            scan_threshold: self.threshold,
            delta: self.delta,
            exact: self.exact,
            budget: self.budget,
            search,
            grid,
            eta: self.eta,
            t0: self.t0,
            hc_c: self.hc_c,
            law,
        })
    }
}

fn parse_grid(text: &str) -> Result<Vec<(usize, usize)>, Error> {
    let mut pairs = Vec::new();
    for part in text.split(',') {
        let (n, m) = part
            .trim()
            .split_once('x')
            .ok_or_else(|| Error::InvalidConfig(format!("--grid entry '{part}' is not NxM")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("--grid entry '{part}' is not NxM")))
        };
        pairs.push((parse(n)?, parse(m)?));
    }
    Ok(pairs)
}

/// "start:stop:steps" -> inclusive linear grid.
fn parse_amplitude_grid(text: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidConfig(format!("--a-grid '{text}' is not start:stop:steps"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.trim().parse().map_err(|_| bad())?]),
        [start, stop, steps] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let steps: usize = steps.trim().parse().map_err(|_| bad())?;
            if steps == 0 {
                return Err(bad());
            }
            if steps == 1 {
                return Ok(vec![start]);
            }
            let h = (stop - start) / (steps - 1) as f64;
            Ok((0..steps).map(|k| start + h * k as f64).collect())
        }
        _ => Err(bad()),
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "N")]
    rows: usize,
    #[arg(long = "M")]
    cols: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Plant a constant-a block (theta shift for law noise).
    #[arg(long)]
    a: Option<f64>,
    /// Planted rows; required with --a.
    #[arg(long = "n")]
    sub_rows: Option<usize>,
    /// Planted columns; required with --a.
    #[arg(long = "m")]
    sub_cols: Option<usize>,
    /// Block placement: upper-left or random.
    #[arg(long, default_value = "upper-left")]
    placement: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long = "N")]
    rows: usize,
    #[arg(long = "M")]
    cols: usize,
    #[arg(long = "n")]
    sub_rows: Option<usize>,
    #[arg(long = "m")]
    sub_cols: Option<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    params: DetectorParams,
}

#[derive(Args)]
struct DetectArgs {
    /// Matrix CSV to test.
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "n")]
    sub_rows: Option<usize>,
    #[arg(long = "m")]
    sub_cols: Option<usize>,
    /// Seed for the search heuristic (required unless the detector is
    /// deterministic or --exact).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the located support (two lines of 1-based indices) here.
    #[arg(long = "support-out")]
    support_out: Option<PathBuf>,
    #[command(flatten)]
    params: DetectorParams,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long = "N")]
    rows: usize,
    #[arg(long = "M")]
    cols: usize,
    #[arg(long = "n")]
    sub_rows: usize,
    #[arg(long = "m")]
    sub_cols: usize,
    /// Amplitude grid "start:stop:steps" (theta shifts for law noise).
    #[arg(long = "a-grid")]
    a_grid: String,
    /// Replications per amplitude.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Null samples for empirical calibration; 0 keeps analytic thresholds.
    #[arg(long = "calibration-samples", default_value_t = 100)]
    calibration_samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Block placement: upper-left or random.
    #[arg(long, default_value = "upper-left")]
    placement: String,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    params: DetectorParams,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundaryArgs {
    #[arg(long = "N")]
    rows: usize,
    #[arg(long = "M")]
    cols: usize,
    #[arg(long = "n")]
    sub_rows: usize,
    #[arg(long = "m")]
    sub_cols: usize,
}

#[derive(Args)]
struct OracleCompareArgs {
    #[arg(long = "N")]
    rows: usize,
    #[arg(long = "M")]
    cols: usize,
    #[arg(long = "n")]
    sub_rows: usize,
    #[arg(long = "m")]
    sub_cols: usize,
    /// Number of simulated matrices.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[command(flatten)]
    noise: NoiseArgs,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Clap handles --help/--version as "errors" with zero exit.
            if e.use_stderr() {
                let _ = e.print();
                std::process::exit(EXIT_USAGE);
            }
            let _ = e.print();
            std::process::exit(EXIT_OK);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_DATA);
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Power(args) => cmd_power(args),
        Command::Boundary(args) => cmd_boundary(args),
        Command::OracleCompare(args) => cmd_oracle_compare(args),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn planted_block(
    rows: usize,
    cols: usize,
    sub_rows: usize,
    sub_cols: usize,
    placement: &str,
    seed: u64,
) -> Result<SubmatrixSupport, Error> {
    match placement {
        "upper-left" => SubmatrixSupport::block(0, 0, sub_rows, sub_cols),
        "random" => submax::random_block_support(rows, cols, sub_rows, sub_cols, seed),
        other => Err(Error::InvalidConfig(format!(
            "--placement must be upper-left or random, got '{other}'"
        ))),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<i32, Error> {
    let noise = args.noise.model()?;
    let mut matrix = generate_null(args.rows, args.cols, &noise, args.seed)?;
    if let Some(a) = args.a {
        let (n, m) = match (args.sub_rows, args.sub_cols) {
            (Some(n), Some(m)) => (n, m),
            _ => {
                return Err(Error::InvalidConfig(
                    "--a needs --n and --m for the planted block".into(),
                ))
            }
        };
        ProblemShape::new(args.rows, args.cols, n, m)?;
        let support = planted_block(args.rows, args.cols, n, m, &args.placement, args.seed)?;
        matrix = match &noise {
            NoiseModel::Gaussian { .. } => plant_signal(&matrix, &SignalSpec::constant(support, a)?)?,
            NoiseModel::Law(law) => plant_parameter_shift(&matrix, &support, law, a, args.seed)?,
        };
    }
    let mut out = open_out(&args.out)?;
    matrix.write_csv(&mut out)?;
    Ok(EXIT_OK)
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<i32, Error> {
    let shape = match (args.sub_rows, args.sub_cols) {
        (Some(n), Some(m)) => Some(ProblemShape::new(args.rows, args.cols, n, m)?),
        _ => None,
    };
    let noise = args.noise.model()?;
    let detector = build_detector(&args.params.detector, &args.params.config(shape, Some(args.seed))?)?;
    let threshold = calibrate_threshold(
        detector.as_ref(),
        args.rows,
        args.cols,
        &noise,
        args.samples,
        args.params.alpha,
        args.seed,
    )?;
    println!("{threshold}");
    Ok(EXIT_OK)
}

fn report_csv(report: &TestReport) -> String {
    let fmt_set = |set: Option<&[usize]>| match set {
        Some(ix) => ix
            .iter()
            .map(|&i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" "),
        None => String::new(),
    };
    let rows = fmt_set(report.located_support.as_ref().map(|s| s.rows()));
    let cols = fmt_set(report.located_support.as_ref().map(|s| s.cols()));
    format!(
        "detector,statistic,threshold,threshold_kind,reject,rows,cols\n{},{},{},{},{},{},{}\n",
        report.detector_name,
        report.statistic,
        report.threshold,
        report.threshold_kind,
        report.reject,
        rows,
        cols
    )
}

fn cmd_detect(args: DetectArgs) -> Result<i32, Error> {
    if args.params.needs_search() && args.seed.is_none() {
        // Reproducibility is part of the contract: no implicit time seeds.
        return Err(Error::InvalidConfig(format!(
            "detector '{}' searches stochastically: pass --seed (or --exact)",
            args.params.detector
        )));
    }
    let matrix = ObservationMatrix::read_csv_path(&args.input)?;
    let shape = match (args.sub_rows, args.sub_cols) {
        (Some(n), Some(m)) => Some(ProblemShape::new(matrix.rows(), matrix.cols(), n, m)?),
        _ => None,
    };
    let detector = build_detector(&args.params.detector, &args.params.config(shape, args.seed)?)?;
    let report = detector.run(&matrix)?;
    if let Some(path) = &args.support_out {
        match &report.located_support {
            Some(support) => {
                let mut out = open_out(&Some(path.clone()))?;
                support.write_lines(&mut out)?;
            }
            None => {
                return Err(Error::InvalidConfig(format!(
                    "detector '{}' does not locate a support; drop --support-out",
                    report.detector_name
                )))
            }
        }
    }
    print!("{}", report_csv(&report));
    Ok(if report.reject { EXIT_REJECT } else { EXIT_OK })
}

fn cmd_power(args: PowerArgs) -> Result<i32, Error> {
    let shape = ProblemShape::new(args.rows, args.cols, args.sub_rows, args.sub_cols)?;
    let amplitudes = parse_amplitude_grid(&args.a_grid)?;
    let calibration = if args.calibration_samples == 0 {
        Calibration::Analytic
    } else {
        Calibration::Empirical {
            samples: args.calibration_samples,
        }
    };
    let random_placement = match args.placement.as_str() {
        "upper-left" => false,
        "random" => true,
        other => {
            return Err(Error::InvalidConfig(format!(
                "--placement must be upper-left or random, got '{other}'"
            )))
        }
    };
    let plan = ExperimentPlan {
        shape,
        amplitudes,
        replications: args.reps,
        calibration,
        alpha: args.params.alpha,
        seed: args.seed,
        detector: args.params.detector.clone(),
        config: args.params.config(Some(shape), Some(args.seed))?,
        noise: args.noise.model()?,
        workers: args.workers,
        random_placement,
    };
    let curve = estimate_power(&plan)?;
    let mut out = open_out(&args.out)?;
    curve.write_csv(&mut out)?;
    Ok(EXIT_OK)
}

fn cmd_boundary(args: BoundaryArgs) -> Result<i32, Error> {
    let shape = ProblemShape::new(args.rows, args.cols, args.sub_rows, args.sub_cols)?;
    let b = detection_boundary(&shape)?;
    println!("dense_term,sparse_term,a_star,regime");
    println!("{},{},{},{}", b.dense_term, b.sparse_term, b.a_star, b.regime);
    Ok(EXIT_OK)
}

fn cmd_oracle_compare(args: OracleCompareArgs) -> Result<i32, Error> {
    let shape = ProblemShape::new(args.rows, args.cols, args.sub_rows, args.sub_cols)?;
    let noise = args.noise.model()?;
    println!("rep,heuristic_score,exact_score,match");
    let mut agree = 0usize;
    for rep in 0..args.reps {
        let seed = submax::rng::derive_seed(args.seed, submax::rng::StreamKind::NullData, rep as u64);
        let matrix = generate_null(args.rows, args.cols, &noise, seed)?;
        let cfg = SearchConfig::new(seed).with_restarts(args.restarts);
        let heuristic = alternating_search(&matrix, &shape, &cfg)?;
        let exact = brute_force_max(&matrix, &shape, args.budget)?;
        let matched = heuristic.score == exact.score;
        if heuristic.score > exact.score {
            return Err(Error::InvalidConfig(format!(
                "heuristic exceeded the exact maximum on rep {rep}: {} > {}",
                heuristic.score, exact.score
            )));
        }
        if matched {
            agree += 1;
        }
        println!("{},{},{},{}", rep, heuristic.score, exact.score, matched);
    }
    eprintln!("agreement: {agree}/{}", args.reps);
    Ok(EXIT_OK)
}
