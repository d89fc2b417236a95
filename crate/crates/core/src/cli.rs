//! The `okamoto` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or domain errors, 2 for numerical
//! failures (an accuracy that cannot be certified).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use thiserror::Error;

use crate::differentiability::{
    classify_limit, cubic_criterion, derivative_experiment, derivative_trace,
    digit_frequency_experiment, find_a0, region_classify, LimitClass, a0,
};
use crate::error::Error;
use crate::export::{
    format_float, write_chaos_csv, write_cover_csv, write_length_csv, write_points_csv, write_svg,
    Header, VERSION,
};
use crate::function::{digits_for_tolerance, eval_digit_series};
use crate::geometry::{
    arc_length_profile, cover_profile, dimension_estimate, mass_bound_check, square_box_counts,
    square_dimension_estimate, ChaosGame, DEFAULT_BURN_IN, DEFAULT_MASS_SLACK,
    SQUARE_GRID_OVERSAMPLING,
};
use crate::function::DEFAULT_LEVEL_CAP;
use crate::param::{parse_decimal, parse_fraction, Mode, Parameter};
use crate::ternary::{ternary_rational, to_ternary, TernaryExpansion};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "okamoto", version, about = "Okamoto's function family: evaluation, differentiability and dimension")]
pub struct RunConfig {
    /// Worker threads for parallel experiments (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Random seed, recorded in every output header.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F_a at a point with a certified error bound.
    Eval(EvalArgs),
    /// Emit the level-i polyline f_i.
    Iterate(IterateArgs),
    /// Box-counting dimension from column covers (and a square-grid cross-check).
    Dim(DimArgs),
    /// Euclidean and Manhattan lengths of f_i.
    Arclength(ArclengthArgs),
    /// Slope products D_m along the ternary digits of a point.
    Derivative(DerivativeArgs),
    /// Differentiability region of a parameter.
    Classify(ClassifyArgs),
    /// The critical parameter a0 by bisection.
    A0(A0Args),
    /// Chaos-game samples of the natural mass on the graph.
    Chaos(ChaosArgs),
    /// Seeded statistical experiments.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Text,
}

/// Inclusive level range `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelRange {
    pub lo: u32,
    pub hi: u32,
}

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
        let range = LevelRange {
            lo: parse(lo)?,
            hi: parse(hi)?,
        };
        if range.lo > range.hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(range)
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Parameter a in (0,1), as a decimal or p/q.
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Parameter,

    /// Use exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

impl ParamArgs {
    fn parameter(&self) -> Parameter {
        let mode = if self.exact { Mode::Exact } else { Mode::Float };
        self.a.clone().with_mode(mode)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    /// Point in [0,1]: decimal, p/q or k/3^i.
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Ternary digits to use (default: enough for --tol).
    #[arg(long)]
    pub digits: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value_t = 6)]
    pub level: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Raise the level cap.
    #[arg(long, default_value_t = DEFAULT_LEVEL_CAP)]
    pub max_level: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimMethod {
    Column,
    Square,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value = "1..10")]
    pub levels: LevelRange,
    #[arg(long, value_enum, default_value_t = DimMethod::Column)]
    pub method: DimMethod,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Euclidean,
    Manhattan,
}

#[derive(Debug, Args)]
pub struct ArclengthArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value = "0..10")]
    pub levels: LevelRange,
    /// Metric reported in the summary line (both are always in the CSV).
    #[arg(long, value_enum, default_value_t = Metric::Euclidean)]
    pub metric: Metric,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DerivativeArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    /// Point whose digits drive the trace.
    #[arg(long, conflicts_with = "pattern")]
    pub x: Option<String>,
    /// Repeating digit pattern such as 012.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Trace length.
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    /// List every D_m.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub param: ParamArgs,
}

#[derive(Debug, Args)]
pub struct A0Args {
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ChaosArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// Independent chains, each contributing points/chains samples.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Grid level of the mass-bound report (text format).
    #[arg(long, default_value_t = 4)]
    pub grid: u32,
    #[arg(long, default_value_t = DEFAULT_MASS_SLACK)]
    pub slack: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Frequency of the digit 1 in uniform random expansions.
    Digits {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 3000)]
        n: usize,
    },
    /// Slope products along random digit streams.
    Traces {
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long, default_value_t = 100)]
        streams: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Report streams ending below this magnitude.
        #[arg(long, default_value_t = 1e-2)]
        small: f64,
        /// Report streams exceeding this magnitude.
        #[arg(long, default_value_t = 1e6)]
        large: f64,
    },
    /// Empirical check of the mass bound on a square grid.
    Mass {
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long, default_value_t = 1_000_000)]
        points: usize,
        #[arg(long, default_value_t = 4)]
        grid: u32,
        #[arg(long, default_value_t = DEFAULT_MASS_SLACK)]
        slack: f64,
    },
    /// Distance of chaos-game points from the graph.
    Fidelity {
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, default_value_t = 40)]
        digits: usize,
        #[arg(long, default_value_t = 1e-5)]
        threshold: f64,
    },
}

/// `key: value` lines.
#[derive(Debug, Default)]
struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    fn new(header: &Header) -> Self {
        let mut r = Report::default();
        r.field("a", &header.a);
        r.field("mode", header.mode);
        r.field("seed", header.seed);
        r.field("version", &header.version);
        r
    }

    fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.field(key, format_float(value))
    }

    fn write(&self, out: &mut dyn Write) -> io::Result<()> {
        for (k, v) in &self.lines {
            writeln!(out, "{k}: {v}")?;
        }
        Ok(())
    }
}

/// Parses and runs a command line, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&config, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed configuration inside a pool of `config.threads` workers.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> CliResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(config, &mut buf));
    stdout.write_all(&buf)?;
    stdout.flush()?;
    result
}

fn dispatch(config: &RunConfig, stdout: &mut dyn Write) -> CliResult {
    let seed = config.seed;
    match &config.command {
        Command::Eval(args) => cmd_eval(args, seed, stdout),
        Command::Iterate(args) => cmd_iterate(args, seed, stdout),
        Command::Dim(args) => cmd_dim(args, seed, stdout),
        Command::Arclength(args) => cmd_arclength(args, seed, stdout),
        Command::Derivative(args) => cmd_derivative(args, seed, stdout),
        Command::Classify(args) => cmd_classify(args, seed, stdout),
        Command::A0(args) => cmd_a0(args, seed, stdout),
        Command::Chaos(args) => cmd_chaos(args, seed, stdout),
        Command::Experiment(exp) => cmd_experiment(exp, seed, stdout),
    }
}

fn with_output(
    out: &OutputArgs,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult {
    match &out.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            body(&mut file)?;
            file.flush()?;
        }
        None => body(stdout)?,
    }
    Ok(())
}

/// Digits of a point given as `k/3^i`, `p/q` or a decimal.
pub fn parse_point(s: &str, mode: Mode, n: usize) -> Result<TernaryExpansion, Error> {
    let s = s.trim();
    if let Some((k, level)) = s.split_once("/3^") {
        let k = k
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse k in {s:?}")))?;
        let level = level
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse level in {s:?}")))?;
        return ternary_rational(k, level);
    }
    if s.contains('/') {
        return TernaryExpansion::from_rational(&parse_fraction(s)?, n);
    }
    if mode == Mode::Exact {
        if let Some(r) = parse_decimal(s) {
            return TernaryExpansion::from_rational(&r, n);
        }
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Domain(format!("cannot parse point {s:?}")))?;
    to_ternary(x, n)
}

fn cmd_eval(args: &EvalArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter();
    let n = match args.digits {
        Some(n) => n,
        None => digits_for_tolerance(&a, args.tol)?,
    };
    let x = parse_point(&args.x, a.mode(), n)?;
    let mut report = Report::new(&Header::new(&a, seed));
    report.field("x", &args.x);
    match a.mode() {
        Mode::Exact => {
            let v = eval_digit_series::<BigRational>(&a, &x, args.tol)?;
            report
                .field("value", &v.value)
                .float("value_float", crate::param::Scalar::as_f64(&v.value))
                .float("error_bound", v.error_bound)
                .field("digits_used", v.digits_used);
        }
        Mode::Float => {
            let v = eval_digit_series::<f64>(&a, &x, args.tol)?;
            report
                .float("value", v.value)
                .float("error_bound", v.error_bound)
                .field("digits_used", v.digits_used);
        }
    }
    report.write(stdout)?;
    Ok(())
}

fn cmd_iterate(args: &IterateArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter();
    let header = Header::new(&a, seed);
    let level = args.level;
    let cap = args.max_level;
    match (a.mode(), args.format) {
        (_, Format::Text) => Err(CliError::Usage(
            "iterate writes csv or svg".to_string(),
        )),
        (Mode::Exact, Format::Csv) => {
            let g = crate::function::construct_iteration_with_cap::<BigRational>(&a, level, cap)?;
            let pts = g.points();
            with_output(&args.out, stdout, |w| write_points_csv(w, &header, &pts))
        }
        (Mode::Exact, Format::Svg) | (Mode::Float, Format::Svg) => {
            let g = crate::function::construct_iteration_with_cap::<f64>(&a, level, cap)?;
            let pts = g.points();
            with_output(&args.out, stdout, |w| write_svg(w, &header, &pts))
        }
        (Mode::Float, Format::Csv) => {
            let g = crate::function::construct_iteration_with_cap::<f64>(&a, level, cap)?;
            let pts = g.points();
            with_output(&args.out, stdout, |w| write_points_csv(w, &header, &pts))
        }
    }
}

fn cmd_dim(args: &DimArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter();
    let LevelRange { lo, hi } = args.levels;
    let (estimate, levels) = match args.method {
        DimMethod::Column => {
            let est = dimension_estimate(&a, lo, hi)?;
            let profile = cover_profile(&a, hi)?;
            (est, profile.levels[lo as usize..].to_vec())
        }
        DimMethod::Square => {
            let est = square_dimension_estimate(&a, lo, hi)?;
            let fine = (hi + SQUARE_GRID_OVERSAMPLING).min(DEFAULT_LEVEL_CAP);
            (est, square_box_counts(&a, lo, hi, fine)?)
        }
    };
    let method = match args.method {
        DimMethod::Column => "column",
        DimMethod::Square => "square",
    };
    let notes = vec![
        format!("method={method} levels={lo}..{hi}"),
        format!(
            "slope={} reference={} intercept={} max_residual={}",
            format_float(estimate.slope),
            format_float(estimate.reference),
            format_float(estimate.intercept),
            format_float(estimate.max_residual)
        ),
    ];
    let header = Header::new(&a, seed);
    with_output(&args.out, stdout, |w| write_cover_csv(w, &header, &notes, &levels))
}

fn cmd_arclength(args: &ArclengthArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter();
    let LevelRange { lo, hi } = args.levels;
    let mut profile = arc_length_profile(&a, hi)?;
    profile.levels.drain(..lo as usize);
    let last = profile.levels.last().expect("non-empty range");
    let (metric, value) = match args.metric {
        Metric::Euclidean => ("euclidean", last.euclidean),
        Metric::Manhattan => ("manhattan", last.manhattan),
    };
    let notes = vec![format!(
        "metric={metric} level={} length={}",
        last.level,
        format_float(value)
    )];
    let header = Header::new(&a, seed);
    with_output(&args.out, stdout, |w| write_length_csv(w, &header, &notes, &profile))
}

fn parse_pattern(pattern: &str) -> Result<Vec<u8>, CliError> {
    pattern
        .chars()
        .map(|c| match c {
            '0'..='2' => Ok(c as u8 - b'0'),
            _ => Err(CliError::Usage(format!(
                "pattern {pattern:?} must contain only the digits 0, 1, 2"
            ))),
        })
        .collect()
}

const OSCILLATION_NOTE: &str =
    "unit-magnitude growth: |D_n| does not settle under the generic-digit model";

fn cmd_derivative(args: &DerivativeArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter();
    let digits = match (&args.x, &args.pattern) {
        (Some(x), None) => parse_point(x, a.mode(), args.n)?,
        (None, Some(p)) => TernaryExpansion::periodic(&parse_pattern(p)?, args.n)?,
        _ => return Err(CliError::Usage("give exactly one of --x or --pattern".into())),
    };
    let n = args.n.min(digits.len());
    let trace = derivative_trace(&a, &digits, n)?;
    let stats = trace.stats(n)?;
    let class = classify_limit(&a, stats.gamma_estimate)?;
    let mut report = Report::new(&Header::new(&a, seed));
    report
        .field("n", n)
        .field("ones_count", stats.ones_count)
        .float("ratio", stats.ratio)
        .float("gamma_estimate", stats.gamma_estimate)
        .float("final_value", trace.last())
        .float("max_abs", trace.max_abs())
        .field("saturated", trace.saturated())
        .field("limit_class", class);
    if class == LimitClass::OscillatesOnUnitMagnitude {
        report.field("note", OSCILLATION_NOTE);
    }
    if args.trace {
        for m in 1..=n {
            report.float(&format!("D_{m}"), trace.value(m));
        }
    }
    report.write(stdout)?;
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter();
    let class = region_classify(&a);
    let limit = classify_limit(&a, 1.0 / 3.0)?;
    let mut report = Report::new(&Header::new(&a, seed));
    report
        .field("region", class.region)
        .field("description", class.region.description())
        .field("first_derivative_ae", class.first_derivative.label())
        .field("second_derivative", class.second_derivative.label())
        .float("cubic_27a2_minus_54a3", cubic_criterion(&a.value()))
        .field("limit_at_gamma_one_third", limit)
        .float("a0", a0());
    if limit == LimitClass::OscillatesOnUnitMagnitude {
        report.field("note", OSCILLATION_NOTE);
    }
    report.write(stdout)?;
    Ok(())
}

fn cmd_a0(args: &A0Args, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let c = find_a0(args.tol)?;
    let mut report = Report::default();
    report
        .field("seed", seed)
        .field("version", VERSION)
        .float("tol", args.tol)
        .float("a0", c.value)
        .float("residual", c.residual)
        .float("bracket_lo", c.bracket.0)
        .float("bracket_hi", c.bracket.1)
        .field("iterations", c.iterations);
    report.write(stdout)?;
    Ok(())
}

fn cmd_chaos(args: &ChaosArgs, seed: u64, stdout: &mut dyn Write) -> CliResult {
    let a = args.param.parameter().with_mode(Mode::Float);
    if args.points == 0 || args.chains == 0 {
        return Err(CliError::Usage("points and chains must be positive".into()));
    }
    let game = ChaosGame::new(&a)?.burn_in(args.burn_in);
    let sample = if args.chains == 1 {
        game.run(args.points, seed)
    } else {
        game.run_chains(args.chains, args.points.div_ceil(args.chains), seed)
    };
    let header = Header::new(&a, seed);
    match args.format {
        Format::Csv => with_output(&args.out, stdout, |w| write_chaos_csv(w, &header, &sample)),
        Format::Svg => {
            // sorted by x the points trace the graph left to right
            let mut pts = sample.points.clone();
            pts.sort_by(|p, q| p.0.total_cmp(&q.0));
            with_output(&args.out, stdout, |w| write_svg(w, &header, &pts))
        }
        Format::Text => {
            let report = mass_report(&header, &sample, args.grid, args.slack)?;
            with_output(&args.out, stdout, |w| report.write(w))
        }
    }
}

fn mass_report(
    header: &Header,
    sample: &crate::geometry::MassSample,
    grid: u32,
    slack: f64,
) -> CliResult<Report> {
    let check = mass_bound_check(sample, grid, slack)?;
    let mut report = Report::new(header);
    report
        .field("points", sample.len())
        .field("burn_in", sample.burn_in)
        .field(
            "weights",
            sample.weights.map(format_float).join(","),
        )
        .field("grid_level", grid)
        .float("cell_diameter", check.diameter)
        .float("exponent", check.exponent)
        .float("bound", check.bound)
        .float("slack", slack)
        .float("max_ratio", check.max_ratio())
        .field("flagged_cells", check.flagged().len())
        .float("left_column_mass", check.column_mass(0))
        .field("note", "statistical check; |U| is the cell diameter");
    Ok(report)
}

fn cmd_experiment(exp: &Experiment, seed: u64, stdout: &mut dyn Write) -> CliResult {
    match exp {
        Experiment::Digits { samples, n } => {
            let s = digit_frequency_experiment(*samples, *n, seed)?;
            let mut report = Report::default();
            report
                .field("experiment", "digits")
                .field("seed", s.seed)
                .field("version", VERSION)
                .field("samples", s.samples)
                .field("n", s.n)
                .float("mean", s.mean)
                .float("min", s.min)
                .float("max", s.max)
                .float("within_band", s.within_band);
            report.write(stdout)?;
        }
        Experiment::Traces {
            param,
            streams,
            n,
            small,
            large,
        } => {
            let a = param.parameter();
            let e = derivative_experiment(&a, *streams, *n, seed)?;
            let mut report = Report::new(&Header::new(&a, seed));
            report
                .field("experiment", "traces")
                .field("streams", streams)
                .field("n", n)
                .field("final_below_small", e.count_final_below(*small))
                .field("exceeding_large", e.count_exceeding_by(*large, *n))
                .field("region", region_classify(&a).region);
            report.write(stdout)?;
        }
        Experiment::Mass {
            param,
            points,
            grid,
            slack,
        } => {
            let a = param.parameter().with_mode(Mode::Float);
            let sample = ChaosGame::new(&a)?.run(*points, seed);
            mass_report(&Header::new(&a, seed), &sample, *grid, *slack)?.write(stdout)?;
        }
        Experiment::Fidelity {
            param,
            points,
            digits,
            threshold,
        } => {
            let a = param.parameter().with_mode(Mode::Float);
            let sample = ChaosGame::new(&a)?.run(*points, seed);
            let dev = sample.graph_deviations(*digits, threshold / 10.0)?;
            let close = dev.iter().filter(|d| **d < *threshold).count();
            let mut report = Report::new(&Header::new(&a, seed));
            report
                .field("experiment", "fidelity")
                .field("points", sample.len())
                .field("digits", digits)
                .float("threshold", *threshold)
                .field("within_threshold", close)
                .float("fraction", close as f64 / sample.len() as f64)
                .float("max_deviation", dev.iter().copied().fold(0.0, f64::max));
            report.write(stdout)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("okamoto").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        assert_eq!(code, 0, "stderr: {}", String::from_utf8_lossy(&err));
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn level_range_parsing() {
        assert_eq!("1..10".parse::<LevelRange>().unwrap(), LevelRange { lo: 1, hi: 10 });
        assert!("10..1".parse::<LevelRange>().is_err());
        assert!("5".parse::<LevelRange>().is_err());
    }

    #[test]
    fn point_forms() {
        assert_eq!(parse_point("5/3^2", Mode::Float, 4).unwrap().digits(), &[1, 2]);
        assert_eq!(parse_point("1/3", Mode::Float, 3).unwrap().digits(), &[1, 0, 0]);
        assert_eq!(parse_point("1/2", Mode::Float, 3).unwrap().digits(), &[1, 1, 1]);
        assert!(parse_point("abc", Mode::Float, 3).is_err());
        assert!(parse_point("1.5", Mode::Float, 3).is_err());
    }

    #[test]
    fn pattern_parsing() {
        assert_eq!(parse_pattern("012").unwrap(), [0, 1, 2]);
        assert!(parse_pattern("013").is_err());
    }

    #[test]
    fn exact_eval_report() {
        let out = run_ok(&["eval", "--a", "2/3", "--x", "1/3", "--exact"]);
        assert!(out.contains("value: 2/3\n"), "{out}");
        assert!(out.contains("mode: exact"));
    }
}
