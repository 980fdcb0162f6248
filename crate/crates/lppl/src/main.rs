//! Command-line interface for the calibration engine.
//!
//! Data goes to standard output or to `--output`; diagnostics go to the
//! error stream. Thread count is controlled by the `RAYON_NUM_THREADS`
//! environment variable.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use lppl::calibrate::{self, CalibConfig, FitWindow};
use lppl::data::{self, PriceSeries, SynthSpec};
use lppl::error::Error;
use lppl::model::PhaseParams;
use lppl::report;
use lppl::xsection::{self, Axis, AxisRange, FixedPoint, XSectionSpec};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_CALIBRATION: u8 = 4;

const AFTER_HELP: &str = "\
Exit codes:
  0  success (including unqualified fits)
  2  usage error: unknown or inconsistent flags
  3  I/O or input-data error: unreadable file, malformed CSV
  4  calibration error: invalid window, degenerate system, failed search

Environment:
  RAYON_NUM_THREADS  number of worker threads for profile/scan grids
";

#[derive(Parser)]
#[command(
    name = "lppl",
    version,
    about = "Log-periodic power law bubble calibration",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the model on a window and report the fitted parameters
    Fit(FitArgs),
    /// Calibrate with the legacy four-nonlinear-parameter scheme (oracle)
    LegacyFit(FitArgs),
    /// Emit the critical-time profile: f2, slaved m/omega, qualification
    Profile(FitArgs),
    /// Emit a cost-surface cross-section over one or two axes
    Xsection(XsectionArgs),
    /// Profile a rolling window over the whole series
    Scan(ScanArgs),
    /// Generate a synthetic series and write it as CSV
    Synth(SynthArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV file of date,price rows (ISO-8601 dates)
    #[arg(long)]
    input: PathBuf,
    /// Window start date; snaps inward, defaults to the first date
    #[arg(long)]
    t1: Option<NaiveDate>,
    /// Window end date; snaps inward, defaults to the last date
    #[arg(long)]
    t2: Option<NaiveDate>,
}

#[derive(Args)]
struct OptimizerArgs {
    /// Seed for the multistart generator
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Local searches per critical-time grid point
    #[arg(long, default_value_t = 20)]
    n_starts: usize,
    /// Critical-time scan horizon past the window end, in trading days
    #[arg(long, default_value_t = 90.0)]
    tc_horizon: f64,
    /// Critical-time grid step in trading days
    #[arg(long, default_value_t = 1.0)]
    tc_step: f64,
    /// Iteration cap per local search
    #[arg(long, default_value_t = 2000)]
    max_iterations: usize,
    /// Simplex location tolerance
    #[arg(long, default_value_t = 1e-8)]
    x_tol: f64,
    /// Simplex value-spread tolerance
    #[arg(long, default_value_t = 1e-10)]
    f_tol: f64,
}

impl OptimizerArgs {
    fn to_config(&self) -> CalibConfig {
        let mut config = CalibConfig::new(self.seed);
        config.optimizer.n_starts = self.n_starts;
        config.optimizer.max_iterations = self.max_iterations;
        config.optimizer.x_tolerance = self.x_tol;
        config.optimizer.f_tolerance = self.f_tol;
        config.tc_horizon = self.tc_horizon;
        config.tc_step = self.tc_step;
        config
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct XsectionArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Axes to sweep: one or two of tc, m, omega, phi (e.g. "m,omega")
    #[arg(long)]
    axes: String,
    /// Fixed value for a non-axis parameter, e.g. "tc=2007-11-06",
    /// "tc=120.5", "m=0.7"; repeatable
    #[arg(long = "fix", value_name = "NAME=VALUE")]
    fix: Vec<String>,
    /// Range for the tc axis as lo:hi:points, in day offsets past the
    /// window end (default 1:90:90)
    #[arg(long)]
    tc_range: Option<String>,
    /// Range for the m axis as lo:hi:points (default 0.1:0.9:81)
    #[arg(long)]
    m_range: Option<String>,
    /// Range for the omega axis as lo:hi:points (default 6:13:71)
    #[arg(long)]
    omega_range: Option<String>,
    /// Range for the phi axis as lo:hi:points (default 0:6.2832:72)
    #[arg(long)]
    phi_range: Option<String>,
    /// Sweep the legacy cost surface (slaved A,B,C at explicit phase)
    #[arg(long)]
    legacy: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Input CSV file of date,price rows
    #[arg(long)]
    input: PathBuf,
    /// Observations per window (~6 months of trading days by default)
    #[arg(long, default_value_t = 126)]
    window_length: usize,
    /// Window advance in trading days
    #[arg(long, default_value_t = 5)]
    step: usize,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Power-law exponent of the generating truth
    #[arg(long, default_value_t = 0.6)]
    m: f64,
    /// Angular log-frequency of the generating truth
    #[arg(long, default_value_t = 9.0)]
    omega: f64,
    /// Critical time as an offset past the last generated observation
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    tc_offset: f64,
    /// Log-price offset
    #[arg(long, default_value_t = 8.0)]
    a: f64,
    /// Power-law amplitude
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    b: f64,
    /// Oscillation amplitude
    #[arg(long, default_value_t = 0.2)]
    c: f64,
    /// Oscillation phase in radians
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
    /// Number of observations
    #[arg(long, default_value_t = 150)]
    n: usize,
    /// Standard deviation of additive Gaussian log-price noise
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Noise generator seed
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output file; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_)
        | Error::Parse { .. }
        | Error::DuplicateDate(_)
        | Error::NonPositivePrice { .. } => EXIT_IO,
        Error::InvalidConfig(_) => EXIT_USAGE,
        _ => EXIT_CALIBRATION,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Fit(args) => {
            let (series, window) = load_window(&args.data)?;
            let result = calibrate::fit(&series, window, &args.optimizer.to_config())?;
            let rendered = match args.output.format {
                Format::Json => report::to_json(&result),
                Format::Csv => report::fit_to_csv(&result),
            };
            emit(&args.output.output, &rendered)
        }
        Command::LegacyFit(args) => {
            let (series, window) = load_window(&args.data)?;
            let result = calibrate::legacy_fit(&series, window, &args.optimizer.to_config())?;
            let rendered = match args.output.format {
                Format::Json => report::to_json(&result),
                Format::Csv => report::fit_to_csv(&result),
            };
            emit(&args.output.output, &rendered)
        }
        Command::Profile(args) => {
            let (series, window) = load_window(&args.data)?;
            let profile = calibrate::profile_tc(&series, window, &args.optimizer.to_config())?;
            let rendered = match args.output.format {
                Format::Json => report::to_json(&profile),
                Format::Csv => report::profile_to_csv(&profile),
            };
            emit(&args.output.output, &rendered)
        }
        Command::Xsection(args) => {
            let (series, window) = load_window(&args.data)?;
            let spec = build_xsection_spec(&args, &series, window)?;
            let grid = xsection::cross_section(&series, window, &spec)?;
            let rendered = match args.output.format {
                Format::Json => report::to_json(&grid),
                Format::Csv => report::xsection_to_csv(&grid),
            };
            emit(&args.output.output, &rendered)
        }
        Command::Scan(args) => {
            let series = data::load_csv(&args.input)?;
            let report_data = calibrate::rolling_scan(
                &series,
                args.window_length,
                args.step,
                &args.optimizer.to_config(),
            )?;
            let rendered = match args.output.format {
                Format::Json => report::to_json(&report_data),
                Format::Csv => report::scan_to_csv(&report_data),
            };
            emit(&args.output.output, &rendered)
        }
        Command::Synth(args) => {
            if args.n < 2 {
                return Err(Error::InvalidConfig("--n must be at least 2".into()));
            }
            let params = PhaseParams::new(
                (args.n - 1) as f64 + args.tc_offset,
                args.m,
                args.omega,
                args.a,
                args.b,
                args.c,
                args.phi,
            );
            let spec = SynthSpec {
                params,
                n_points: args.n,
                noise_sigma: args.sigma,
                rng_seed: args.seed,
            };
            let series = data::synth_generate(&spec)?;
            emit(&args.output, &series.to_csv_string())
        }
    }
}

fn load_window(args: &DataArgs) -> Result<(PriceSeries, FitWindow), Error> {
    let series = data::load_csv(&args.input)?;
    let t1 = args.t1.unwrap_or_else(|| series.dates()[0]);
    let t2 = args.t2.unwrap_or_else(|| *series.dates().last().expect("nonempty series"));
    let window = data::slice_window(&series, t1, t2)?;
    Ok((series, window))
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn build_xsection_spec(
    args: &XsectionArgs,
    series: &PriceSeries,
    window: FitWindow,
) -> Result<XSectionSpec, Error> {
    let t2 = window.end_time();

    let axes: Vec<Axis> = args.axes.split(',').map(Axis::parse).collect::<Result<_, _>>()?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidConfig("--axes takes one or two axis names".into()));
    }

    let mut ranges = Vec::new();
    for axis in &axes {
        let (flag, default) = match axis {
            // tc ranges are day offsets past the window end
            Axis::Tc => (&args.tc_range, (1.0, 90.0, 90usize)),
            Axis::M => (&args.m_range, (0.1, 0.9, 81)),
            Axis::Omega => (&args.omega_range, (6.0, 13.0, 71)),
            Axis::Phi => (&args.phi_range, (0.0, std::f64::consts::TAU, 72)),
        };
        let (mut lo, mut hi, points) = match flag {
            Some(text) => parse_range(text)?,
            None => default,
        };
        if *axis == Axis::Tc {
            lo += t2;
            hi += t2;
        }
        ranges.push(AxisRange { axis: *axis, lo, hi, points });
    }

    // fixed values: every non-axis parameter must be pinned explicitly,
    // except phi which is irrelevant to the reformulated surface
    let mut fixed = FixedPoint { t_c: f64::NAN, m: f64::NAN, omega: f64::NAN, phi: 0.0 };
    for entry in &args.fix {
        let (name, value) = entry.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("--fix expects NAME=VALUE, got {entry:?}"))
        })?;
        let axis = Axis::parse(name)?;
        let parsed = match axis {
            Axis::Tc => parse_tc_value(value, series)?,
            _ => value
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("invalid value {value:?} for {name}")))?,
        };
        match axis {
            Axis::Tc => fixed.t_c = parsed,
            Axis::M => fixed.m = parsed,
            Axis::Omega => fixed.omega = parsed,
            Axis::Phi => fixed.phi = parsed,
        }
    }

    for (axis, value) in [(Axis::Tc, fixed.t_c), (Axis::M, fixed.m), (Axis::Omega, fixed.omega)] {
        if !axes.contains(&axis) && value.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "parameter {} is not an axis and needs --fix {}=VALUE",
                axis.name(),
                axis.name()
            )));
        }
    }
    if args.legacy && !axes.contains(&Axis::Phi) && args.fix.iter().all(|f| !f.starts_with("phi")) {
        return Err(Error::InvalidConfig(
            "the legacy surface needs phi as an axis or a --fix phi=VALUE".into(),
        ));
    }

    Ok(XSectionSpec { axes: ranges, fixed, legacy: args.legacy })
}

/// A fixed tc is either a calendar date resolved against the series or a
/// raw trading-day index.
fn parse_tc_value(value: &str, series: &PriceSeries) -> Result<f64, Error> {
    if let Ok(date) = value.parse::<NaiveDate>() {
        let index = series
            .first_index_at_or_after(date)
            .ok_or_else(|| Error::InvalidConfig(format!("date {date} beyond series end")))?;
        return Ok(index as f64);
    }
    value
        .parse::<f64>()
        .map_err(|_| Error::InvalidConfig(format!("invalid tc value {value:?}")))
}

fn parse_range(text: &str) -> Result<(f64, f64, usize), Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidConfig(format!("range must be lo:hi:points, got {text:?}")));
    }
    let lo = parts[0]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("invalid range start {:?}", parts[0])))?;
    let hi = parts[1]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("invalid range end {:?}", parts[1])))?;
    let points = parts[2]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("invalid point count {:?}", parts[2])))?;
    Ok((lo, hi, points))
}
