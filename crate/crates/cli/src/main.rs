//! Command-line front end: Mittag-Leffler evaluation, series solving,
//! mechanized-versus-reference verification, figure-surface grids and the
//! comparison table.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 symbolic basis
//! overflow, 4 I/O failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracnlse::adm_solver::{
    compare, paper_series, solve, Experiment, ProblemSpec, SeriesSolution, SolveError,
};
use fracnlse::reporting::{
    evaluate_grid, export_csv, export_json, table1, CsvRecord, ExactFixtures, GridSpec, ReportError,
};
use fracnlse::special_functions::{mittag_leffler, ComplexValue, MLArgs};
use fracnlse::Sense;

#[derive(Parser)]
#[command(
    name = "fracnlse",
    version,
    about = "Series solutions of the fractional modified nonlinear Schrodinger equation",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SenseArg {
    Caputo,
    Conformable,
}

impl From<SenseArg> for Sense {
    fn from(s: SenseArg) -> Self {
        match s {
            SenseArg::Caputo => Sense::Caputo,
            SenseArg::Conformable => Sense::Conformable,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Run the decomposition recursion.
    Mechanized,
    /// Use the transcribed reference series (depth at most 2).
    Paper,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Mittag-Leffler function E_{xi,zeta}(re + im*i).
    Ml {
        /// First parameter, must be positive.
        #[arg(long)]
        xi: f64,
        /// Second parameter (real).
        #[arg(long, allow_negative_numbers = true)]
        zeta: f64,
        /// Real part of the argument.
        #[arg(long, allow_negative_numbers = true)]
        re: f64,
        /// Imaginary part of the argument.
        #[arg(long, allow_negative_numbers = true)]
        im: f64,
    },
    /// Print the series solution, one line per term per order.
    Solve(SolveArgs),
    /// Compare the mechanized series against the transcribed reference and
    /// print the term-level report as JSON.
    Verify {
        /// Boundary preset (1 = Caputo, 2 = conformable).
        #[arg(long)]
        experiment: u8,
        /// Space order, in (0, 1].
        #[arg(long)]
        gamma: f64,
        /// Time order, in (0, 1].
        #[arg(long)]
        delta: f64,
    },
    /// Sample the truncated series on a rectangular grid and export it.
    Grid(GridArgs),
    /// Recompute the comparison table against the exact fixtures.
    Table1 {
        /// Truncation depth (0, 1 or 2).
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Derivative sense; must match the experiment preset when given.
    #[arg(long, value_enum)]
    sense: Option<SenseArg>,
    /// Space order, in (0, 1].
    #[arg(long)]
    gamma: f64,
    /// Time order, in (0, 1].
    #[arg(long)]
    delta: f64,
    /// Number of recursion steps past the boundary term.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Boundary preset (1 = Caputo, 2 = conformable).
    #[arg(long)]
    experiment: u8,
    #[arg(long, value_enum, default_value_t = Mode::Mechanized)]
    mode: Mode,
}

#[derive(Args)]
struct GridArgs {
    /// Derivative sense; must match the experiment preset when given.
    #[arg(long, value_enum)]
    sense: Option<SenseArg>,
    /// Space order, in (0, 1].
    #[arg(long)]
    gamma: f64,
    /// Time order, in (0, 1].
    #[arg(long)]
    delta: f64,
    /// Truncation depth.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Boundary preset (1 = Caputo, 2 = conformable).
    #[arg(long)]
    experiment: u8,
    #[arg(long, value_enum, default_value_t = Mode::Paper)]
    mode: Mode,
    #[arg(long, default_value_t = 50)]
    nx: usize,
    #[arg(long, default_value_t = 50)]
    nt: usize,
    #[arg(long, default_value_t = 0.02)]
    x_min: f64,
    #[arg(long, default_value_t = 1.0)]
    x_max: f64,
    #[arg(long, default_value_t = 0.02)]
    t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Failure classes mapped onto exit codes.
enum CliError {
    Usage(String),
    Overflow(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Overflow(_) => 3,
            Self::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Overflow(m) | Self::Io(m) => m,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BasisOverflow { order } => {
                Self::Overflow(format!("symbolic basis exceeded at series order {order}"))
            }
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io(inner) => Self::Io(inner.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ml { xi, zeta, re, im } => cmd_ml(xi, zeta, re, im),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify {
            experiment,
            gamma,
            delta,
        } => cmd_verify(experiment, gamma, delta),
        Command::Grid(args) => cmd_grid(args),
        Command::Table1 { depth, out, format } => cmd_table1(depth, out, format),
    }
}

fn cmd_ml(xi: f64, zeta: f64, re: f64, im: f64) -> Result<(), CliError> {
    // the negated form also rejects NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(xi > 0.0) {
        return Err(CliError::Usage("xi must be positive".into()));
    }
    let args = MLArgs::new(xi, zeta, ComplexValue::new(re, im))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let value = mittag_leffler(args).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{:.12} {:.12}", value.re, value.im);
    Ok(())
}

fn parse_experiment(n: u8) -> Result<Experiment, CliError> {
    Experiment::from_number(n)
        .ok_or_else(|| CliError::Usage(format!("experiment must be 1 or 2, got {n}")))
}

fn check_orders(gamma: f64, delta: f64) -> Result<(), CliError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(CliError::Usage(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CliError::Usage(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    Ok(())
}

fn check_sense(sense: Option<SenseArg>, experiment: Experiment) -> Result<(), CliError> {
    if let Some(s) = sense {
        if Sense::from(s) != experiment.sense() {
            return Err(CliError::Usage(format!(
                "experiment {} uses the {} sense",
                experiment.number(),
                experiment.sense()
            )));
        }
    }
    Ok(())
}

fn build_series(
    experiment: Experiment,
    gamma: f64,
    delta: f64,
    depth: usize,
    mode: Mode,
) -> Result<SeriesSolution, CliError> {
    match mode {
        Mode::Mechanized => {
            let spec = ProblemSpec::experiment(experiment, gamma, delta, depth)?;
            Ok(solve(&spec)?)
        }
        Mode::Paper => {
            if depth > 2 {
                return Err(CliError::Usage(format!(
                    "the transcribed reference series stops at depth 2, got {depth}"
                )));
            }
            let mut series = paper_series(experiment, gamma, delta);
            series.psi.truncate(depth + 1);
            series.spec.depth = depth;
            Ok(series)
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let experiment = parse_experiment(args.experiment)?;
    check_orders(args.gamma, args.delta)?;
    check_sense(args.sense, experiment)?;
    let series = build_series(experiment, args.gamma, args.delta, args.depth, args.mode)?;
    print!("{}", series.render_text());
    Ok(())
}

fn cmd_verify(experiment: u8, gamma: f64, delta: f64) -> Result<(), CliError> {
    let experiment = parse_experiment(experiment)?;
    check_orders(gamma, delta)?;
    let spec = ProblemSpec::experiment(experiment, gamma, delta, 2)?;
    let mechanized = solve(&spec)?;
    let transcribed = paper_series(experiment, gamma, delta);
    let report = compare(&mechanized, &transcribed)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

/// Open the destination, run the export, and surface write failures with
/// the path.
fn write_output(
    out: Option<PathBuf>,
    write: impl Fn(&mut dyn Write) -> Result<(), ReportError>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut file = File::create(&path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write(&mut file).map_err(|e| match e {
                ReportError::Io(inner) => CliError::Io(format!("{}: {inner}", path.display())),
                other => CliError::from(other),
            })
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(CliError::from)
        }
    }
}

fn export<R: CsvRecord + serde::Serialize>(
    rows: &[R],
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    write_output(out, |w| match format {
        Format::Csv => export_csv(rows, w),
        Format::Json => export_json(rows, w),
    })
}

fn cmd_grid(args: GridArgs) -> Result<(), CliError> {
    let experiment = parse_experiment(args.experiment)?;
    check_orders(args.gamma, args.delta)?;
    check_sense(args.sense, experiment)?;
    let series = build_series(experiment, args.gamma, args.delta, args.depth, args.mode)?;
    let grid = GridSpec::new(
        args.x_min, args.x_max, args.t_min, args.t_max, args.nx, args.nt,
    )?;
    let rows = evaluate_grid(&series, &grid)?;
    export(&rows, args.out, args.format)
}

fn cmd_table1(depth: usize, out: Option<PathBuf>, format: Format) -> Result<(), CliError> {
    if depth > 2 {
        return Err(CliError::Usage(format!(
            "table depth must be 0, 1 or 2, got {depth}"
        )));
    }
    let pairs = fracnlse::reporting::reference::ORDER_PAIRS;
    let mut cp = Vec::new();
    let mut cm = Vec::new();
    for &(g, d) in &pairs {
        cp.push(build_series(Experiment::One, g, d, depth, Mode::Paper)?);
        cm.push(build_series(Experiment::Two, g, d, depth, Mode::Paper)?);
    }
    let rows = table1(
        &cp,
        &cm,
        &ExactFixtures::reference_points(),
        &ExactFixtures::reference(),
    )?;
    export(&rows, out, format)
}
