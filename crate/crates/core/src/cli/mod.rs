//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit code.
//!
//! Output is CSV (default) or JSON with identical field names. Numbers carry
//! 12 significant digits in positional notation, so repeated runs with the
//! same flags produce byte-identical files.

mod table;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::asymptotics::{asymptotic_gap, clock_shift_generators, family_state, hermitian_mp_bound, Family};
use crate::bounds::{evaluate_all, ur2_best, EvalConfig, Sign, Ur2Strategy, SLACK_TOL};
use crate::mus::mus_table;
use crate::operators::WeylPair;
use crate::Error;

use table::{Cell, Table};
use verify::{run_suite, theta_grid, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "URBOUND_THREADS";

pub const SWEEP_COLUMNS: &[&str] = &["d", "theta", "sum", "ur1", "ur2", "ur2_optimal", "ur3", "ms_sum", "cos_phi3"];
pub const MUS_COLUMNS: &[&str] = &["d", "delta_u2", "ur1_half", "ur2_half", "ur3_half", "residual", "energy"];
pub const ASYM_COLUMNS: &[&str] = &[
    "d",
    "family",
    "sum",
    "scaled_hermitian",
    "ur1",
    "gap_scaled",
    "gap_ur1",
    "mus_residual",
    "series_error",
    "hermitian_slack",
];
pub const VERIFY_COLUMNS: &[&str] = &["suite", "check", "status", "count", "worst", "criterion"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "urbound", version, about = "Uncertainty relations for pairs of unitary operators")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds along cos θ|0⟩ − sin θ|d−1⟩ for θ ∈ [0, π/4] on the clock/shift pair.
    Sweep(SweepArgs),
    /// Harper ground-state minimum-uncertainty table under the half-sum convention.
    MusTable(MusTableArgs),
    /// Property suites with per-check pass/fail and worst observed value.
    Verify(VerifyArgs),
    /// High-dimensional limit diagnostics per dimension.
    Asym(AsymArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Random ψ⊥ draws per row for the sampled UR-2 column.
    #[arg(long, default_value_t = 20)]
    perp_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MusTableArgs {
    #[arg(long, default_value_t = 2)]
    d_min: usize,
    #[arg(long, default_value_t = 8)]
    d_max: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated suites; all suites when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Vec<Suite>,
    /// Comma-separated dimensions overriding each suite's defaults.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    HarperGround,
    ThetaSweep,
}

#[derive(Debug, Args)]
struct AsymArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [32usize, 64, 128])]
    d: Vec<usize>,
    #[arg(long, value_enum, default_value_t = FamilyArg::HarperGround)]
    family: FamilyArg,
    /// State parameter for `theta-sweep`.
    #[arg(long, default_value_t = 0.3)]
    theta: f64,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

fn sweep(args: &SweepArgs) -> Result<Table, Failure> {
    if args.d < 2 {
        return Err(usage("--d must be at least 2"));
    }
    if args.steps == 0 || args.perp_samples == 0 {
        return Err(usage("--steps and --perp-samples must be positive"));
    }
    let d = args.d;
    let pair = WeylPair::clock_shift(d)?;
    let rows = theta_grid(args.steps)
        .into_par_iter()
        .enumerate()
        .map(|(i, theta)| -> crate::Result<Vec<Cell>> {
            let psi = family_state(d, Family::ThetaSweep { theta })?;
            let config = EvalConfig { ur2: Ur2Strategy::Sampled { k: args.perp_samples, seed: args.seed ^ i as u64 } };
            let r = evaluate_all(&psi, pair.u(), pair.v(), &config)?;
            let optimal = ur2_best(&psi, pair.u(), pair.v())?.value;
            if optimal - r.sum > SLACK_TOL {
                return Err(Error::BoundViolated { name: "ur2_optimal", slack: r.sum - optimal });
            }
            Ok(vec![
                Cell::Int(d as u64),
                Cell::Num(theta),
                Cell::Num(r.sum),
                Cell::Num(r.ur1),
                Cell::Num(r.ur2),
                Cell::Num(optimal),
                Cell::Num(r.ur3),
                Cell::Opt(r.ms_sum),
                Cell::Opt(r.cos_phi3),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Table { columns: SWEEP_COLUMNS, rows })
}

fn mus(args: &MusTableArgs) -> Result<Table, Failure> {
    if args.d_min < 2 || args.d_max < args.d_min {
        return Err(usage("need 2 <= --d-min <= --d-max"));
    }
    let mut t = Table::new(MUS_COLUMNS);
    for r in mus_table(args.d_min, args.d_max)? {
        t.push(vec![
            Cell::Int(r.d as u64),
            Cell::Num(r.delta_u2),
            Cell::Num(r.ur1_half),
            Cell::Num(r.ur2_half),
            Cell::Num(r.ur3_half),
            Cell::Num(r.residual),
            Cell::Num(r.energy),
        ]);
    }
    Ok(t)
}

fn asym(args: &AsymArgs) -> Result<Table, Failure> {
    if args.d.is_empty() || args.d.iter().any(|&d| d < 2) {
        return Err(usage("--d needs dimensions of at least 2"));
    }
    let family = match args.family {
        FamilyArg::HarperGround => Family::HarperGround,
        FamilyArg::ThetaSweep => Family::ThetaSweep { theta: args.theta },
    };
    let name = args.family.to_possible_value().expect("no skipped variants").get_name().to_owned();
    let rows = args
        .d
        .par_iter()
        .map(|&d| -> crate::Result<Vec<Cell>> {
            let r = asymptotic_gap(d, family)?;
            let psi = family_state(d, family)?;
            let (u, v) = clock_shift_generators(d)?;
            let mut slack = f64::INFINITY;
            for sign in Sign::BOTH {
                slack = slack.min(hermitian_mp_bound(&psi, &u, &v, sign)?.slack());
            }
            Ok(vec![
                Cell::Int(d as u64),
                Cell::Text(name.clone()),
                Cell::Num(r.sum),
                Cell::Num(r.scaled_hermitian),
                Cell::Num(r.ur1),
                Cell::Num(r.gap_scaled),
                Cell::Num(r.gap_ur1),
                Cell::Opt(r.mus_residual),
                Cell::Num(r.series_error),
                Cell::Num(slack),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Table { columns: ASYM_COLUMNS, rows })
}

/// Returns the table and whether every check passed.
fn verify_cmd(args: &VerifyArgs) -> Result<(Table, bool), Failure> {
    if let Some(&d) = args.d.iter().find(|&&d| d < 2) {
        return Err(usage(format!("dimension {d} is below 2")));
    }
    if args.samples == Some(0) {
        return Err(usage("--samples must be positive"));
    }
    let suites = if args.suite.is_empty() { Suite::value_variants().to_vec() } else { args.suite.clone() };
    let dims = (!args.d.is_empty()).then_some(args.d.as_slice());
    let mut t = Table::new(VERIFY_COLUMNS);
    let mut all = true;
    for suite in suites {
        for c in run_suite(suite, dims, args.samples, args.seed)? {
            all &= c.passed;
            t.push(vec![
                Cell::Text(suite.name().into()),
                Cell::Text(c.name.into()),
                Cell::Text(if c.passed { "PASS" } else { "FAIL" }.into()),
                Cell::Int(c.count as u64),
                Cell::Num(c.worst),
                Cell::Text(c.criterion.into()),
            ]);
        }
    }
    Ok((t, all))
}

fn emit(table: &Table, cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Run(format!("write failed: {e}"));
    let mut buf = Vec::new();
    table.write(cli.format, &mut buf).map_err(io_err)?;
    match &cli.out {
        None => stdout.write_all(&buf).and_then(|_| stdout.flush()).map_err(io_err),
        Some(path) => File::create(path)
            .and_then(|mut f| f.write_all(&buf))
            .map_err(|e| Failure::Run(format!("{}: {e}", path.display()))),
    }
}

fn compute(cli: &Cli) -> Result<(Table, bool), Failure> {
    Ok(match &cli.command {
        Command::Sweep(a) => (sweep(a)?, true),
        Command::MusTable(a) => (mus(a)?, true),
        Command::Asym(a) => (asym(a)?, true),
        Command::Verify(a) => verify_cmd(a)?,
    })
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let outcome = threads_from_env()
        .and_then(|threads| match threads {
            None => compute(&cli),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Run(format!("thread pool: {e}")))?
                .install(|| compute(&cli)),
        })
        .and_then(|(table, passed)| emit(&table, &cli, stdout).map(|_| passed));
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "urbound: verification failed");
            EXIT_FAILURE
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "urbound: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Run(msg)) => {
            let _ = writeln!(stderr, "urbound: {msg}");
            EXIT_FAILURE
        }
    }
}
