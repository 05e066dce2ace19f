use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;

use hhorder::catalog::FunctionalSpec;
use hhorder::harness::{
    self, emit_report, parse_grid, Direction, Family, Format, HarnessError, Render,
};
use hhorder::quadrature::DEFAULT_TOL;
use hhorder::rational::{parse_rational, Rational};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

/// Exact convex-order comparisons of quadrature-type functionals.
#[derive(Debug, Parser)]
#[command(name = "hhorder", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Bracket width for `threshold` (default 1e-9) or quadrature tolerance
    /// for `spot-check` (default 1e-12).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the random convex functions of `spot-check`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the relation between two functionals, e.g. `T:a=6 midpoint`.
    Compare { a: String, b: String },
    /// Run every built-in verdict and threshold claim; exits 1 on any failure.
    Suite,
    /// Locate where `family(p) <dir> target` flips on [lo, hi].
    Threshold {
        family: String,
        target: String,
        /// LE or GE
        dir: String,
        #[arg(allow_hyphen_values = true)]
        lo: String,
        #[arg(allow_hyphen_values = true)]
        hi: String,
    },
    /// Sample G(x) = ∫_0^x (F_B - F_A) on 1024 points as CSV.
    SampleG { a: String, b: String },
    /// Verdict table of a family over a parameter grid.
    Regime {
        #[arg(long, default_value = "T")]
        family: String,
        #[arg(long, default_value = "-10,-6,-2,0,1,2,4,6,8", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value = "uniform,midpoint,trapezoid")]
        targets: String,
    },
    /// Check an exact verdict numerically on random convex functions.
    SpotCheck {
        a: String,
        b: String,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

fn spec(text: &str) -> Result<FunctionalSpec, HarnessError> {
    Ok(text.parse::<FunctionalSpec>()?)
}

fn rational(text: &str) -> Result<Rational, HarnessError> {
    parse_rational(text).map_err(|e| HarnessError::Number(e.to_string()))
}

fn threshold_tol(tol: Option<f64>) -> Result<Rational, HarnessError> {
    match tol {
        None => Ok(harness::default_threshold_tol()),
        Some(t) => Rational::from_float(t)
            .filter(|r| r.is_positive())
            .ok_or(HarnessError::Tolerance(t)),
    }
}

fn write<R: Render>(cli: &Cli, report: &R) -> Result<(), HarnessError> {
    emit_report(report, cli.format.into(), cli.output.as_deref())
}

fn run(cli: &Cli) -> Result<bool, HarnessError> {
    match &cli.command {
        Command::Compare { a, b } => {
            write(cli, &harness::compare(&spec(a)?, &spec(b)?)?)?;
        }
        Command::Suite => {
            let result = harness::run_theorem_suite();
            write(cli, &result)?;
            return Ok(result.all_pass());
        }
        Command::Threshold {
            family,
            target,
            dir,
            lo,
            hi,
        } => {
            let r = harness::find_threshold(
                &Family::new(family)?,
                &Family::new(target)?,
                dir.parse::<Direction>()?,
                &rational(lo)?,
                &rational(hi)?,
                &threshold_tol(cli.tol)?,
            )?;
            write(cli, &r)?;
        }
        Command::SampleG { a, b } => {
            write(cli, &harness::sample_gap(&spec(a)?, &spec(b)?)?)?;
        }
        Command::Regime {
            family,
            grid,
            targets,
        } => {
            let targets = targets.split(',').map(|t| spec(t.trim())).collect::<Result<Vec<_>, _>>()?;
            let report = harness::regime_report(&Family::new(family)?, &parse_grid(grid)?, &targets)?;
            write(cli, &report)?;
        }
        Command::SpotCheck { a, b, count } => {
            let r = harness::spot_check(&spec(a)?, &spec(b)?, *count, cli.seed, cli.tol.unwrap_or(DEFAULT_TOL))?;
            write(cli, &r)?;
            return Ok(r.violations == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
