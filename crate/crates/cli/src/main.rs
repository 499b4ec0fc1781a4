//! `kaczmarz`: solve, report bounds, regenerate the figure data, verify.
//!
//! Exit status is 0 on success, 1 on a data or domain error (the error name
//! is printed to stderr) and 2 on a usage error.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kaczmarz_core::bounds::full_report;
use kaczmarz_core::experiments::{
    format_number, run_fig1, run_fig2, verify_suite, CsvTable, ExperimentConfig, ExperimentError,
};
use kaczmarz_core::linalg::normalize_rows;
use kaczmarz_core::solvers::{run, solve};
use kaczmarz_core::{BoundError, Config, LinalgError, Matrix, RowOrdering, SolverError, System};

#[derive(Debug, Parser)]
#[command(
    name = "kaczmarz",
    version,
    about = "Kaczmarz solvers and convergence bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ordering {
    Cyclic,
    Randomized,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run cyclic or randomized Kaczmarz on A x = b.
    ///
    /// With --truth the output is the per-sweep squared error
    /// (columns sweep,sq_error); without it, the final iterate (column x).
    Solve {
        /// Headerless CSV, one matrix row per line.
        #[arg(long)]
        matrix: PathBuf,
        /// Single-column CSV right-hand side.
        #[arg(long)]
        rhs: PathBuf,
        /// Relaxation parameter, 0 < lambda < 2.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Number of sweeps; one sweep is m row steps.
        #[arg(long, default_value_t = 50)]
        sweeps: usize,
        #[arg(long, value_enum, default_value_t = Ordering::Cyclic)]
        ordering: Ordering,
        /// Seed for the randomized ordering.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Single-column CSV with the exact solution.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every convergence bound for a matrix as key,value CSV.
    ///
    /// Rows are normalized to unit length before the bounds are evaluated.
    Bounds {
        /// Headerless CSV, one matrix row per line.
        #[arg(long)]
        matrix: PathBuf,
        /// Relaxation parameter, 0 < lambda <= 2.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured KA/RKA errors and bound envelopes on a random m x n system.
    Fig1 {
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 60)]
        sweeps: usize,
        /// Randomized runs averaged into the mean trace.
        #[arg(long, default_value_t = 1000)]
        realizations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal-relaxation bounds against the row count.
    Fig2 {
        /// Fixed value of the pseudo-inverse norm.
        #[arg(long, default_value_t = 0.5)]
        pinv_norm: f64,
        #[arg(long, default_value_t = 10)]
        m_min: usize,
        #[arg(long, default_value_t = 1000)]
        m_max: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite; exits 0 iff every property holds.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug)]
struct CliError {
    name: &'static str,
    message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.message)
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError { name: e.name(), message: e.to_string() }
            }
        }
    )*};
}
from_core!(LinalgError, SolverError, BoundError, ExperimentError);

impl CliError {
    fn input(path: &Path, message: impl fmt::Display) -> Self {
        CliError {
            name: "InputError",
            message: format!("{}: {message}", path.display()),
        }
    }

    fn io(e: io::Error) -> Self {
        CliError {
            name: "IoError",
            message: e.to_string(),
        }
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(path, e))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e))?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| CliError::input(path, format!("line {}: {f:?}: {e}", line + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input(path, "no data"));
    }
    Ok(rows)
}

fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    Ok(Matrix::from_rows(&read_rows(path)?)?)
}

fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    read_rows(path)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [x] => Ok(*x),
            _ => Err(CliError::input(
                path,
                format!("line {}: expected one value, got {}", i + 1, r.len()),
            )),
        })
        .collect()
}

/// Writes to `out` only once the whole payload is ready, so a failed run
/// leaves no file behind.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(CliError::io)?);
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(CliError::io)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(CliError::io)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Solve {
            matrix,
            rhs,
            lambda,
            sweeps,
            ordering,
            seed,
            truth,
            out,
        } => {
            let a = read_matrix(&matrix)?;
            let b = read_vector(&rhs)?;
            let truth = truth.as_deref().map(read_vector).transpose()?;
            let has_truth = truth.is_some();
            let system = System::new(a, b, truth)?;
            let ordering = match ordering {
                Ordering::Cyclic => RowOrdering::Cyclic,
                Ordering::Randomized => RowOrdering::Randomized,
            };
            let config = Config {
                lambda,
                sweeps,
                ordering,
                seed,
            };
            let x0 = vec![0.0; system.cols()];
            let table = if has_truth {
                let trace = run(&system, &config, &x0)?;
                let mut t = CsvTable::new(["sweep", "sq_error"]);
                for (j, e) in trace.sq_errors.into_iter().enumerate() {
                    t.push_row(vec![j as f64, e])?;
                }
                t
            } else {
                let mut t = CsvTable::new(["x"]);
                for x in solve(&system, &config, &x0)? {
                    t.push_row(vec![x])?;
                }
                t
            };
            emit(out.as_deref(), &table.to_csv_string())?;
        }
        Command::Bounds {
            matrix,
            lambda,
            out,
        } => {
            let b = normalize_rows(&read_matrix(&matrix)?)?;
            let report = full_report(&b, lambda)?;
            let mut text = String::from("key,value\n");
            for (key, value) in report.entries() {
                text.push_str(&format!("{key},{}\n", format_number(value)));
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Fig1 {
            m,
            n,
            sweeps,
            realizations,
            seed,
            out,
        } => {
            let cfg = ExperimentConfig {
                m,
                n,
                sweeps,
                realizations,
                seed,
                ..ExperimentConfig::fig1()
            };
            emit(out.as_deref(), &run_fig1(&cfg)?.to_csv_string())?;
        }
        Command::Fig2 {
            pinv_norm,
            m_min,
            m_max,
            out,
        } => {
            let cfg = ExperimentConfig {
                pinv_norm_fixed: Some(pinv_norm),
                m_range: Some(m_min..=m_max),
                ..ExperimentConfig::fig2()
            };
            emit(out.as_deref(), &run_fig2(&cfg)?.to_csv_string())?;
        }
        Command::Verify { seed } => {
            let report = verify_suite(seed);
            let mut text = String::new();
            for r in &report.results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {}: {}\n", r.name, r.detail));
            }
            text.push_str(&format!(
                "{} of {} properties hold\n",
                report.results.len() - report.failures(),
                report.results.len()
            ));
            emit(None, &text)?;
            if !report.all_passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help/--version
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
