//! Seeded problem generation and the two figure harnesses.
//!
//! Figure 1 compares measured cyclic and randomized convergence on a tall
//! Gaussian system with three bound envelopes; figure 2 sweeps the
//! optimal-relaxation bounds over the row count at a fixed `‖B†‖₂`.

mod csv;
pub mod verify;

use std::ops::RangeInclusive;

use thiserror::Error;

use crate::bounds::{
    bound_corollary1, bound_corollary2, bound_ref24, bound_rka, bound_theorem1, default_partition,
    optimal_lambda_ref24, optimal_lambda_thm1, BoundError,
};
use crate::linalg::{normalize_rows, pinv_norm, DenseMatrix, LinalgError, ZERO_ROW_THRESHOLD};
use crate::rng::{rng_from_seed, standard_normal_vec, DEFAULT_SEED};
use crate::scalar::norm2;
use crate::solvers::{ka_run, mean_trace, LinearSystem, SolverConfig, SolverError};

pub use self::csv::{format_number, CsvTable};
pub use self::verify::{
    verify_suite, verify_suite_with, PropertyResult, VerifyOptions, VerifyReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl ExperimentError {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentError::Solver(e) => e.name(),
            ExperimentError::Bound(e) => e.name(),
            ExperimentError::Linalg(e) => e.name(),
            ExperimentError::Config(_) => "ConfigError",
            ExperimentError::Csv(_) => "CsvError",
        }
    }
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

pub const FIG1_COLUMNS: [&str; 6] = [
    "sweep",
    "ka_sq_error",
    "rka_mean_sq_error",
    "ka_bd1",
    "ka_bd2",
    "rka_bd",
];
pub const FIG2_COLUMNS: [&str; 3] = ["m", "bd_ref24_opt", "bd_thm1_opt"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub sweeps: usize,
    pub realizations: usize,
    pub seed: u64,
    /// Fixed `‖B†‖₂` for the matrix-free figure-2 sweep.
    pub pinv_norm_fixed: Option<f64>,
    pub m_range: Option<RangeInclusive<usize>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::fig1()
    }
}

impl ExperimentConfig {
    /// 30×3 system, λ = 1, 60 sweeps, 1000 randomized realizations, seed 42.
    pub fn fig1() -> Self {
        Self {
            m: 30,
            n: 3,
            lambda: 1.0,
            sweeps: 60,
            realizations: 1000,
            seed: DEFAULT_SEED,
            pinv_norm_fixed: None,
            m_range: None,
        }
    }

    /// `‖B†‖₂ = 0.5`, `m = 10..=1000`.
    pub fn fig2() -> Self {
        Self {
            pinv_norm_fixed: Some(0.5),
            m_range: Some(10..=1000),
            ..Self::fig1()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(ExperimentError::Config("sweeps must be at least 1".into()));
        }
        if self.realizations == 0 {
            return Err(ExperimentError::Config(
                "realizations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Row-normalized Gaussian system `B x = b` with a Gaussian solution.
///
/// Entries of `A` are drawn row by row from the seeded generator; a row
/// whose norm underflows is redrawn once. Returns the normalized matrix.
pub fn gen_problem(m: usize, n: usize, seed: u64) -> Result<LinearSystem<f64>> {
    if n == 0 || m < n {
        return Err(SolverError::InvalidShape { rows: m, cols: n }.into());
    }
    let mut rng = rng_from_seed(seed);
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        let mut row = standard_normal_vec(&mut rng, n);
        if norm2(&row) < ZERO_ROW_THRESHOLD {
            row = standard_normal_vec(&mut rng, n);
            if norm2(&row) < ZERO_ROW_THRESHOLD {
                return Err(LinalgError::ZeroRow(i).into());
            }
        }
        data.extend(row);
    }
    let a = normalize_rows(&DenseMatrix::new(m, n, data)?)?;
    let x_true = standard_normal_vec(&mut rng, n);
    let b = a.matvec(&x_true)?;
    Ok(LinearSystem::new(a, b, Some(x_true))?)
}

/// Measured traces and bound envelopes for one generated system.
///
/// Bounds are anchored at the common initial squared error. Requires
/// `λ = 1`, the setting in which the single-matrix bound `ka_bd1` holds.
pub fn run_fig1(config: &ExperimentConfig) -> Result<CsvTable> {
    config.validate()?;
    if config.lambda != 1.0 {
        return Err(ExperimentError::Config(format!(
            "figure 1 is defined for lambda = 1, got {}",
            config.lambda
        )));
    }
    let system = gen_problem(config.m, config.n, config.seed)?;
    let b = system.a();
    let (m, n) = b.shape();
    let x0 = vec![0.0; n];

    let ka = ka_run(
        &system,
        &SolverConfig::cyclic(config.lambda, config.sweeps),
        &x0,
    )?;
    let rka = mean_trace(
        &system,
        &SolverConfig::randomized(config.lambda, config.sweeps, config.seed),
        &x0,
        config.realizations,
    )?;

    let p = pinv_norm(b)?;
    let bd1 = bound_corollary1(p, m)?;
    let bd2 = bound_corollary2(b, config.lambda, &default_partition(m, n)?)?;
    let frob_sq = b.frobenius_sq();
    let e0 = ka.sq_errors[0];

    let mut table = CsvTable::new(FIG1_COLUMNS);
    for (j, (&ka_err, &rka_err)) in ka.sq_errors.iter().zip(&rka).enumerate() {
        let jf = j as i32;
        table.push_row(vec![
            j as f64,
            ka_err,
            rka_err,
            e0 * bd1.powi(jf),
            e0 * bd2.powi(jf),
            e0 * bound_rka(frob_sq, p, j * m)?,
        ])?;
    }
    Ok(table)
}

/// Optimal-relaxation bounds against the row count at fixed `‖B†‖₂`.
pub fn run_fig2(config: &ExperimentConfig) -> Result<CsvTable> {
    let p = config
        .pinv_norm_fixed
        .ok_or_else(|| ExperimentError::Config("pinv_norm_fixed is required".into()))?;
    let range = config
        .m_range
        .clone()
        .ok_or_else(|| ExperimentError::Config("m_range is required".into()))?;
    if *range.start() < 2 || range.is_empty() {
        return Err(ExperimentError::Config(format!(
            "m range {}..={} must be non-empty and start at 2 or more",
            range.start(),
            range.end()
        )));
    }
    let mut table = CsvTable::new(FIG2_COLUMNS);
    for m in range {
        table.push_row(vec![
            m as f64,
            bound_ref24(p, m, optimal_lambda_ref24(m)?)?,
            bound_theorem1(p, m, optimal_lambda_thm1(m)?, false)?,
        ])?;
    }
    Ok(table)
}
