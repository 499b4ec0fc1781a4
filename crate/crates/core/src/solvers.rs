//! Cyclic and randomized Kaczmarz iterations.
//!
//! Both solvers advance in sweeps of `m` single-row projections and record
//! the squared error `‖x_{jm} − x_true‖²` at every sweep boundary.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{DenseMatrix, LinalgError, ZERO_ROW_THRESHOLD};
use crate::rng::{derived_seed, rng_from_seed, DEFAULT_SEED};
use crate::scalar::{dot, norm2_sq, Scalar};

/// Absolute floor for the consistency check `‖A·x_true − b‖∞`.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("row {0} has zero norm")]
    ZeroRow(usize),
    #[error("no ground-truth solution attached to the system")]
    MissingTruth,
    #[error("relaxation parameter {0} outside (0, 2)")]
    InvalidLambda(f64),
    #[error("sweep count must be at least 1")]
    InvalidSweeps,
    #[error("realization count must be at least 1")]
    InvalidRealizations,
    #[error("system must satisfy m >= n >= 1, got {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
    #[error("ground truth does not solve the system: max residual {residual:e}")]
    Inconsistent { residual: f64 },
    #[error("row index {index} out of range for {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl SolverError {
    pub fn name(&self) -> &'static str {
        match self {
            SolverError::Linalg(e) => e.name(),
            SolverError::ZeroRow(_) => "ZeroRow",
            SolverError::MissingTruth => "MissingTruth",
            SolverError::InvalidLambda(_) => "InvalidLambda",
            SolverError::InvalidSweeps => "InvalidSweeps",
            SolverError::InvalidRealizations => "InvalidRealizations",
            SolverError::InvalidShape { .. } => "InvalidShape",
            SolverError::Inconsistent { .. } => "Inconsistent",
            SolverError::IndexOutOfRange { .. } => "IndexOutOfRange",
            SolverError::DimensionMismatch(_) => "DimensionMismatch",
        }
    }
}

pub type Result<T, E = SolverError> = std::result::Result<T, E>;

/// A consistent system `Ax = b`, optionally with its known solution.
///
/// Row `i` encodes the hyperplane `{x : aᵢᵀx = bᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    a: DenseMatrix<T>,
    b: Vec<T>,
    x_true: Option<Vec<T>>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(a: DenseMatrix<T>, b: Vec<T>, x_true: Option<Vec<T>>) -> Result<Self> {
        let (m, n) = a.shape();
        if n == 0 || m < n {
            return Err(SolverError::InvalidShape { rows: m, cols: n });
        }
        if b.len() != m {
            return Err(SolverError::DimensionMismatch(format!(
                "rhs has length {}, expected {m}",
                b.len()
            )));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(SolverError::DimensionMismatch(
                "rhs has non-finite entries".into(),
            ));
        }
        if let Some(x) = &x_true {
            if x.len() != n {
                return Err(SolverError::DimensionMismatch(format!(
                    "truth has length {}, expected {n}",
                    x.len()
                )));
            }
            let ax = a.matvec(x)?;
            let residual = ax
                .iter()
                .zip(&b)
                .fold(T::zero(), |acc, (&p, &q)| acc.max((p - q).abs()));
            let scale = b.iter().fold(T::one(), |acc, x| acc.max(x.abs()));
            let tol = T::lit(CONSISTENCY_TOL).max(T::lit(64.0) * T::epsilon() * scale);
            if !(residual <= tol) {
                return Err(SolverError::Inconsistent {
                    residual: residual.to_f64_lossy(),
                });
            }
        }
        Ok(Self { a, b, x_true })
    }

    #[inline]
    pub fn a(&self) -> &DenseMatrix<T> {
        &self.a
    }

    #[inline]
    pub fn b(&self) -> &[T] {
        &self.b
    }

    #[inline]
    pub fn x_true(&self) -> Option<&[T]> {
        self.x_true.as_deref()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    fn row_norms_sq(&self) -> Result<Vec<T>> {
        let threshold = T::lit(ZERO_ROW_THRESHOLD).max(T::min_positive_value());
        self.a
            .row_iter()
            .enumerate()
            .map(|(i, r)| {
                let nsq = norm2_sq(r);
                if nsq.sqrt() < threshold || nsq == T::zero() {
                    Err(SolverError::ZeroRow(i))
                } else {
                    Ok(nsq)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowOrdering {
    /// Row `k mod m` at step `k`.
    #[default]
    Cyclic,
    /// Rows drawn i.i.d. with probability `‖a_p‖²/‖A‖_F²`.
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub lambda: T,
    pub sweeps: usize,
    pub ordering: RowOrdering,
    pub seed: u64,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::one(),
            sweeps: 50,
            ordering: RowOrdering::Cyclic,
            seed: DEFAULT_SEED,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn cyclic(lambda: T, sweeps: usize) -> Self {
        Self {
            lambda,
            sweeps,
            ..Self::default()
        }
    }

    pub fn randomized(lambda: T, sweeps: usize, seed: u64) -> Self {
        Self {
            lambda,
            sweeps,
            ordering: RowOrdering::Randomized,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > T::zero() && self.lambda < T::lit(2.0)) {
            return Err(SolverError::InvalidLambda(self.lambda.to_f64_lossy()));
        }
        if self.sweeps == 0 {
            return Err(SolverError::InvalidSweeps);
        }
        Ok(())
    }
}

/// Squared errors at sweep boundaries plus the last iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace<T> {
    /// Entry `j` is `‖x_{jm} − x_true‖²`, `j = 0..=sweeps`.
    pub sq_errors: Vec<T>,
    pub final_x: Vec<T>,
}

fn sq_dist<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&p, &q)| (p - q) * (p - q)).sum()
}

#[inline]
fn project<T: Scalar>(x: &mut [T], row: &[T], rhs: T, row_norm_sq: T, lambda: T) {
    let step = lambda * (rhs - dot(row, x)) / row_norm_sq;
    for (xi, &ai) in x.iter_mut().zip(row) {
        *xi += step * ai;
    }
}

/// One relaxed projection onto the hyperplane of `row`.
pub fn ka_step<T: Scalar>(
    x: &[T],
    system: &LinearSystem<T>,
    row: usize,
    lambda: T,
) -> Result<Vec<T>> {
    if row >= system.rows() {
        return Err(SolverError::IndexOutOfRange {
            index: row,
            rows: system.rows(),
        });
    }
    if x.len() != system.cols() {
        return Err(SolverError::DimensionMismatch(format!(
            "iterate has length {}, expected {}",
            x.len(),
            system.cols()
        )));
    }
    let a = system.a.row(row);
    let nsq = norm2_sq(a);
    if nsq == T::zero() || nsq.sqrt() < T::lit(ZERO_ROW_THRESHOLD).max(T::min_positive_value()) {
        return Err(SolverError::ZeroRow(row));
    }
    let mut out = x.to_vec();
    project(&mut out, a, system.b[row], nsq, lambda);
    Ok(out)
}

fn prepare<'a, T: Scalar>(
    system: &'a LinearSystem<T>,
    config: &SolverConfig<T>,
    x0: &[T],
) -> Result<(&'a [T], Vec<T>)> {
    config.validate()?;
    let truth = system.x_true().ok_or(SolverError::MissingTruth)?;
    if x0.len() != system.cols() {
        return Err(SolverError::DimensionMismatch(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            system.cols()
        )));
    }
    Ok((truth, system.row_norms_sq()?))
}

/// Cyclic Kaczmarz: `sweeps · m` steps visiting rows `0, 1, …, m−1, 0, …`.
///
/// Ignores `config.ordering` and `config.seed`.
pub fn ka_run<T: Scalar>(
    system: &LinearSystem<T>,
    config: &SolverConfig<T>,
    x0: &[T],
) -> Result<ConvergenceTrace<T>> {
    let (truth, norms) = prepare(system, config, x0)?;
    let mut x = x0.to_vec();
    let mut sq_errors = Vec::with_capacity(config.sweeps + 1);
    sq_errors.push(sq_dist(&x, truth));
    for _ in 0..config.sweeps {
        for (i, &nsq) in norms.iter().enumerate() {
            project(&mut x, system.a.row(i), system.b[i], nsq, config.lambda);
        }
        sq_errors.push(sq_dist(&x, truth));
    }
    Ok(ConvergenceTrace {
        sq_errors,
        final_x: x,
    })
}

/// Inverse-CDF sampler over squared row norms.
#[derive(Debug, Clone)]
pub struct RowSampler<T> {
    cumulative: Vec<T>,
}

impl<T: Scalar> RowSampler<T> {
    pub fn new(a: &DenseMatrix<T>) -> Self {
        Self::from_weights(a.row_iter().map(norm2_sq))
    }

    fn from_weights(weights: impl IntoIterator<Item = T>) -> Self {
        let mut acc = T::zero();
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty sampler");
        let u = T::lit(rng.random::<f64>()) * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Randomized Kaczmarz: each of the `sweeps · m` steps draws its row from
/// [`RowSampler`]. The trace is a deterministic function of `config.seed`.
pub fn rka_run<T: Scalar>(
    system: &LinearSystem<T>,
    config: &SolverConfig<T>,
    x0: &[T],
) -> Result<ConvergenceTrace<T>> {
    let (truth, norms) = prepare(system, config, x0)?;
    let sampler = RowSampler::from_weights(norms.iter().copied());
    let mut rng = rng_from_seed(config.seed);
    let m = system.rows();
    let mut x = x0.to_vec();
    let mut sq_errors = Vec::with_capacity(config.sweeps + 1);
    sq_errors.push(sq_dist(&x, truth));
    for _ in 0..config.sweeps {
        for _ in 0..m {
            let i = sampler.sample(&mut rng);
            project(
                &mut x,
                system.a.row(i),
                system.b[i],
                norms[i],
                config.lambda,
            );
        }
        sq_errors.push(sq_dist(&x, truth));
    }
    Ok(ConvergenceTrace {
        sq_errors,
        final_x: x,
    })
}

/// Dispatches on `config.ordering`.
pub fn run<T: Scalar>(
    system: &LinearSystem<T>,
    config: &SolverConfig<T>,
    x0: &[T],
) -> Result<ConvergenceTrace<T>> {
    match config.ordering {
        RowOrdering::Cyclic => ka_run(system, config, x0),
        RowOrdering::Randomized => rka_run(system, config, x0),
    }
}

/// Runs the configured iteration without a known solution and returns the
/// final iterate.
pub fn solve<T: Scalar>(
    system: &LinearSystem<T>,
    config: &SolverConfig<T>,
    x0: &[T],
) -> Result<Vec<T>> {
    let placeholder = LinearSystem {
        a: system.a.clone(),
        b: system.b.clone(),
        x_true: Some(vec![T::zero(); system.cols()]),
    };
    Ok(run(&placeholder, config, x0)?.final_x)
}

/// Entrywise mean of `rka_run` traces over seeds `seed + r`, `r = 0..realizations`.
///
/// Realizations run in parallel; the sum is accumulated in realization
/// order so the result does not depend on scheduling.
pub fn mean_trace<T: Scalar>(
    system: &LinearSystem<T>,
    config: &SolverConfig<T>,
    x0: &[T],
    realizations: usize,
) -> Result<Vec<T>> {
    if realizations == 0 {
        return Err(SolverError::InvalidRealizations);
    }
    let traces = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let cfg = SolverConfig {
                seed: derived_seed(config.seed, r),
                ..*config
            };
            rka_run(system, &cfg, x0).map(|t| t.sq_errors)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mean = vec![T::zero(); config.sweeps + 1];
    for t in &traces {
        for (acc, &e) in mean.iter_mut().zip(t) {
            *acc += e;
        }
    }
    let count = T::lit(realizations as f64);
    mean.iter_mut().for_each(|x| *x /= count);
    Ok(mean)
}
