//! Cyclic and randomized Kaczmarz solvers for consistent linear systems,
//! with calculators for per-sweep convergence bounds and the harnesses
//! that check them empirically.
//!
//! The numeric core ([`linalg`], [`solvers`], [`bounds`]) is generic over
//! [`Scalar`] (`f32` or `f64`). The aliases below fix the scalar to `f64`,
//! which is what [`experiments`] and the command line use.

// `!(a <= b)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod experiments;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod solvers;

pub use bounds::{BoundError, BoundReport, Partition};
pub use linalg::{DenseMatrix, LinalgError, SvdResult};
pub use scalar::Scalar;
pub use solvers::{ConvergenceTrace, LinearSystem, RowOrdering, SolverConfig, SolverError};

pub type Matrix = DenseMatrix<f64>;
pub type Matrix32 = DenseMatrix<f32>;
pub type System = LinearSystem<f64>;
pub type System32 = LinearSystem<f32>;
pub type Config = SolverConfig<f64>;
pub type Trace = ConvergenceTrace<f64>;
pub type Report = BoundReport<f64>;
