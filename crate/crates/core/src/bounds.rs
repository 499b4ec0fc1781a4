//! Closed-form per-sweep contraction bounds for cyclic Kaczmarz, the
//! comparison bounds they are measured against, and the exact contraction
//! `‖M_m‖₂²` that serves as their oracle.
//!
//! Notation: `B` is the row-normalized system matrix with `m` rows and `n`
//! columns, `M_m` the full sweep matrix (see [`sweep_matrix`]) and
//! `pinv_norm = ‖B†‖₂`.

use std::ops::Range;

use thiserror::Error;

use crate::linalg::{pinv_norm, spectral_norm, svd_values, sweep_matrix, DenseMatrix, LinalgError};
use crate::scalar::{norm2, Scalar};

/// Row norms must be within this of 1 for [`full_report`].
pub const NORMALIZED_ROW_TOL: f64 = 1e-8;

/// Tolerance on `Σσᵢ² = n` accepted by [`lemma1_check`].
pub const LEMMA1_FROBENIUS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("block {0} of the partition is rank deficient")]
    BlockRankDeficient(usize),
    #[error("row {row} has norm {norm}, expected 1")]
    NotNormalized { row: usize, norm: f64 },
}

impl BoundError {
    pub fn name(&self) -> &'static str {
        match self {
            BoundError::Linalg(e) => e.name(),
            BoundError::Domain(_) => "DomainError",
            BoundError::NotSquare { .. } => "NotSquare",
            BoundError::BlockRankDeficient(_) => "BlockRankDeficient",
            BoundError::NotNormalized { .. } => "NotNormalized",
        }
    }
}

pub type Result<T, E = BoundError> = std::result::Result<T, E>;

fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BoundError::Domain(msg.into()))
}

fn check_lambda_closed<T: Scalar>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda <= T::lit(2.0) {
        Ok(())
    } else {
        domain(format!("lambda = {lambda} outside (0, 2]"))
    }
}

fn check_lambda_open<T: Scalar>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda < T::lit(2.0) {
        Ok(())
    } else {
        domain(format!("lambda = {lambda} outside (0, 2)"))
    }
}

fn check_pinv<T: Scalar>(pinv_norm: T) -> Result<()> {
    if pinv_norm > T::zero() && pinv_norm.is_finite() {
        Ok(())
    } else {
        domain(format!(
            "pinv_norm = {pinv_norm} must be positive and finite"
        ))
    }
}

#[inline]
fn count<T: Scalar>(k: usize) -> T {
    T::lit(k as f64)
}

/// Exact squared per-sweep contraction `‖M_m‖₂²` for rows visited in order.
pub fn true_contraction<T: Scalar>(b: &DenseMatrix<T>, lambda: T) -> Result<T> {
    let order: Vec<usize> = (0..b.rows()).collect();
    let s = spectral_norm(&sweep_matrix(b, lambda, &order)?)?;
    Ok(s * s)
}

/// `1 − λ(2−λ) / ((2 + λ²m²)·pinv_norm²)`, or with `m(m−1)` in place of
/// `m²` when `sharp` is set. Accepts `λ = 2`, where the value is exactly 1.
pub fn bound_theorem1<T: Scalar>(pinv_norm: T, m: usize, lambda: T, sharp: bool) -> Result<T> {
    check_pinv(pinv_norm)?;
    check_lambda_closed(lambda)?;
    if m == 0 {
        return domain("m must be at least 1");
    }
    let mm = if sharp {
        count::<T>(m) * count::<T>(m - 1)
    } else {
        count::<T>(m) * count::<T>(m)
    };
    let two = T::lit(2.0);
    Ok(T::one() - lambda * (two - lambda) / ((two + lambda * lambda * mm) * pinv_norm * pinv_norm))
}

/// `λ = 1` specialisation valid for `m ≥ n ≥ 2`: `1 − 1/(2m²·pinv_norm²)`.
pub fn bound_corollary1<T: Scalar>(pinv_norm: T, m: usize) -> Result<T> {
    check_pinv(pinv_norm)?;
    if m < 2 {
        return domain(format!("corollary bound needs m >= 2, got {m}"));
    }
    let m = count::<T>(m);
    Ok(T::one() - T::one() / (T::lit(2.0) * m * m * pinv_norm * pinv_norm))
}

/// Contiguous, disjoint blocks of row indices covering `0..m` in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Range<usize>>,
}

impl Partition {
    /// Validates that `blocks` tile `0..m` contiguously with no empty block.
    pub fn new(blocks: Vec<Range<usize>>, m: usize) -> Result<Self> {
        let mut next = 0;
        for (i, b) in blocks.iter().enumerate() {
            if b.start != next || b.end <= b.start {
                return domain(format!("block {i} ({b:?}) breaks the tiling of 0..{m}"));
            }
            next = b.end;
        }
        if next != m {
            return domain(format!("blocks cover 0..{next}, expected 0..{m}"));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn row_count(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.end)
    }
}

/// `⌈m/n⌉` blocks of `n` consecutive rows, the last one holding the remainder.
pub fn default_partition(m: usize, n: usize) -> Result<Partition> {
    if n == 0 || m < n {
        return domain(format!("partition needs m >= n >= 1, got m = {m}, n = {n}"));
    }
    let q = m.div_ceil(n);
    let blocks = (0..q).map(|i| i * n..((i + 1) * n).min(m)).collect();
    Partition::new(blocks, m)
}

/// Product bound over row blocks:
/// `∏ᵢ (1 − λ(2−λ) / ((2 + λ²sᵢ(sᵢ−1))·‖Bᵢ†‖₂²))` with `sᵢ` the block's row count.
pub fn bound_corollary2<T: Scalar>(
    b: &DenseMatrix<T>,
    lambda: T,
    partition: &Partition,
) -> Result<T> {
    check_lambda_closed(lambda)?;
    if partition.row_count() != b.rows() {
        return domain(format!(
            "partition covers {} rows, matrix has {}",
            partition.row_count(),
            b.rows()
        ));
    }
    let mut product = T::one();
    for (i, range) in partition.blocks().iter().enumerate() {
        let block = b.row_block(range.clone())?;
        let p = match pinv_norm(&block) {
            Ok(p) => p,
            Err(LinalgError::RankDeficient { .. } | LinalgError::WideMatrix { .. }) => {
                return Err(BoundError::BlockRankDeficient(i))
            }
            Err(e) => return Err(e.into()),
        };
        product *= bound_theorem1(p, range.len(), lambda, true)?;
    }
    Ok(product)
}

/// `1 − ∏σᵢ²` for a square row-normalized matrix.
pub fn bound_meany<T: Scalar>(b: &DenseMatrix<T>) -> Result<T> {
    let (rows, cols) = b.shape();
    if rows != cols {
        return Err(BoundError::NotSquare { rows, cols });
    }
    let svd = svd_values(b)?;
    let prod = svd
        .singular_values
        .iter()
        .fold(T::one(), |acc, &s| acc * s * s);
    Ok((T::one() - prod).max(T::zero()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma1Outcome {
    /// `σ_{n−1}² ≤ (n−2)^{n−2} / (2nⁿ)`
    pub hypothesis: bool,
    /// `∏_{i<n} σᵢ² ≤ 1/(2n²)`
    pub conclusion: bool,
}

/// Threshold `(n−2)^{n−2} / (2nⁿ)` on `σ_{n−1}²`, evaluated in log space.
pub fn lemma1_threshold<T: Scalar>(n: usize) -> Result<T> {
    if n < 3 {
        return domain(format!("lemma threshold needs n >= 3, got {n}"));
    }
    let nf = n as f64;
    let log = (nf - 2.0) * (nf - 2.0).ln() - std::f64::consts::LN_2 - nf * nf.ln();
    Ok(T::lit(log.exp()))
}

/// Evaluates both sides of the sufficient condition for the Meany bound to
/// be looser than [`bound_corollary1`]. `sigma` holds descending singular
/// values of a square row-normalized matrix, so `Σσᵢ² = n`.
pub fn lemma1_check<T: Scalar>(sigma: &[T], n: usize) -> Result<Lemma1Outcome> {
    let threshold = lemma1_threshold::<T>(n)?;
    if sigma.len() != n {
        return domain(format!("expected {n} singular values, got {}", sigma.len()));
    }
    if sigma.iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
        return domain("singular values must be finite and non-negative");
    }
    if sigma.windows(2).any(|w| w[0] < w[1]) {
        return domain("singular values must be sorted descending");
    }
    let fro: T = sigma.iter().map(|&s| s * s).sum();
    if (fro - count::<T>(n)).abs() > T::tol(LEMMA1_FROBENIUS_TOL) {
        return domain(format!(
            "sum of squared singular values is {fro}, expected {n}"
        ));
    }
    let s = sigma[n - 2];
    let head = sigma[..n - 1].iter().fold(T::one(), |acc, &x| acc * x * x);
    let nf = count::<T>(n);
    Ok(Lemma1Outcome {
        hypothesis: s * s <= threshold,
        conclusion: head <= T::one() / (T::lit(2.0) * nf * nf),
    })
}

/// Expected squared-error factor of randomized Kaczmarz after `steps` steps:
/// `(1 − 1/(frob_sq·pinv_norm²))^steps`.
pub fn bound_rka<T: Scalar>(frob_sq: T, pinv_norm: T, steps: usize) -> Result<T> {
    check_pinv(pinv_norm)?;
    let kappa = frob_sq * pinv_norm * pinv_norm;
    // κ = 1 exactly for orthonormal rows, which rounding can nudge below 1.
    if !(kappa >= T::one() - T::lit(1e3) * T::epsilon()) {
        return domain(format!("frob_sq * pinv_norm^2 = {kappa} < 1"));
    }
    let base = (T::one() - T::one() / kappa).max(T::zero());
    Ok(base.powf(count(steps)))
}

/// Comparison bound `1 − λ(2−λ) / (m[1 + (m−1)λ²]·pinv_norm²)`.
pub fn bound_ref24<T: Scalar>(pinv_norm: T, m: usize, lambda: T) -> Result<T> {
    check_pinv(pinv_norm)?;
    check_lambda_open(lambda)?;
    if m == 0 {
        return domain("m must be at least 1");
    }
    let mf = count::<T>(m);
    let denom = mf * (T::one() + (mf - T::one()) * lambda * lambda) * pinv_norm * pinv_norm;
    Ok(T::one() - lambda * (T::lit(2.0) - lambda) / denom)
}

/// Minimiser of [`bound_ref24`] in `λ`: `(√(4m−3) − 1) / (2(m−1))`.
pub fn optimal_lambda_ref24<T: Scalar>(m: usize) -> Result<T> {
    if m < 2 {
        return domain(format!("optimal lambda needs m >= 2, got {m}"));
    }
    let mf = count::<T>(m);
    Ok(((T::lit(4.0) * mf - T::lit(3.0)).sqrt() - T::one()) / (T::lit(2.0) * (mf - T::one())))
}

/// Minimiser of [`bound_theorem1`] (non-sharp) in `λ`: `(√(1+2m²) − 1) / m²`,
/// the positive root of `λ²m² + 2λ − 2 = 0`.
pub fn optimal_lambda_thm1<T: Scalar>(m: usize) -> Result<T> {
    if m == 0 {
        return domain("m must be at least 1");
    }
    let m2 = count::<T>(m) * count::<T>(m);
    Ok(((T::one() + T::lit(2.0) * m2).sqrt() - T::one()) / m2)
}

/// Comparison bound `1 − 1/(⌊log₂(2m)⌋·‖B‖₂²·pinv_norm²)`.
pub fn bound_ref26<T: Scalar>(spec_norm_sq: T, pinv_norm: T, m: usize) -> Result<T> {
    check_pinv(pinv_norm)?;
    if m == 0 {
        return domain("m must be at least 1");
    }
    let kappa = spec_norm_sq * pinv_norm * pinv_norm;
    if !(kappa >= T::one() - T::lit(1e3) * T::epsilon()) {
        return domain(format!("spec_norm_sq * pinv_norm^2 = {kappa} < 1"));
    }
    let log = (2 * m).ilog2();
    Ok((T::one() - T::one() / (count::<T>(log as usize) * kappa)).max(T::zero()))
}

/// Every applicable bound for one row-normalized matrix and relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub rho_sq_oracle: T,
    pub rho1: T,
    pub rho1_sharp: T,
    /// Absent when some block of the default partition is rank deficient.
    pub rho2: Option<T>,
    /// Present only for square matrices.
    pub meany: Option<T>,
    /// Per-step randomized factor `1 − 1/(‖B‖_F²‖B†‖₂²)`.
    pub rka_step: T,
    /// Absent at `λ = 2`.
    pub ref24: Option<T>,
    pub ref26: T,
    pub lambda: T,
    pub m: usize,
    pub n: usize,
}

impl<T: Scalar> BoundReport<T> {
    /// `(name, value)` pairs in a fixed order, skipping absent fields.
    pub fn entries(&self) -> Vec<(&'static str, T)> {
        let mut out = vec![
            ("rho_sq_oracle", self.rho_sq_oracle),
            ("rho1", self.rho1),
            ("rho1_sharp", self.rho1_sharp),
        ];
        if let Some(v) = self.rho2 {
            out.push(("rho2", v));
        }
        if let Some(v) = self.meany {
            out.push(("meany", v));
        }
        out.push(("rka_step", self.rka_step));
        if let Some(v) = self.ref24 {
            out.push(("ref24", v));
        }
        out.push(("ref26", self.ref26));
        out.push(("lambda", self.lambda));
        out.push(("m", count(self.m)));
        out.push(("n", count(self.n)));
        out
    }

    /// Violations of `factor ∈ [0, 1]` and `oracle ≤ rho1_sharp ≤ rho1`,
    /// allowing `slack` on every comparison.
    pub fn violations(&self, slack: T) -> Vec<String> {
        let mut v = Vec::new();
        for (name, x) in self.entries() {
            if matches!(name, "lambda" | "m" | "n") {
                continue;
            }
            if !(x >= -slack && x <= T::one() + slack) {
                v.push(format!("{name} = {x} outside [0, 1]"));
            }
        }
        if !(self.rho_sq_oracle <= self.rho1_sharp + slack) {
            v.push(format!(
                "oracle {} > rho1_sharp {}",
                self.rho_sq_oracle, self.rho1_sharp
            ));
        }
        if !(self.rho1_sharp <= self.rho1 + slack) {
            v.push(format!(
                "rho1_sharp {} > rho1 {}",
                self.rho1_sharp, self.rho1
            ));
        }
        v
    }
}

fn check_normalized<T: Scalar>(b: &DenseMatrix<T>) -> Result<()> {
    for (row, r) in b.row_iter().enumerate() {
        let norm = norm2(r);
        if (norm - T::one()).abs() > T::tol(NORMALIZED_ROW_TOL) {
            return Err(BoundError::NotNormalized {
                row,
                norm: norm.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Evaluates every bound on a row-normalized, full-column-rank `B`.
pub fn full_report<T: Scalar>(b: &DenseMatrix<T>, lambda: T) -> Result<BoundReport<T>> {
    check_lambda_closed(lambda)?;
    check_normalized(b)?;
    let (m, n) = b.shape();
    let svd = svd_values(b)?;
    let p = pinv_norm(b)?;
    let frob_sq = b.frobenius_sq();
    let spec_sq = svd.largest() * svd.largest();

    let rho2 = match bound_corollary2(b, lambda, &default_partition(m, n)?) {
        Ok(v) => Some(v),
        Err(BoundError::BlockRankDeficient(_)) => None,
        Err(e) => return Err(e),
    };
    let meany = if m == n { Some(bound_meany(b)?) } else { None };
    let ref24 = if lambda < T::lit(2.0) {
        Some(bound_ref24(p, m, lambda)?)
    } else {
        None
    };

    Ok(BoundReport {
        rho_sq_oracle: true_contraction(b, lambda)?,
        rho1: bound_theorem1(p, m, lambda, false)?,
        rho1_sharp: bound_theorem1(p, m, lambda, true)?,
        rho2,
        meany,
        rka_step: bound_rka(frob_sq, p, 1)?,
        ref24,
        ref26: bound_ref26(spec_sq, p, m)?,
        lambda,
        m,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn true_contraction_examples() {
        let i2 = DenseMatrix::<f64>::identity(2);
        assert_eq!(true_contraction(&i2, 1.0).unwrap(), 0.0);
        let one = DenseMatrix::from_rows(&[[1.0]]).unwrap();
        assert_eq!(true_contraction(&one, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn theorem1_examples() {
        assert!(close(
            bound_theorem1(1.0, 2, 1.0, false).unwrap(),
            5.0 / 6.0,
            1e-15
        ));
        assert!(close(
            bound_theorem1(1.0, 2, 1.0, true).unwrap(),
            0.75,
            1e-15
        ));
        assert_eq!(bound_theorem1(1.3, 17, 2.0, false).unwrap(), 1.0);
        assert_eq!(bound_theorem1(1.3, 17, 2.0, true).unwrap(), 1.0);
        for bad in [0.0, -0.5, 2.0001, f64::NAN] {
            assert!(matches!(
                bound_theorem1(1.0, 2, bad, false),
                Err(BoundError::Domain(_))
            ));
        }
        assert!(bound_theorem1(0.0, 2, 1.0, false).is_err());
        assert!(bound_theorem1(1.0, 0, 1.0, false).is_err());
    }

    #[test]
    fn corollary1_examples() {
        assert!(close(bound_corollary1(1.0, 2).unwrap(), 0.875, 1e-15));
        assert!(close(
            bound_corollary1(2.0, 30).unwrap(),
            1.0 - 1.0 / 7200.0,
            1e-15
        ));
        assert!(bound_corollary1(1.0, 1).is_err());
        for m in 2..=100 {
            for p in [0.5, 1.0, 3.0] {
                let c1 = bound_corollary1(p, m).unwrap();
                let t1 = bound_theorem1(p, m, 1.0, true).unwrap();
                assert!(c1 >= t1, "m = {m}");
            }
        }
    }

    #[test]
    #[allow(clippy::single_range_in_vec_init)]
    fn partition_examples() {
        let p = default_partition(30, 3).unwrap();
        assert_eq!(p.len(), 10);
        assert!(p.blocks().iter().all(|b| b.len() == 3));
        assert_eq!(
            default_partition(7, 3).unwrap().blocks(),
            &[0..3, 3..6, 6..7]
        );
        assert_eq!(default_partition(4, 4).unwrap().blocks(), &[0..4]);
        assert!(default_partition(2, 3).is_err());
        assert!(default_partition(2, 0).is_err());
        assert!(Partition::new(vec![0..2, 3..4], 4).is_err());
        assert!(Partition::new(vec![0..2, 2..2, 2..4], 4).is_err());
        assert!(Partition::new(vec![0..2], 4).is_err());
    }

    #[test]
    #[allow(clippy::single_range_in_vec_init)]
    fn corollary2_examples() {
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let part = default_partition(4, 2).unwrap();
        assert!(close(
            bound_corollary2(&b, 1.0, &part).unwrap(),
            0.5625,
            1e-15
        ));

        // single block degenerates to the sharp single-matrix bound
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [h, h], [0.0, 1.0]]).unwrap();
        let whole = Partition::new(vec![0..3], 3).unwrap();
        let p = pinv_norm(&b).unwrap();
        for lambda in [0.3, 1.0, 1.6] {
            let c2 = bound_corollary2(&b, lambda, &whole).unwrap();
            assert!(close(
                c2,
                bound_theorem1(p, 3, lambda, true).unwrap(),
                1e-15
            ));
        }
    }

    #[test]
    fn corollary2_rank_deficient_block() {
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]]).unwrap();
        let part = default_partition(4, 2).unwrap();
        assert_eq!(
            bound_corollary2(&b, 1.0, &part),
            Err(BoundError::BlockRankDeficient(1))
        );
        // remainder block shorter than n cannot have rank n
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let part = default_partition(3, 2).unwrap();
        assert_eq!(
            bound_corollary2(&b, 1.0, &part),
            Err(BoundError::BlockRankDeficient(1))
        );
    }

    #[test]
    fn meany_examples() {
        assert_eq!(bound_meany(&DenseMatrix::<f64>::identity(2)).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [h, h]]).unwrap();
        assert!(close(bound_meany(&b).unwrap(), 0.5, 1e-14));
        assert!(close(true_contraction(&b, 1.0).unwrap(), 0.5, 1e-14));
        let r = DenseMatrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(bound_meany(&r).unwrap(), 1.0);
        let tall = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            bound_meany(&tall),
            Err(BoundError::NotSquare { rows: 3, cols: 2 })
        );
    }

    #[test]
    fn lemma1_examples() {
        assert!(close(
            lemma1_threshold::<f64>(3).unwrap(),
            1.0 / 54.0,
            1e-16
        ));
        let sq = [2.98, 1.0 / 60.0, 3.0 - 2.98 - 1.0 / 60.0];
        let sigma: Vec<f64> = sq.iter().map(|x: &f64| x.sqrt()).collect();
        let out = lemma1_check(&sigma, 3).unwrap();
        assert!(out.hypothesis && out.conclusion);

        let sigma: Vec<f64> = [1.4f64, 1.4, 0.2].iter().map(|x| x.sqrt()).collect();
        assert_eq!(
            lemma1_check(&sigma, 3).unwrap(),
            Lemma1Outcome {
                hypothesis: false,
                conclusion: false
            }
        );

        let sigma = [3f64.sqrt(), 0.0, 0.0];
        let out = lemma1_check(&sigma, 3).unwrap();
        assert!(out.hypothesis && out.conclusion);
    }

    #[test]
    fn lemma1_domain() {
        assert!(lemma1_check(&[1.0, 1.0], 2).is_err());
        assert!(lemma1_check(&[1.0, 1.0, 1.0], 4).is_err());
        assert!(lemma1_check(&[1.0, 1.0, 0.5], 3).is_err());
        assert!(lemma1_check(&[0.5, 1.0, 1.0f64.sqrt()], 3).is_err());
    }

    #[test]
    fn rka_examples() {
        let v = bound_rka(30.0, 2.0, 30).unwrap();
        assert!(close(v, (1.0f64 - 1.0 / 120.0).powi(30), 1e-15));
        assert!(close(v, 0.778, 1e-3));
        assert_eq!(bound_rka(30.0, 2.0, 0).unwrap(), 1.0);
        assert_eq!(bound_rka(1.0, 1.0, 5).unwrap(), 0.0);
        assert_eq!(bound_rka(4.0, 0.5, 1).unwrap(), 0.0);
        assert!(bound_rka(0.5, 1.0, 1).is_err());
    }

    #[test]
    fn ref24_examples() {
        assert_eq!(bound_ref24(1.0, 1, 1.0).unwrap(), 0.0);
        assert!(close(bound_ref24(1.0, 10, 1.0).unwrap(), 0.99, 1e-15));
        let lam = optimal_lambda_ref24(10).unwrap();
        let v = bound_ref24(0.5, 10, lam).unwrap();
        let closed = 1.0 - 2.0 / (10.0 * (37f64.sqrt() + 1.0) * 0.25);
        assert!(close(v, closed, 1e-14));
        assert!(close(v, 0.887050, 1e-6));
        assert!(bound_ref24(1.0, 10, 2.0).is_err());
    }

    #[test]
    fn optimal_lambda_examples() {
        assert!(close(
            optimal_lambda_ref24(2).unwrap(),
            (5f64.sqrt() - 1.0) / 2.0,
            1e-15
        ));
        assert!(close(
            optimal_lambda_ref24::<f64>(10).unwrap(),
            0.282376,
            1e-6
        ));
        assert!(optimal_lambda_ref24::<f64>(1).is_err());
        assert!(close(
            optimal_lambda_thm1::<f64>(1).unwrap(),
            3f64.sqrt() - 1.0,
            1e-15
        ));
        assert!(close(
            optimal_lambda_thm1::<f64>(10).unwrap(),
            0.131774,
            1e-6
        ));
        for m in 1..50 {
            let l: f64 = optimal_lambda_thm1(m).unwrap();
            let mf = m as f64;
            assert!((l * l * mf * mf + 2.0 * l - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ref26_examples() {
        assert!(close(bound_ref26(4.0, 1.0, 30).unwrap(), 0.95, 1e-15));
        assert!(close(
            bound_ref26(3.0, 2.0, 1).unwrap(),
            1.0 - 1.0 / 12.0,
            1e-15
        ));
        // m = 16: ⌊log₂ 32⌋ = 5
        assert!(close(bound_ref26(1.0, 1.0, 16).unwrap(), 0.8, 1e-15));
        assert!(close(bound_ref26(1.0, 1.0, 15).unwrap(), 0.75, 1e-15));
        assert!(bound_ref26(0.5, 1.0, 4).is_err());
    }

    #[test]
    fn report_identity() {
        let r = full_report(&DenseMatrix::<f64>::identity(2), 1.0).unwrap();
        assert_eq!(r.rho_sq_oracle, 0.0);
        assert!(close(r.rho1, 5.0 / 6.0, 1e-15));
        assert!(close(r.rho1_sharp, 0.75, 1e-15));
        assert_eq!(r.meany, Some(0.0));
        assert!(r.violations(1e-12).is_empty());
        assert_eq!(r.entries().len(), 11);
    }

    #[test]
    fn report_at_lambda_two() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [h, h], [0.0, 1.0]]).unwrap();
        let r = full_report(&b, 2.0).unwrap();
        assert_eq!(r.rho1, 1.0);
        assert_eq!(r.rho1_sharp, 1.0);
        assert_eq!(r.ref24, None);
        assert!(close(r.rho_sq_oracle, 1.0, 1e-12));
        assert!(r.violations(1e-10).is_empty(), "{:?}", r.violations(1e-10));
    }

    #[test]
    fn report_rejects_unnormalized() {
        let a = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            full_report(&a, 1.0),
            Err(BoundError::NotNormalized { row: 0, .. })
        ));
    }

    #[test]
    fn injected_violation_is_reported() {
        let mut r = full_report(&DenseMatrix::<f64>::identity(2), 1.0).unwrap();
        r.rho1_sharp = -0.1;
        assert_eq!(r.violations(1e-12).len(), 2);
    }
}
