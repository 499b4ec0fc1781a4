//! Dense real matrices, singular values and the sweep-product machinery.
//!
//! Everything here is a pure function of its inputs. Row indices are
//! zero-based throughout.

use std::ops::{Index, IndexMut, Range};

use thiserror::Error;

use crate::scalar::{dot, norm2, Scalar};

/// Rows whose Euclidean norm falls below this are treated as zero.
pub const ZERO_ROW_THRESHOLD: f64 = 1e-300;

/// Relative factor in the numerical-rank test `σ_min ≤ RANK_RTOL · σ₁ · max(rows, cols)`.
pub const RANK_RTOL: f64 = 1e-10;

/// Sweep cap for the one-sided Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("data length {len} does not match {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("row {0} has zero norm")]
    ZeroRow(usize),
    #[error("one-sided Jacobi did not converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("matrix is rank deficient: sigma_min = {sigma_min:e}, threshold = {threshold:e}")]
    RankDeficient { sigma_min: f64, threshold: f64 },
    #[error("expected rows >= cols, got {rows}x{cols}")]
    WideMatrix { rows: usize, cols: usize },
    #[error("row index {index} out of range for {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl LinalgError {
    /// Variant name, used by the command line when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            LinalgError::ShapeMismatch { .. } => "ShapeMismatch",
            LinalgError::NonFinite { .. } => "NonFinite",
            LinalgError::ZeroRow(_) => "ZeroRow",
            LinalgError::ConvergenceFailure { .. } => "ConvergenceFailure",
            LinalgError::RankDeficient { .. } => "RankDeficient",
            LinalgError::WideMatrix { .. } => "WideMatrix",
            LinalgError::IndexOutOfRange { .. } => "IndexOutOfRange",
            LinalgError::DimensionMismatch(_) => "DimensionMismatch",
        }
    }
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

/// Row-major dense real matrix. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Self::new(n, n, m.data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// `‖M‖_F²`.
    pub fn frobenius_sq(&self) -> T {
        self.data.iter().map(|&x| x * x).sum()
    }

    /// Sub-matrix made of the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            if i >= self.rows {
                return Err(LinalgError::IndexOutOfRange {
                    index: i,
                    rows: self.rows,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Ok(Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        })
    }

    pub fn row_block(&self, range: Range<usize>) -> Result<Self> {
        let idx: Vec<usize> = range.collect();
        self.select_rows(&idx)
    }

    /// Largest absolute entrywise difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.shape() != other.shape() {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())),
        )
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Singular values, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult<T> {
    pub singular_values: Vec<T>,
}

impl<T: Scalar> SvdResult<T> {
    pub fn largest(&self) -> T {
        self.singular_values
            .first()
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn smallest(&self) -> T {
        self.singular_values.last().copied().unwrap_or_else(T::zero)
    }
}

/// Scales every row to unit Euclidean norm.
pub fn normalize_rows<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let threshold = T::lit(ZERO_ROW_THRESHOLD).max(T::min_positive_value());
    let mut out = a.clone();
    for i in 0..a.rows {
        let norm = norm2(a.row(i));
        if norm < threshold {
            return Err(LinalgError::ZeroRow(i));
        }
        for x in &mut out.data[i * a.cols..(i + 1) * a.cols] {
            *x /= norm;
        }
    }
    Ok(out)
}

/// Singular values by one-sided (Hestenes) Jacobi on the thin dimension.
///
/// The `min(rows, cols)` vectors of length `max(rows, cols)` are rotated
/// pairwise until mutually orthogonal; their norms are the singular values.
pub fn svd_values<T: Scalar>(m: &DenseMatrix<T>) -> Result<SvdResult<T>> {
    let (rows, cols) = m.shape();
    let mut vecs: Vec<Vec<T>> = if rows >= cols {
        (0..cols)
            .map(|j| (0..rows).map(|i| m[(i, j)]).collect())
            .collect()
    } else {
        m.row_iter().map(<[T]>::to_vec).collect()
    };
    let len = rows.max(cols);
    let tol = T::epsilon() * T::lit(len.max(1) as f64);

    let k = vecs.len();
    let mut converged = k < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (head, tail) = vecs.split_at_mut(q);
                let (up, uq) = (&mut head[p], &mut tail[0]);
                let alpha = dot(up, up);
                let beta = dot(uq, uq);
                let gamma = dot(up, uq);
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                for (x, y) in up.iter_mut().zip(uq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(LinalgError::ConvergenceFailure {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut singular_values: Vec<T> = vecs.iter().map(|v| norm2(v)).collect();
    singular_values.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(SvdResult { singular_values })
}

/// `‖M‖₂ = σ₁(M)`.
pub fn spectral_norm<T: Scalar>(m: &DenseMatrix<T>) -> Result<T> {
    Ok(svd_values(m)?.largest())
}

/// `‖B†‖₂ = 1/σ_min(B)` for a tall full-column-rank matrix.
pub fn pinv_norm<T: Scalar>(b: &DenseMatrix<T>) -> Result<T> {
    let (rows, cols) = b.shape();
    if rows < cols {
        return Err(LinalgError::WideMatrix { rows, cols });
    }
    let svd = svd_values(b)?;
    let (smax, smin) = (svd.largest(), svd.smallest());
    let threshold = T::lit(RANK_RTOL) * smax * T::lit(rows.max(cols) as f64);
    if smin <= threshold || smax == T::zero() {
        return Err(LinalgError::RankDeficient {
            sigma_min: smin.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    Ok(T::one() / smin)
}

/// Product of `(I − λ bᵢbᵢᵀ)` over `row_order`, later rows multiplying on the left.
///
/// With `row_order = 0..m` this is the full sweep matrix; with a block of
/// rows it is that block's sub-sweep. Built by rank-1 updates
/// `G ← G − λ bᵢ(bᵢᵀG)`, so the cost is `O(len · n²)`.
pub fn sweep_matrix<T: Scalar>(
    b: &DenseMatrix<T>,
    lambda: T,
    row_order: &[usize],
) -> Result<DenseMatrix<T>> {
    let n = b.cols;
    let mut g = DenseMatrix::identity(n);
    let mut w = vec![T::zero(); n];
    for &i in row_order {
        if i >= b.rows {
            return Err(LinalgError::IndexOutOfRange {
                index: i,
                rows: b.rows,
            });
        }
        let bi = b.row(i);
        w.iter_mut().for_each(|x| *x = T::zero());
        for (k, &bk) in bi.iter().enumerate() {
            for (wj, &gkj) in w.iter_mut().zip(g.row(k)) {
                *wj += bk * gkj;
            }
        }
        for (k, &bk) in bi.iter().enumerate() {
            let scale = lambda * bk;
            for (gkj, &wj) in g.data[k * n..(k + 1) * n].iter_mut().zip(&w) {
                *gkj -= scale * wj;
            }
        }
    }
    Ok(g)
}

/// Power iteration on `MᵀM`: returns `(‖Mv‖, v)` for the final unit iterate `v`.
///
/// `start` must be nonzero. Used as an independent estimate of `σ₁` and to
/// obtain an approximate top right-singular vector.
pub fn dominant_right_singular_pair<T: Scalar>(
    m: &DenseMatrix<T>,
    start: &[T],
    iterations: usize,
) -> Result<(T, Vec<T>)> {
    if start.len() != m.cols {
        return Err(LinalgError::DimensionMismatch(format!(
            "start vector of length {} for {} columns",
            start.len(),
            m.cols
        )));
    }
    let mut v = start.to_vec();
    let nv = norm2(&v);
    if nv == T::zero() {
        return Err(LinalgError::DimensionMismatch("zero start vector".into()));
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let mt = m.transpose();
    for _ in 0..iterations {
        let w = mt.matvec(&m.matvec(&v)?)?;
        let nw = norm2(&w);
        if nw == T::zero() {
            break;
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    let sigma = norm2(&m.matvec(&v)?);
    Ok((sigma, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constructor_checks_shape_and_finiteness() {
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0; 3]),
            Err(LinalgError::ShapeMismatch { .. })
        ));
        assert_eq!(
            DenseMatrix::new(2, 2, vec![1.0, 2.0, f64::NAN, 0.0]),
            Err(LinalgError::NonFinite { row: 1, col: 0 })
        );
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let b = normalize_rows(&DenseMatrix::from_rows(&[[3.0, 4.0]]).unwrap()).unwrap();
        assert!(close(b[(0, 0)], 0.6, 1e-15) && close(b[(0, 1)], 0.8, 1e-15));

        let i2 = DenseMatrix::<f64>::identity(2);
        assert_eq!(normalize_rows(&i2).unwrap(), i2);

        let b =
            normalize_rows(&DenseMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0]]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for x in b.as_slice() {
            assert!(close(*x, h, 1e-15));
        }
    }

    #[test]
    fn normalize_rejects_zero_row() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert_eq!(normalize_rows(&a), Err(LinalgError::ZeroRow(1)));
        let a = DenseMatrix::from_rows(&[[1e-301, 0.0]]).unwrap();
        assert_eq!(normalize_rows(&a), Err(LinalgError::ZeroRow(0)));
        // tiny but above threshold is fine
        let a = DenseMatrix::from_rows(&[[3e-200, 4e-200]]).unwrap();
        let b = normalize_rows(&a).unwrap();
        assert!(close(b[(0, 1)], 0.8, 1e-15));
    }

    #[test]
    fn svd_small_examples() {
        let d = DenseMatrix::from_diag(&[3.0, 1.0]).unwrap();
        assert_eq!(svd_values(&d).unwrap().singular_values, vec![3.0, 1.0]);
        let d = DenseMatrix::from_diag(&[1.0, 3.0]).unwrap();
        assert_eq!(svd_values(&d).unwrap().singular_values, vec![3.0, 1.0]);
        let z = DenseMatrix::<f64>::zeros(2, 2);
        assert_eq!(svd_values(&z).unwrap().singular_values, vec![0.0, 0.0]);
    }

    #[test]
    fn svd_wide_matches_tall() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.5]]).unwrap();
        let s1 = svd_values(&a).unwrap().singular_values;
        let s2 = svd_values(&a.transpose()).unwrap().singular_values;
        assert_eq!(s1.len(), 2);
        for (x, y) in s1.iter().zip(&s2) {
            assert!(close(*x, *y, 1e-12));
        }
        // σ₁² + σ₂² = ‖A‖_F²
        let fro: f64 = s1.iter().map(|s| s * s).sum();
        assert!(close(fro, a.frobenius_sq(), 1e-12));
    }

    #[test]
    fn svd_works_in_single_precision() {
        let d = DenseMatrix::<f32>::from_rows(&[[2.0, 0.0], [0.0, 0.5], [0.0, 0.0]]).unwrap();
        let s = svd_values(&d).unwrap().singular_values;
        assert_eq!(s, vec![2.0f32, 0.5]);
        assert_eq!(pinv_norm(&d).unwrap(), 2.0f32);
    }

    #[test]
    fn spectral_norm_examples() {
        assert!(close(
            spectral_norm(&DenseMatrix::<f64>::identity(3)).unwrap(),
            1.0,
            1e-15
        ));
        let d = DenseMatrix::from_diag(&[3.0, 1.0]).unwrap();
        assert_eq!(spectral_norm(&d).unwrap(), 3.0);
        let mm = sweep_matrix(&DenseMatrix::<f64>::identity(2), 1.0, &[0, 1]).unwrap();
        assert_eq!(spectral_norm(&mm).unwrap(), 0.0);
    }

    #[test]
    fn pinv_norm_examples() {
        assert_eq!(pinv_norm(&DenseMatrix::<f64>::identity(2)).unwrap(), 1.0);
        let d = DenseMatrix::from_diag(&[2.0, 0.5]).unwrap();
        assert_eq!(pinv_norm(&d).unwrap(), 2.0);
        let r = DenseMatrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(
            pinv_norm(&r),
            Err(LinalgError::RankDeficient { .. })
        ));
        let w = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(pinv_norm(&w), Err(LinalgError::WideMatrix { .. })));
    }

    #[test]
    fn sweep_matrix_examples() {
        let i2 = DenseMatrix::<f64>::identity(2);
        let z = sweep_matrix(&i2, 1.0, &[0, 1]).unwrap();
        assert_eq!(z, DenseMatrix::zeros(2, 2));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [h, h], [0.0, 1.0]]).unwrap();
        let g = sweep_matrix(&b, 1e-12, &[0, 1, 2]).unwrap();
        assert!(g.max_abs_diff(&DenseMatrix::identity(2)).unwrap() <= 1e-10);

        assert_eq!(
            sweep_matrix(&b, 1.0, &[0, 3]),
            Err(LinalgError::IndexOutOfRange { index: 3, rows: 3 })
        );
        // empty order is the identity
        assert_eq!(
            sweep_matrix(&b, 1.0, &[]).unwrap(),
            DenseMatrix::identity(2)
        );
    }

    #[test]
    fn sweep_matrix_order_matters() {
        // later rows multiply on the left: (I − P₂)(I − P₁) applied to e₂
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [h, h]]).unwrap();
        let g = sweep_matrix(&b, 1.0, &[0, 1]).unwrap();
        // (I − P₁) kills e₁ component; then project onto x₁ + x₂ = 0
        let v = g.matvec(&[0.0, 1.0]).unwrap();
        assert!(close(v[0], -0.5, 1e-15) && close(v[1], 0.5, 1e-15));
    }

    #[test]
    fn power_iteration_on_diagonal() {
        let d = DenseMatrix::from_diag(&[3.0, 1.0]).unwrap();
        let (s, v) = dominant_right_singular_pair(&d, &[1.0, 1.0], 200).unwrap();
        assert!(close(s, 3.0, 1e-12));
        assert!(close(v[0].abs(), 1.0, 1e-12));
        assert!(dominant_right_singular_pair(&d, &[0.0, 0.0], 10).is_err());
    }
}
