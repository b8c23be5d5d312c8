//! Dense kernels sized for desk-scale problems (dimensions up to a few
//! hundred). The two factorizations the library needs — a thin Householder QR
//! for orthonormalizing direction frames and a one-sided Jacobi SVD for
//! conditioning synthetic design matrices — are written out here; at this
//! scale they are a page of code each and keep the crate free of a BLAS
//! binding.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from a row-major closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Contiguous view of row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy of column `j` (rows are the contiguous axis).
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self * other`, shapes checked.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for j in 0..other.cols {
                    out_row[j] += a * orow[j];
                }
            }
        }
        out
    }

    /// `self * x` for a vector `x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn has_nan(&self) -> bool {
        self.data.iter().any(|v| v.is_nan())
    }

    /// Multiply column `j` by `s` in place.
    pub fn scale_col(&mut self, j: usize, s: f64) {
        for i in 0..self.rows {
            self[(i, j)] *= s;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `out += s * a`
#[inline]
pub fn axpy(s: f64, a: &[f64], out: &mut [f64]) {
    debug_assert_eq!(a.len(), out.len());
    for (o, x) in out.iter_mut().zip(a) {
        *o += s * x;
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive. `n == 1` yields `[lo]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1, "linspace needs at least one point");
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

/// Relative threshold below which a diagonal entry of R counts as rank
/// deficiency.
const QR_RANK_TOL: f64 = 1e-12;

/// Thin Householder QR of an `n x k` matrix with `n >= k`.
///
/// Returns `(Q, R)` with `Q` of shape `n x k` having orthonormal columns and
/// `R` upper triangular `k x k` such that `Q * R` reconstructs the input.
/// Rank deficiency (a diagonal of `R` smaller than `1e-12` times the input's
/// Frobenius norm) is reported as a degenerate-input error rather than
/// returning a meaningless basis.
pub fn householder_qr(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let (n, k) = (m.rows(), m.cols());
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "thin QR needs rows >= cols, got {n}x{k}"
        )));
    }
    if m.has_nan() {
        return Err(Error::Degenerate("QR input contains NaN".into()));
    }
    let scale = m.frobenius_norm();

    // Work in a copy; Householder vectors are kept in `vs`, reflection j
    // maps A[j.., j..] -> (I - 2 v v^T / v^T v) A[j.., j..].
    let mut a = m.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
        let norm = norm2(&v);
        // Reflect onto -sign(v0) * ||v|| * e1 for numerical stability.
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = norm2(&v);
        if vnorm > 0.0 {
            for x in &mut v {
                *x /= vnorm;
            }
            apply_reflector(&mut a, &v, j, j);
        }
        vs.push(v);
    }

    let mut r = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r[(i, j)] = a[(i, j)];
        }
    }
    for j in 0..k {
        if r[(j, j)].abs() < QR_RANK_TOL * scale {
            return Err(Error::Degenerate(format!(
                "rank-deficient QR input: |R[{j},{j}]| = {:.3e} below {:.3e}",
                r[(j, j)].abs(),
                QR_RANK_TOL * scale
            )));
        }
    }

    // Accumulate the thin Q by applying the reflectors, last to first, to the
    // leading k columns of the identity.
    let mut q = Matrix::zeros(n, k);
    for j in 0..k {
        q[(j, j)] = 1.0;
    }
    for j in (0..k).rev() {
        if norm2(&vs[j]) > 0.0 {
            apply_reflector(&mut q, &vs[j], j, 0);
        }
    }
    Ok((q, r))
}

/// Apply `I - 2 v v^T` to the block of `a` starting at row `row0`, columns
/// `col0..`. `v` spans rows `row0..a.rows()`.
fn apply_reflector(a: &mut Matrix, v: &[f64], row0: usize, col0: usize) {
    let (n, c) = (a.rows(), a.cols());
    for j in col0..c {
        let mut s = 0.0;
        for i in row0..n {
            s += v[i - row0] * a[(i, j)];
        }
        let s2 = 2.0 * s;
        for i in row0..n {
            a[(i, j)] -= s2 * v[i - row0];
        }
    }
}

const SVD_MAX_SWEEPS: usize = 60;
const SVD_TOL: f64 = 1e-14;

/// One-sided Jacobi SVD of an `n x k` matrix with `n >= k`.
///
/// Returns `(u, sigma, v)` with singular values sorted descending,
/// `u`: `n x k` orthonormal columns, `v`: `k x k` orthogonal, and
/// `u * diag(sigma) * v^T` reconstructing the input. Exactly zero singular
/// values (up to the sweep tolerance) are rejected as degenerate since a
/// left singular basis cannot be recovered from them by this method.
pub fn jacobi_svd(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let (n, k) = (m.rows(), m.cols());
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "one-sided Jacobi SVD needs rows >= cols, got {n}x{k}"
        )));
    }
    if m.has_nan() {
        return Err(Error::Degenerate("SVD input contains NaN".into()));
    }

    let mut b = m.clone();
    let mut v = Matrix::identity(k);

    // Rotate column pairs until all are mutually orthogonal.
    let mut converged = false;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let (x, y) = (b[(i, p)], b[(i, q)]);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= SVD_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (x, y) = (b[(i, p)], b[(i, q)]);
                    b[(i, p)] = c * x - s * y;
                    b[(i, q)] = s * x + c * y;
                }
                for i in 0..k {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Degenerate(format!(
            "Jacobi SVD did not converge in {SVD_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..k).collect();
    let sigmas: Vec<f64> = (0..k).map(|j| norm2(&b.col(j))).collect();
    order.sort_by(|&a, &bb| sigmas[bb].total_cmp(&sigmas[a]));

    let scale = m.frobenius_norm().max(1.0);
    let mut u = Matrix::zeros(n, k);
    let mut vs = Matrix::zeros(k, k);
    let mut sigma = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigmas[src];
        if s <= SVD_TOL * scale {
            return Err(Error::Degenerate(format!(
                "numerically zero singular value ({s:.3e}); input is rank deficient"
            )));
        }
        sigma.push(s);
        for i in 0..n {
            u[(i, dst)] = b[(i, src)] / s;
        }
        for i in 0..k {
            vs[(i, dst)] = v[(i, src)];
        }
    }
    Ok((u, sigma, vs))
}
