//! Small dense linear algebra: vectors as slices, a row-major matrix type,
//! and Householder QR (full factorization and least-squares solves).
//!
//! The dimensions in this crate are tiny (d ≤ 1000, and the random matrices
//! are 20×5), so clarity beats blocking/BLAS here.

use crate::error::TvError;
use crate::scalar::Scalar;
use crate::Result;

/// Euclidean inner product.
#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Euclidean distance between two vectors.
#[inline]
pub fn dist2<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<S>()
        .sqrt()
}

/// `y += alpha * x`.
#[inline]
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out = a - b`.
#[inline]
pub fn sub_into<S: Scalar>(a: &[S], b: &[S], out: &mut [S]) {
    debug_assert_eq!(a.len(), b.len());
    debug_assert_eq!(a.len(), out.len());
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = x - y;
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace<S: Scalar>(lo: S, hi: S, n: usize) -> Vec<S> {
    assert!(n >= 1);
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / crate::fp::<S>((n - 1) as f64);
    (0..n)
        .map(|i| lo + step * crate::fp::<S>(i as f64))
        .collect()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        DenseMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `out = self * x`.
    pub fn matvec_into(&self, x: &[S], out: &mut [S]) {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        assert_eq!(out.len(), self.rows, "matvec output dimension mismatch");
        for i in 0..self.rows {
            out[i] = dot(self.row(i), x);
        }
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    /// `out = selfᵀ * x`.
    pub fn t_matvec_into(&self, x: &[S], out: &mut [S]) {
        assert_eq!(x.len(), self.rows, "t_matvec dimension mismatch");
        assert_eq!(out.len(), self.cols, "t_matvec output dimension mismatch");
        for o in out.iter_mut() {
            *o = S::zero();
        }
        for i in 0..self.rows {
            let xi = x[i];
            for (o, &aij) in out.iter_mut().zip(self.row(i)) {
                *o += aij * xi;
            }
        }
    }

    pub fn t_matvec(&self, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.cols];
        self.t_matvec_into(x, &mut out);
        out
    }

    /// Plain matrix product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix<S> {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Scale column `j` by `s` in place.
    pub fn scale_col(&mut self, j: usize, s: S) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)] * s;
        }
    }

    /// Largest singular value, via power iteration on `AᵀA`.
    ///
    /// Deterministic start vector; the matrices here are tiny and
    /// well-separated, so a fixed iteration budget is plenty.
    pub fn spectral_norm(&self) -> S {
        let n = self.cols;
        let mut v = vec![S::zero(); n];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = crate::fp::<S>(1.0 + (i as f64) * 0.37);
        }
        let mut av = vec![S::zero(); self.rows];
        let mut atav = vec![S::zero(); n];
        let mut lambda = S::zero();
        for _ in 0..200 {
            let nv = norm2(&v);
            if nv == S::zero() {
                return S::zero();
            }
            for vi in v.iter_mut() {
                *vi = *vi / nv;
            }
            self.matvec_into(&v, &mut av);
            self.t_matvec_into(&av, &mut atav);
            lambda = dot(&v, &atav);
            v.copy_from_slice(&atav);
        }
        lambda.max(S::zero()).sqrt()
    }

    /// Full Householder QR: returns `(Q, R)` with `Q` square orthogonal
    /// (rows×rows) and `R` upper triangular (rows×cols); `self = Q·R`.
    pub fn qr_full(&self) -> (DenseMatrix<S>, DenseMatrix<S>) {
        let m = self.rows;
        let n = self.cols;
        let mut r = self.clone();
        let mut q = DenseMatrix::identity(m);
        let mut v = vec![S::zero(); m];
        for k in 0..n.min(m.saturating_sub(1)) {
            let mut normx = S::zero();
            for i in k..m {
                normx += r[(i, k)] * r[(i, k)];
            }
            let normx = normx.sqrt();
            if normx == S::zero() {
                continue;
            }
            let x0 = r[(k, k)];
            let alpha = if x0 >= S::zero() { -normx } else { normx };
            for i in k..m {
                v[i] = r[(i, k)];
            }
            v[k] -= alpha;
            let vtv: S = (k..m).map(|i| v[i] * v[i]).sum();
            if vtv == S::zero() {
                continue;
            }
            let two = crate::fp::<S>(2.0);
            // R <- H R on the trailing block
            for j in k..n {
                let mut proj = S::zero();
                for i in k..m {
                    proj += v[i] * r[(i, j)];
                }
                let coeff = two * proj / vtv;
                for i in k..m {
                    r[(i, j)] = r[(i, j)] - coeff * v[i];
                }
            }
            // Q <- Q H
            for i in 0..m {
                let mut proj = S::zero();
                for j in k..m {
                    proj += q[(i, j)] * v[j];
                }
                let coeff = two * proj / vtv;
                for j in k..m {
                    q[(i, j)] = q[(i, j)] - coeff * v[j];
                }
            }
        }
        // Zero the below-diagonal residue left by rounding.
        for j in 0..n {
            for i in (j + 1)..m {
                r[(i, j)] = S::zero();
            }
        }
        (q, r)
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for DenseMatrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Precomputed QR factorization of a tall full-column-rank matrix for
/// repeated least-squares solves `argmin ‖Ax − b‖`.
#[derive(Debug, Clone)]
pub struct QrLstsq<S> {
    m: usize,
    n: usize,
    /// Householder vectors, vector `k` supported on indices `k..m`.
    reflectors: Vec<Vec<S>>,
    /// Upper-triangular factor, n×n.
    r: DenseMatrix<S>,
}

impl<S: Scalar> QrLstsq<S> {
    pub fn new(a: &DenseMatrix<S>) -> Result<Self> {
        let m = a.rows();
        let n = a.cols();
        if m < n {
            return Err(TvError::invalid(format!(
                "least-squares factor needs rows >= cols, got {m}x{n}"
            )));
        }
        let mut work = a.clone();
        let mut a_scale = S::zero();
        for j in 0..n {
            let col_norm: S = (0..m).map(|i| work[(i, j)] * work[(i, j)]).sum::<S>().sqrt();
            a_scale = a_scale.max(col_norm);
        }
        let mut reflectors = Vec::with_capacity(n);
        let two = crate::fp::<S>(2.0);
        for k in 0..n {
            let mut normx = S::zero();
            for i in k..m {
                normx += work[(i, k)] * work[(i, k)];
            }
            let normx = normx.sqrt();
            if normx == S::zero() {
                return Err(TvError::invalid(
                    "matrix is column-rank-deficient; least-squares factor undefined".to_string(),
                ));
            }
            let x0 = work[(k, k)];
            let alpha = if x0 >= S::zero() { -normx } else { normx };
            let mut v = vec![S::zero(); m];
            for i in k..m {
                v[i] = work[(i, k)];
            }
            v[k] -= alpha;
            let vtv: S = (k..m).map(|i| v[i] * v[i]).sum();
            if vtv > S::zero() {
                for j in k..n {
                    let mut proj = S::zero();
                    for i in k..m {
                        proj += v[i] * work[(i, j)];
                    }
                    let coeff = two * proj / vtv;
                    for i in k..m {
                        work[(i, j)] = work[(i, j)] - coeff * v[i];
                    }
                }
            }
            reflectors.push(v);
        }
        // Reject near-singular columns: a trailing pivot at rounding scale
        // means the columns are (numerically) linearly dependent.
        let pivot_tol = crate::fp::<S>(10.0 * m.max(n) as f64) * S::epsilon() * a_scale;
        for k in 0..n {
            if work[(k, k)].abs() <= pivot_tol {
                return Err(TvError::invalid(
                    "matrix is column-rank-deficient; least-squares factor undefined"
                        .to_string(),
                ));
            }
        }
        let mut r = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                r[(i, j)] = work[(i, j)];
            }
        }
        Ok(QrLstsq { m, n, reflectors, r })
    }

    /// Solve `argmin ‖Ax − b‖` for the factored `A`.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        assert_eq!(b.len(), self.m, "rhs dimension mismatch");
        let two = crate::fp::<S>(2.0);
        let mut c = b.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            let vtv: S = (k..self.m).map(|i| v[i] * v[i]).sum();
            if vtv == S::zero() {
                continue;
            }
            let mut proj = S::zero();
            for i in k..self.m {
                proj += v[i] * c[i];
            }
            let coeff = two * proj / vtv;
            for i in k..self.m {
                c[i] = c[i] - coeff * v[i];
            }
        }
        // Back-substitute R x = c[..n].
        let mut x = vec![S::zero(); self.n];
        for i in (0..self.n).rev() {
            let mut s = c[i];
            for j in (i + 1)..self.n {
                s -= self.r[(i, j)] * x[j];
            }
            x[i] = s / self.r[(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(vals: impl IntoIterator<Item = f64>) -> f64 {
        vals.into_iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    #[test]
    fn matvec_and_transpose() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
        assert_eq!(a.t_matvec(&[1.0, 1.0, 1.0]), vec![9.0, 12.0]);
        assert_eq!(a.transpose().matvec(&[1.0, 1.0, 1.0]), vec![9.0, 12.0]);
    }

    #[test]
    fn qr_reconstructs_and_is_orthogonal() {
        let a = DenseMatrix::from_rows(&[
            vec![2.0f64, -1.0, 0.5],
            vec![0.0, 3.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![-2.0, 0.5, 2.0],
        ]);
        let (q, r) = a.qr_full();
        let qr = q.matmul(&r);
        let mut err: f64 = 0.0;
        for i in 0..4 {
            for j in 0..3 {
                err = err.max((qr[(i, j)] - a[(i, j)]).abs());
            }
        }
        assert!(err < 1e-12, "QR reconstruction error {err}");
        let qtq = q.transpose().matmul(&q);
        let mut orth: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                orth = orth.max((qtq[(i, j)] - target).abs());
            }
        }
        assert!(orth < 1e-12, "orthogonality error {orth}");
    }

    #[test]
    fn lstsq_matches_exact_solution_on_consistent_system() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 2.0],
            vec![1.0, 1.0],
            vec![2.0, -1.0],
        ]);
        let x_true = vec![0.7, -1.3];
        let b = a.matvec(&x_true);
        let f = QrLstsq::new(&a).unwrap();
        let x = f.solve(&b);
        assert!(max_abs(x.iter().zip(&x_true).map(|(a, b)| a - b)) < 1e-12);
    }

    #[test]
    fn lstsq_normal_equations_residual_orthogonality() {
        // For the minimizer, Aᵀ(Ax − b) = 0.
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0],
            vec![-1.0, 0.5],
            vec![3.0, 1.0],
            vec![0.0, 1.0],
        ]);
        let b = vec![1.0, 2.0, -1.0, 0.5];
        let f = QrLstsq::new(&a).unwrap();
        let x = f.solve(&b);
        let mut res = a.matvec(&x);
        for (ri, bi) in res.iter_mut().zip(&b) {
            *ri -= *bi;
        }
        let grad = a.t_matvec(&res);
        assert!(max_abs(grad.iter().copied()) < 1e-12, "normal equations violated: {grad:?}");
    }

    #[test]
    fn rank_deficient_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]);
        assert!(QrLstsq::new(&a).is_err());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let mut a = DenseMatrix::zeros(3, 3);
        a[(0, 0)] = 0.5;
        a[(1, 1)] = -2.0;
        a[(2, 2)] = 1.0;
        assert!((a.spectral_norm() - 2.0f64).abs() < 1e-10);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.2f64, 1.0, 5);
        assert_eq!(v.len(), 5);
        assert!((v[0] - 0.2).abs() < 1e-15);
        assert!((v[4] - 1.0).abs() < 1e-15);
        assert!((v[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn vector_helpers() {
        let a = [3.0f64, 4.0];
        assert!((norm2(&a) - 5.0).abs() < 1e-15);
        let mut y = vec![1.0f64, 1.0];
        axpy(2.0, &[1.0, -1.0], &mut y);
        assert_eq!(y, vec![3.0, -1.0]);
        assert!((dist2(&[0.0f64, 0.0], &[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }
}
