//! Dense linear algebra over the scalar abstraction.
//!
//! The kernels here are deliberately plain: row-major dense storage,
//! partial-pivoting LU, Householder QR, symmetric tridiagonal
//! eigenvalues, and MINRES. They exist (instead of an external linear
//! algebra crate) because every routine must run unchanged in both the
//! `f64` and the extended-precision backend, and the problem sizes are
//! desk scale (hundreds of rows, not millions).

mod eig;
mod krylov;
mod lu;
mod qr;

pub use eig::{
    condition_number, extreme_singular_values, singular_values, sym_eigenvalues,
    ExtremeSingularValues,
};
pub use krylov::{minres, MinresOutcome};
pub use lu::Lu;
pub use qr::{least_squares, nullspace_basis, rank, Qr};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from literal `f64` rows; panics on ragged input.
    pub fn from_rows_f64(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix::from_fn(r, c, |i, j| S::from_f64(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> S {
        self[(i, j)].clone()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = S::zero();
            for (a, b) in row.iter().zip(x) {
                acc += a.clone() * b.clone();
            }
            out.push(acc);
        }
        out
    }

    pub fn tr_matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![S::zero(); self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i].clone();
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.clone() * xi.clone();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += aik.clone() * s.clone();
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> S {
        let mut acc = S::zero();
        for v in &self.data {
            acc += v.clone() * v.clone();
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> S {
        let mut best = S::zero();
        for v in &self.data {
            best = best.max_with(v.abs());
        }
        best
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let tol = S::from_f64(rel_tol) * self.max_abs().max_with(S::one());
        for i in 0..self.rows {
            for j in 0..i {
                if (self.at(i, j) - self.at(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Checks `rows == r && cols == c`, reporting `what` on mismatch.
    pub fn expect_shape(&self, r: usize, c: usize, what: &str) -> Result<()> {
        if self.rows != r || self.cols != c {
            return Err(Error::Dimension(format!(
                "{what}: expected {r}x{c}, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn map_to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn convert<T: Scalar>(&self) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| T::from_f64(v.to_f64())).collect(),
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len(), "dot dimension mismatch");
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.clone() * y.clone();
    }
    acc
}

pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

pub fn inf_norm<S: Scalar>(a: &[S]) -> S {
    let mut best = S::zero();
    for v in a {
        best = best.max_with(v.abs());
    }
    best
}

pub fn v_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn v_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn v_scale<S: Scalar>(alpha: &S, a: &[S]) -> Vec<S> {
    a.iter().map(|x| alpha.clone() * x.clone()).collect()
}

/// `y += alpha * x`
pub fn axpy<S: Scalar>(alpha: &S, x: &[S], y: &mut [S]) {
    assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha.clone() * xi.clone();
    }
}

pub fn vec_from_f64<S: Scalar>(v: &[f64]) -> Vec<S> {
    v.iter().map(|x| S::from_f64(*x)).collect()
}

pub fn vec_to_f64<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// `sqrt(a^2 + b^2)` without intermediate overflow.
pub(crate) fn pythag<S: Scalar>(a: &S, b: &S) -> S {
    let aa = a.abs();
    let ab = b.abs();
    if aa > ab {
        let q = ab / aa.clone();
        aa.clone() * (S::one() + q.clone() * q).sqrt()
    } else if ab > S::zero() {
        let q = aa / ab.clone();
        ab.clone() * (S::one() + q.clone() * q).sqrt()
    } else {
        S::zero()
    }
}
