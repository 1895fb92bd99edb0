//! LU factorization with partial pivoting.

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Packed LU factors of a square matrix, with row pivots.
///
/// Invariant: `P * A = L * U` where L has unit diagonal and both factors
/// share `lu`'s storage.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    lu: Matrix<S>,
    pivots: Vec<usize>,
    n: usize,
}

impl<S: Scalar> Lu<S> {
    /// Factors `a`; fails with `Error::Singular` when a pivot falls below
    /// `n * eps * max|a_ij|` (scale-relative singularity floor).
    pub fn factor(a: &Matrix<S>, context: &'static str) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{} ({context})",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut pivots = Vec::with_capacity(n);
        let floor = S::from_f64(n as f64) * S::epsilon() * a.max_abs();

        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in (k + 1)..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > floor) {
                return Err(Error::Singular { context });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)].clone();
                    lu[(k, j)] = lu[(p, j)].clone();
                    lu[(p, j)] = tmp;
                }
            }
            pivots.push(p);
            let inv_piv = lu[(k, k)].recip();
            for i in (k + 1)..n {
                let m = lu[(i, k)].clone() * inv_piv.clone();
                lu[(i, k)] = m.clone();
                for j in (k + 1)..n {
                    let upd = lu[(i, j)].clone() - m.clone() * lu[(k, j)].clone();
                    lu[(i, j)] = upd;
                }
            }
        }
        Ok(Lu { lu, pivots, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let mut x = b.to_vec();
        // apply pivots, then forward/back substitution
        for (k, &p) in self.pivots.iter().enumerate() {
            if p != k {
                x.swap(k, p);
            }
        }
        for i in 1..self.n {
            let mut acc = x[i].clone();
            for j in 0..i {
                acc -= self.lu[(i, j)].clone() * x[j].clone();
            }
            x[i] = acc;
        }
        for i in (0..self.n).rev() {
            let mut acc = x[i].clone();
            for j in (i + 1)..self.n {
                acc -= self.lu[(i, j)].clone() * x[j].clone();
            }
            x[i] = acc / self.lu[(i, i)].clone();
        }
        x
    }

    /// Solves `A^T x = b` using the same factors: `A^T = U^T L^T P`.
    pub fn solve_transposed(&self, b: &[S]) -> Vec<S> {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let mut x = b.to_vec();
        // U^T is lower triangular: forward substitution with division
        for i in 0..self.n {
            let mut acc = x[i].clone();
            for j in 0..i {
                acc -= self.lu[(j, i)].clone() * x[j].clone();
            }
            x[i] = acc / self.lu[(i, i)].clone();
        }
        // L^T is unit upper triangular: back substitution
        for i in (0..self.n).rev() {
            let mut acc = x[i].clone();
            for j in (i + 1)..self.n {
                acc -= self.lu[(j, i)].clone() * x[j].clone();
            }
            x[i] = acc;
        }
        // undo row pivots (they act on the solution side for A^T)
        for (k, &p) in self.pivots.iter().enumerate().rev() {
            if p != k {
                x.swap(k, p);
            }
        }
        x
    }

    /// One step of iterative refinement of `x` against the original matrix.
    pub fn refine(&self, a: &Matrix<S>, b: &[S], x: &mut [S]) {
        let ax = a.matvec(x);
        let mut r = Vec::with_capacity(self.n);
        for (bi, axi) in b.iter().zip(&ax) {
            r.push(bi.clone() - axi.clone());
        }
        let dx = self.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di.clone();
        }
    }
}
