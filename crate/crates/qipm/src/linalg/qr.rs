//! Householder QR, least squares (tall and wide), and numerical rank.

use super::{norm2, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Householder QR factors of an `m x n` matrix.
///
/// Reflector `k` is `H_k = I - beta_k v v^T` with `v = (v0_k, qr[k+1.., k])`
/// supported on rows `k..m`; `Q = H_0 H_1 ... H_{p-1}` and R sits on and
/// above the diagonal of `qr`.
#[derive(Clone, Debug)]
pub struct Qr<S> {
    qr: Matrix<S>,
    v0s: Vec<S>,
    betas: Vec<S>,
    m: usize,
    n: usize,
}

impl<S: Scalar> Qr<S> {
    pub fn factor(a: &Matrix<S>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let p = m.min(n);
        let mut qr = a.clone();
        let mut v0s = Vec::with_capacity(p);
        let mut betas = Vec::with_capacity(p);

        for k in 0..p {
            let mut sq = S::zero();
            for i in k..m {
                let v = qr[(i, k)].clone();
                sq += v.clone() * v;
            }
            let normx = sq.clone().sqrt();
            if !(normx > S::zero()) {
                v0s.push(S::zero());
                betas.push(S::zero());
                continue;
            }
            let x0 = qr[(k, k)].clone();
            // pick the sign that avoids cancellation in v0 = x0 - alpha
            let alpha = if x0 > S::zero() { -normx } else { normx };
            let v0 = x0.clone() - alpha.clone();
            let vtv = (sq - alpha.clone() * x0) * S::from_f64(2.0);
            let beta = S::from_f64(2.0) / vtv;
            qr[(k, k)] = alpha;
            for j in (k + 1)..n {
                let mut w = v0.clone() * qr[(k, j)].clone();
                for i in (k + 1)..m {
                    w += qr[(i, k)].clone() * qr[(i, j)].clone();
                }
                let bw = beta.clone() * w;
                let upd = qr[(k, j)].clone() - bw.clone() * v0.clone();
                qr[(k, j)] = upd;
                for i in (k + 1)..m {
                    let upd = qr[(i, j)].clone() - bw.clone() * qr[(i, k)].clone();
                    qr[(i, j)] = upd;
                }
            }
            v0s.push(v0);
            betas.push(beta);
        }
        Qr { qr, v0s, betas, m, n }
    }

    fn apply_reflector(&self, k: usize, b: &mut [S]) {
        let beta = self.betas[k].clone();
        if !(beta.abs() > S::zero()) {
            return;
        }
        let v0 = self.v0s[k].clone();
        let mut w = v0.clone() * b[k].clone();
        for i in (k + 1)..self.m {
            w += self.qr[(i, k)].clone() * b[i].clone();
        }
        let bw = beta * w;
        b[k] -= bw.clone() * v0;
        for i in (k + 1)..self.m {
            b[i] -= bw.clone() * self.qr[(i, k)].clone();
        }
    }

    /// In-place `b <- Q^T b`.
    pub fn apply_qt(&self, b: &mut [S]) {
        assert_eq!(b.len(), self.m);
        for k in 0..self.betas.len() {
            self.apply_reflector(k, b);
        }
    }

    /// In-place `b <- Q b`.
    pub fn apply_q(&self, b: &mut [S]) {
        assert_eq!(b.len(), self.m);
        for k in (0..self.betas.len()).rev() {
            self.apply_reflector(k, b);
        }
    }

    pub fn r_diag(&self, k: usize) -> S {
        self.qr[(k, k)].clone()
    }

    /// Back substitution `R x = y[0..n]`; rank failure reports how many
    /// leading diagonal entries were acceptable.
    pub fn solve_upper(&self, y: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let floor = S::from_f64(self.m.max(n) as f64) * S::epsilon() * self.qr.max_abs();
        let mut x = vec![S::zero(); n];
        for i in (0..n).rev() {
            let rii = self.qr[(i, i)].clone();
            if !(rii.abs() > floor) {
                return Err(Error::RankDeficient {
                    rank: i,
                    expected: n,
                });
            }
            let mut acc = y[i].clone();
            for j in (i + 1)..n {
                acc -= self.qr[(i, j)].clone() * x[j].clone();
            }
            x[i] = acc / rii;
        }
        Ok(x)
    }

    /// Forward substitution `R^T z = y`.
    pub fn solve_upper_transposed(&self, y: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let floor = S::from_f64(self.m.max(n) as f64) * S::epsilon() * self.qr.max_abs();
        let mut z = vec![S::zero(); n];
        for i in 0..n {
            let rii = self.qr[(i, i)].clone();
            if !(rii.abs() > floor) {
                return Err(Error::RankDeficient {
                    rank: i,
                    expected: n,
                });
            }
            let mut acc = y[i].clone();
            for j in 0..i {
                acc -= self.qr[(j, i)].clone() * z[j].clone();
            }
            z[i] = acc / rii;
        }
        Ok(z)
    }

    /// Columns `lo..hi` of the full `m x m` Q, as a matrix with `hi - lo`
    /// columns.
    pub fn q_columns(&self, lo: usize, hi: usize) -> Matrix<S> {
        assert!(lo <= hi && hi <= self.m);
        let mut out = Matrix::zeros(self.m, hi - lo);
        let mut col = vec![S::zero(); self.m];
        for (jj, j) in (lo..hi).enumerate() {
            for v in col.iter_mut() {
                *v = S::zero();
            }
            col[j] = S::one();
            self.apply_q(&mut col);
            for i in 0..self.m {
                out[(i, jj)] = col[i].clone();
            }
        }
        out
    }
}

/// Least-squares solve of `a x = b`.
///
/// Tall (or square) systems get the unique residual minimizer; wide systems
/// get the minimum-norm solution via QR of the transpose. Rank deficiency
/// is an error in both cases.
pub fn least_squares<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Vec<S>> {
    assert_eq!(b.len(), a.rows(), "rhs length mismatch");
    if a.rows() >= a.cols() {
        let qr = Qr::factor(a);
        let mut y = b.to_vec();
        qr.apply_qt(&mut y);
        qr.solve_upper(&y)
    } else {
        let qr = Qr::factor(&a.transpose());
        let z = qr.solve_upper_transposed(b)?;
        let mut x = vec![S::zero(); a.cols()];
        x[..z.len()].clone_from_slice(&z);
        qr.apply_q(&mut x);
        Ok(x)
    }
}

/// Numerical rank via greedy column-pivoted elimination.
///
/// A column joins the basis while its remaining sub-column norm exceeds
/// `max(m, n) * eps` times the largest initial pivot norm.
pub fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    let (m, n) = (a.rows(), a.cols());
    let p = m.min(n);
    if p == 0 {
        return 0;
    }
    let mut work = a.clone();
    let mut rank = 0;
    let mut threshold = S::zero();
    for k in 0..p {
        let mut best_j = k;
        let mut best = S::zero();
        for j in k..n {
            let mut sq = S::zero();
            for i in k..m {
                let v = work[(i, j)].clone();
                sq += v.clone() * v;
            }
            let nrm = sq.sqrt();
            if nrm > best {
                best = nrm;
                best_j = j;
            }
        }
        if k == 0 {
            threshold = S::from_f64(m.max(n) as f64) * S::epsilon() * best.clone();
        }
        if !(best > threshold) {
            break;
        }
        rank += 1;
        if best_j != k {
            for i in 0..m {
                let tmp = work[(i, k)].clone();
                work[(i, k)] = work[(i, best_j)].clone();
                work[(i, best_j)] = tmp;
            }
        }
        // eliminate below (k, k) within remaining columns, Gram-Schmidt style
        let mut sq = S::zero();
        for i in k..m {
            let v = work[(i, k)].clone();
            sq += v.clone() * v;
        }
        let inv = sq.recip();
        for j in (k + 1)..n {
            let mut proj = S::zero();
            for i in k..m {
                proj += work[(i, k)].clone() * work[(i, j)].clone();
            }
            let coef = proj * inv.clone();
            for i in k..m {
                let upd = work[(i, j)].clone() - coef.clone() * work[(i, k)].clone();
                work[(i, j)] = upd;
            }
        }
        for i in k..m {
            work[(i, k)] = S::zero();
        }
    }
    rank
}

/// Orthonormal basis for the null space of `a` (requires full row rank).
///
/// Columns of the result satisfy `a v = 0` and `V^T V = I`; one refinement
/// pass removes the residual row-space component left by finite-precision
/// Householder accumulation. Each column's first nonzero-ish entry is made
/// positive so the basis is deterministic.
pub fn nullspace_basis<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let (m, n) = (a.rows(), a.cols());
    if m >= n {
        return Err(Error::Dimension(format!(
            "nullspace basis needs a wide matrix, got {m}x{n}"
        )));
    }
    let qr = Qr::factor(&a.transpose());
    for k in 0..m {
        let floor = S::from_f64(n.max(m) as f64) * S::epsilon() * qr.qr.max_abs();
        if !(qr.r_diag(k).abs() > floor) {
            return Err(Error::RankDeficient {
                rank: k,
                expected: m,
            });
        }
    }
    let mut v = qr.q_columns(m, n);

    // refinement: v_j -= A^T (A A^T)^{-1} (A v_j), then re-orthonormalize
    let gram = a.matmul(&a.transpose());
    let lu = super::Lu::factor(&gram, "nullspace refinement")?;
    let k = n - m;
    let mut cols: Vec<Vec<S>> = (0..k)
        .map(|j| (0..n).map(|i| v.at(i, j)).collect())
        .collect();
    for col in cols.iter_mut() {
        let av = a.matvec(col);
        let w = lu.solve(&av);
        let corr = a.tr_matvec(&w);
        for (c, d) in col.iter_mut().zip(&corr) {
            *c -= d.clone();
        }
    }
    // modified Gram-Schmidt re-orthonormalization
    for j in 0..k {
        for i in 0..j {
            let (head, tail) = cols.split_at_mut(j);
            let proj = super::dot(&head[i], &tail[0]);
            for (t, h) in tail[0].iter_mut().zip(&head[i]) {
                *t -= proj.clone() * h.clone();
            }
        }
        let nrm = norm2(&cols[j]);
        if !(nrm > S::zero()) {
            return Err(Error::RankDeficient {
                rank: j,
                expected: k,
            });
        }
        let inv = nrm.recip();
        for t in cols[j].iter_mut() {
            *t = t.clone() * inv.clone();
        }
    }
    // deterministic sign: first entry with magnitude above 1/(2 sqrt(n)) positive
    let cutoff = S::from_f64(0.5 / (n as f64).sqrt());
    for col in cols.iter_mut() {
        let lead = col.iter().find(|v| v.abs() > cutoff).cloned();
        if let Some(lead) = lead {
            if lead < S::zero() {
                for t in col.iter_mut() {
                    *t = -t.clone();
                }
            }
        }
    }
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            v[(i, j)] = col[i].clone();
        }
    }
    Ok(v)
}
