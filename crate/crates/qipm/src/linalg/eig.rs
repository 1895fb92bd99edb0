//! Symmetric eigenvalues, singular values, and condition numbers.
//!
//! Exact paths (Householder tridiagonalization plus implicit QL, singular
//! values through the symmetric embedding `[[0, M], [M^T, 0]]`) are meant
//! for small matrices and test oracles. The power-iteration estimators are
//! the cheap per-iteration diagnostics.

use super::{pythag, Lu, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reduces a symmetric matrix to tridiagonal form, returning the diagonal
/// and the couplings `e[i]` between rows `i` and `i + 1` (`e[n-1]` unused).
fn tridiagonalize<S: Scalar>(a: &Matrix<S>) -> (Vec<S>, Vec<S>) {
    let n = a.rows();
    let mut a = a.clone();
    let mut sub = vec![S::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let mut sq = S::zero();
        for i in (k + 1)..n {
            let v = a[(i, k)].clone();
            sq += v.clone() * v;
        }
        let normx = sq.clone().sqrt();
        if !(normx > S::zero()) {
            continue;
        }
        let x0 = a[(k + 1, k)].clone();
        let alpha = if x0 > S::zero() { -normx } else { normx };
        let v0 = x0.clone() - alpha.clone();
        let beta = S::from_f64(2.0) / ((sq - alpha.clone() * x0) * S::from_f64(2.0));
        sub[k + 1] = alpha;

        let mut v = vec![S::zero(); n];
        v[k + 1] = v0;
        for i in (k + 2)..n {
            v[i] = a[(i, k)].clone();
        }
        // p = beta A v, w = p - (beta p.v / 2) v, A <- A - v w^T - w v^T
        let mut p = vec![S::zero(); n];
        for i in (k + 1)..n {
            let mut acc = S::zero();
            for (j, vj) in v.iter().enumerate().take(n).skip(k + 1) {
                acc += a[(i, j)].clone() * vj.clone();
            }
            p[i] = beta.clone() * acc;
        }
        let mut pv = S::zero();
        for i in (k + 1)..n {
            pv += p[i].clone() * v[i].clone();
        }
        let coef = beta * pv / S::from_f64(2.0);
        let mut w = vec![S::zero(); n];
        for i in (k + 1)..n {
            w[i] = p[i].clone() - coef.clone() * v[i].clone();
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let upd = a[(i, j)].clone()
                    - v[i].clone() * w[j].clone()
                    - w[i].clone() * v[j].clone();
                a[(i, j)] = upd;
            }
        }
    }
    if n >= 2 {
        sub[n - 1] = a[(n - 1, n - 2)].clone();
    }
    let d = (0..n).map(|i| a.at(i, i)).collect();
    // shift couplings so e[i] links d[i] and d[i+1]
    let mut e = vec![S::zero(); n];
    for i in 0..n.saturating_sub(1) {
        e[i] = sub[i + 1].clone();
    }
    (d, e)
}

fn sign_copy<S: Scalar>(magnitude: &S, sign_of: &S) -> S {
    if *sign_of < S::zero() {
        -magnitude.abs()
    } else {
        magnitude.abs()
    }
}

/// Implicit QL with Wilkinson shifts on a tridiagonal matrix; eigenvalues
/// only, returned ascending.
fn tql<S: Scalar>(d: &mut [S], e: &mut [S]) -> Result<()> {
    let n = d.len();
    let two = S::from_f64(2.0);
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if !(e[m].abs() > S::epsilon() * dd) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::Singular {
                    context: "symmetric eigenvalue iteration stalled",
                });
            }
            let mut g = (d[l + 1].clone() - d[l].clone()) / (two.clone() * e[l].clone());
            let mut r = pythag(&g, &S::one());
            g = d[m].clone() - d[l].clone()
                + e[l].clone() / (g.clone() + sign_copy(&r, &g));
            let mut s = S::one();
            let mut c = S::one();
            let mut p = S::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s.clone() * e[i].clone();
                let b = c.clone() * e[i].clone();
                r = pythag(&f, &g);
                e[i + 1] = r.clone();
                if !(r.abs() > S::zero()) {
                    d[i + 1] -= p.clone();
                    e[m] = S::zero();
                    underflow = true;
                    break;
                }
                s = f / r.clone();
                c = g.clone() / r.clone();
                g = d[i + 1].clone() - p.clone();
                r = (d[i].clone() - g.clone()) * s.clone() + two.clone() * c.clone() * b.clone();
                p = s.clone() * r.clone();
                d[i + 1] = g.clone() + p.clone();
                g = c.clone() * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = S::zero();
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("non-finite eigenvalue"));
    Ok(())
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues<S: Scalar>(a: &Matrix<S>) -> Result<Vec<S>> {
    debug_assert!(a.is_symmetric(1e-8), "matrix is not symmetric");
    let (mut d, mut e) = tridiagonalize(a);
    tql(&mut d, &mut e)?;
    Ok(d)
}

/// Singular values of a general matrix, descending.
///
/// Uses eigenvalues of the symmetric embedding `[[0, M], [M^T, 0]]`, whose
/// spectrum is `{+sigma_i, -sigma_i}` padded with zeros; the top
/// `min(p, q)` eigenvalues are the singular values.
pub fn singular_values<S: Scalar>(a: &Matrix<S>) -> Result<Vec<S>> {
    let (p, q) = (a.rows(), a.cols());
    let n = p + q;
    let mut j = Matrix::zeros(n, n);
    for i in 0..p {
        for k in 0..q {
            j[(i, p + k)] = a.at(i, k);
            j[(p + k, i)] = a.at(i, k);
        }
    }
    let (mut d, mut e) = tridiagonalize(&j);
    tql(&mut d, &mut e)?;
    let take = p.min(q);
    let mut out: Vec<S> = d[n - take..].to_vec();
    out.reverse();
    Ok(out)
}

/// Exact two-norm condition number; `INFINITY` when the smallest singular
/// value has collapsed to the round-off floor.
pub fn condition_number<S: Scalar>(a: &Matrix<S>) -> Result<f64> {
    let sv = singular_values(a)?;
    let smax = sv.first().map_or(0.0, Scalar::to_f64);
    let smin = sv.last().map_or(0.0, Scalar::to_f64);
    let floor = smax * f64::EPSILON * (a.rows().max(a.cols()) as f64);
    if smin <= floor {
        return Ok(f64::INFINITY);
    }
    Ok(smax / smin)
}

#[derive(Clone, Copy, Debug)]
pub struct ExtremeSingularValues {
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl ExtremeSingularValues {
    pub fn condition(&self) -> f64 {
        if self.sigma_min > 0.0 {
            self.sigma_max / self.sigma_min
        } else {
            f64::INFINITY
        }
    }
}

fn seeded_unit_vector(n: usize) -> Vec<f64> {
    // fixed multiplicative-hash ramp; deterministic and unlikely to be
    // orthogonal to a dominant singular vector
    let mut v: Vec<f64> = (0..n)
        .map(|i| 0.5 + ((i.wrapping_mul(2654435761) >> 8) % 1024) as f64 / 1024.0)
        .collect();
    let nrm = super::norm2(&v);
    for x in v.iter_mut() {
        *x /= nrm;
    }
    v
}

/// Power-iteration estimate of the extreme singular values of a square
/// nonsingular matrix with a ready LU factorization. Cheap (a few hundred
/// matrix-vector products at most) but only an estimate; accuracy degrades
/// when the extreme singular values are clustered.
pub fn extreme_singular_values(a: &Matrix<f64>, lu: &Lu<f64>) -> ExtremeSingularValues {
    let n = a.rows();
    assert_eq!(n, a.cols(), "square matrix required");
    if n == 0 {
        return ExtremeSingularValues {
            sigma_max: 0.0,
            sigma_min: 0.0,
        };
    }
    let max_iters = 300;
    let tol = 1e-9;

    // sigma_max^2 = top eigenvalue of M^T M
    let mut z = seeded_unit_vector(n);
    let mut lam = 0.0f64;
    for _ in 0..max_iters {
        let w = a.tr_matvec(&a.matvec(&z));
        let nrm = super::norm2(&w);
        if nrm == 0.0 {
            break;
        }
        for (zi, wi) in z.iter_mut().zip(&w) {
            *zi = wi / nrm;
        }
        if (nrm - lam).abs() <= tol * nrm {
            lam = nrm;
            break;
        }
        lam = nrm;
    }
    let sigma_max = lam.sqrt();

    // 1 / sigma_min^2 = top eigenvalue of (M^T M)^{-1}
    let mut z = seeded_unit_vector(n);
    let mut nu = 0.0f64;
    for _ in 0..max_iters {
        let w = lu.solve(&lu.solve_transposed(&z));
        let nrm = super::norm2(&w);
        if nrm == 0.0 {
            break;
        }
        for (zi, wi) in z.iter_mut().zip(&w) {
            *zi = wi / nrm;
        }
        if (nrm - nu).abs() <= tol * nrm {
            nu = nrm;
            break;
        }
        nu = nrm;
    }
    let sigma_min = if nu > 0.0 { 1.0 / nu.sqrt() } else { 0.0 };
    ExtremeSingularValues {
        sigma_max,
        sigma_min,
    }
}
