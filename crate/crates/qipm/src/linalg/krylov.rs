//! MINRES for symmetric (possibly indefinite) systems.

use super::{norm2, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct MinresOutcome<S> {
    pub x: Vec<S>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||` as tracked by the recurrence.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Minimum-residual iteration on a symmetric matrix.
///
/// Runs until the tracked residual satisfies `||r|| <= rel_tol * ||b||` or
/// `max_iters` Lanczos steps have been taken. The saddle-point systems this
/// serves are indefinite, which is exactly the case MINRES exists for.
pub fn minres<S: Scalar>(
    a: &Matrix<S>,
    b: &[S],
    rel_tol: f64,
    max_iters: usize,
) -> MinresOutcome<S> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "square matrix required");
    assert_eq!(b.len(), n, "rhs length mismatch");
    debug_assert!(a.is_symmetric(1e-10), "matrix is not symmetric");

    let beta1 = norm2(b);
    let mut x = vec![S::zero(); n];
    if !(beta1 > S::zero()) {
        return MinresOutcome {
            x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let tol_abs = S::from_f64(rel_tol) * beta1.clone();

    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut w: Vec<S> = vec![S::zero(); n];
    let mut w2: Vec<S> = vec![S::zero(); n];
    let mut oldb = S::zero();
    let mut beta = beta1.clone();
    let mut dbar = S::zero();
    let mut epsln = S::zero();
    let mut phibar = beta1.clone();
    let mut cs = -S::one();
    let mut sn = S::zero();

    let mut iterations = 0;
    let mut converged = false;

    for k in 1..=max_iters {
        iterations = k;
        let inv_beta = beta.recip();
        let v: Vec<S> = r2.iter().map(|t| t.clone() * inv_beta.clone()).collect();
        let mut y = a.matvec(&v);
        if k >= 2 {
            let coef = beta.clone() / oldb.clone();
            for (yi, r1i) in y.iter_mut().zip(&r1) {
                *yi -= coef.clone() * r1i.clone();
            }
        }
        let alfa = super::dot(&v, &y);
        let coef = alfa.clone() * inv_beta;
        for (yi, r2i) in y.iter_mut().zip(&r2) {
            *yi -= coef.clone() * r2i.clone();
        }
        r1 = std::mem::replace(&mut r2, y); // r1 <- old r2, r2 <- new y
        oldb = beta;
        beta = norm2(&r2);

        // previous Givens rotation
        let oldeps = epsln.clone();
        let delta = cs.clone() * dbar.clone() + sn.clone() * alfa.clone();
        let gbar = sn.clone() * dbar - cs.clone() * alfa;
        epsln = sn.clone() * beta.clone();
        dbar = -cs.clone() * beta.clone();

        // next rotation annihilates the new off-diagonal
        let gamma = super::pythag(&gbar, &beta);
        if !(gamma > S::zero()) {
            converged = !(phibar > tol_abs);
            break;
        }
        cs = gbar / gamma.clone();
        sn = beta.clone() / gamma.clone();
        let phi = cs.clone() * phibar.clone();
        phibar = sn.clone() * phibar;

        let inv_gamma = gamma.recip();
        let w1 = std::mem::replace(&mut w2, std::mem::take(&mut w));
        w = (0..n)
            .map(|i| {
                (v[i].clone() - oldeps.clone() * w1[i].clone() - delta.clone() * w2[i].clone())
                    * inv_gamma.clone()
            })
            .collect();
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi += phi.clone() * wi.clone();
        }

        if !(phibar > tol_abs) {
            converged = true;
            break;
        }
        if !(beta > S::zero()) {
            // Krylov space exhausted; phibar above already decided
            converged = !(phibar > tol_abs);
            break;
        }
    }

    MinresOutcome {
        relative_residual: (phibar / beta1).to_f64(),
        x,
        iterations,
        converged,
    }
}
