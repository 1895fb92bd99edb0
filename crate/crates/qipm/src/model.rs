//! Standard-form problem representation, instance metadata, and the
//! exact-step optimality metrics everything else is measured against.
//!
//! Primal: min c'x s.t. Ax = b, x >= 0. Dual: max b'y s.t. A'y + s = c,
//! s >= 0. A is dense with full row rank.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LOProblem<S> {
    a: Matrix<S>,
    b: Vec<S>,
    c: Vec<S>,
    is_integer_data: bool,
    name: String,
}

impl<S: Scalar> LOProblem<S> {
    /// Validates shapes, finiteness, and full row rank (smallest singular
    /// value above `1e-10` times the largest, checked in hardware floats).
    pub fn new(a: Matrix<S>, b: Vec<S>, c: Vec<S>, name: impl Into<String>) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m == 0 || n == 0 || m > n {
            return Err(Error::Dimension(format!(
                "constraint matrix must be m x n with 1 <= m <= n, got {m}x{n}"
            )));
        }
        if b.len() != m {
            return Err(Error::Dimension(format!(
                "b has length {}, expected {m}",
                b.len()
            )));
        }
        if c.len() != n {
            return Err(Error::Dimension(format!(
                "c has length {}, expected {n}",
                c.len()
            )));
        }
        let finite = (0..m).all(|i| a.row(i).iter().all(Scalar::is_finite))
            && b.iter().all(Scalar::is_finite)
            && c.iter().all(Scalar::is_finite);
        if !finite {
            return Err(Error::Dimension("non-finite entry in problem data".into()));
        }
        let af = a.map_to_f64();
        let sv = linalg::singular_values(&af)?;
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        if !(smin > 1e-10 * smax) {
            let est_rank = sv.iter().filter(|v| **v > 1e-10 * smax).count();
            return Err(Error::RankDeficient {
                rank: est_rank,
                expected: m,
            });
        }
        let is_integer_data = Self::all_integral(&a, &b, &c);
        Ok(LOProblem {
            a,
            b,
            c,
            is_integer_data,
            name: name.into(),
        })
    }

    fn all_integral(a: &Matrix<S>, b: &[S], c: &[S]) -> bool {
        let integral = |v: &S| {
            let f = v.to_f64();
            f == f.round() && f.abs() < 2f64.powi(52)
        };
        (0..a.rows()).all(|i| a.row(i).iter().all(integral))
            && b.iter().all(integral)
            && c.iter().all(integral)
    }

    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    pub fn c(&self) -> &[S] {
        &self.c
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn is_integer_data(&self) -> bool {
        self.is_integer_data
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same data under a different scalar backend.
    pub fn convert<T: Scalar>(&self) -> LOProblem<T> {
        LOProblem {
            a: self.a.convert(),
            b: self.b.iter().map(|v| T::from_f64(v.to_f64())).collect(),
            c: self.c.iter().map(|v| T::from_f64(v.to_f64())).collect(),
            is_integer_data: self.is_integer_data,
            name: self.name.clone(),
        }
    }

    /// Replaces the objective, keeping A and b (used by the refining
    /// subproblems). Rank was already checked, so this cannot fail except
    /// on length mismatch.
    pub fn with_objective(&self, c: Vec<S>) -> Result<Self> {
        if c.len() != self.n() {
            return Err(Error::Dimension(format!(
                "objective has length {}, expected {}",
                c.len(),
                self.n()
            )));
        }
        let is_integer_data = Self::all_integral(&self.a, &self.b, &c);
        Ok(LOProblem {
            a: self.a.clone(),
            b: self.b.clone(),
            c,
            is_integer_data,
            name: self.name.clone(),
        })
    }

    /// Dual slack `c - A'y`.
    pub fn slack(&self, y: &[S]) -> Vec<S> {
        linalg::v_sub(&self.c, &self.a.tr_matvec(y))
    }
}

/// Binary input length `L` of an integer-data instance:
/// `mn + m + n + sum ceil(log2(|a_ij| + 1)) + sum ceil(log2(|c_j| + 1))
///  + sum ceil(log2(|b_i| + 1))`.
pub fn binary_length<S: Scalar>(problem: &LOProblem<S>) -> Result<u64> {
    if !problem.is_integer_data() {
        return Err(Error::NonIntegerData);
    }
    let bits = |v: &S| -> u64 {
        let a = v.to_f64().abs();
        (a + 1.0).log2().ceil() as u64
    };
    let (m, n) = (problem.m() as u64, problem.n() as u64);
    let mut total = m * n + m + n;
    for i in 0..problem.m() {
        for v in problem.a.row(i) {
            total += bits(v);
        }
    }
    for v in problem.c() {
        total += bits(v);
    }
    for v in problem.b() {
        total += bits(v);
    }
    Ok(total)
}

/// Precision bookkeeping attached to a run: the binary length `L` (exact
/// for integer data, synthetic otherwise) and the precision multiplier `t`
/// that turns it into the working tolerance `2^(-tL)`.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct InstanceMetadata {
    pub l: u64,
    pub t: u32,
    pub frob_norm_a: f64,
}

impl InstanceMetadata {
    pub fn for_problem<S: Scalar>(problem: &LOProblem<S>, t: u32) -> Result<Self> {
        Self::validate_t(t)?;
        Ok(InstanceMetadata {
            l: binary_length(problem)?,
            t,
            frob_norm_a: problem.a().frobenius_norm().to_f64(),
        })
    }

    /// For real-valued data: maps a target precision to a synthetic length
    /// `L = ceil(log2(1/eps)) / 2`.
    pub fn synthetic<S: Scalar>(problem: &LOProblem<S>, eps: f64, t: u32) -> Result<Self> {
        Self::validate_t(t)?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "synthetic precision must be in (0,1), got {eps}"
            )));
        }
        let l = ((1.0 / eps).log2().ceil() as u64 + 1) / 2;
        Ok(InstanceMetadata {
            l: l.max(1),
            t,
            frob_norm_a: problem.a().frobenius_norm().to_f64(),
        })
    }

    fn validate_t(t: u32) -> Result<()> {
        if !(1..=10).contains(&t) {
            return Err(Error::InvalidConfig(format!(
                "precision multiplier t must be in 1..=10, got {t}"
            )));
        }
        Ok(())
    }

    /// `2^(-kL)` in the active backend; exact because the base is a power
    /// of two.
    pub fn pow2_tolerance<S: Scalar>(&self, k: u32) -> S {
        S::exp2i(-((k as i64) * (self.l as i64)))
    }
}

/// Dual iterate `(y, s, mu)` with strictly positive slack.
#[derive(Clone, Debug)]
pub struct DualIterate<S> {
    pub y: Vec<S>,
    pub s: Vec<S>,
    pub mu: S,
}

impl<S: Scalar> DualIterate<S> {
    pub fn new(y: Vec<S>, s: Vec<S>, mu: S) -> Result<Self> {
        if !s.iter().all(|v| *v > S::zero()) {
            return Err(Error::NotStrictlyPositive { what: "slack s" });
        }
        if !(mu > S::zero()) {
            return Err(Error::NotStrictlyPositive {
                what: "barrier parameter mu",
            });
        }
        Ok(DualIterate { y, s, mu })
    }
}

/// Primal-dual iterate; `x` and `s` are strictly positive for interior
/// points, and carry zeros after rounding to a vertex.
#[derive(Clone, Debug)]
pub struct PrimalDualIterate<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub s: Vec<S>,
}

impl<S: Scalar> PrimalDualIterate<S> {
    pub fn is_interior(&self) -> bool {
        self.x.iter().all(|v| *v > S::zero()) && self.s.iter().all(|v| *v > S::zero())
    }
}

/// Disjoint index sets of a (tentative) optimal partition.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Partition {
    pub basic: Vec<usize>,
    pub nonbasic: Vec<usize>,
}

/// Primal point associated with a dual iterate: `x = mu S^{-1} e`. Exact on
/// the central path, an estimate off it; the dual method never computes a
/// primal iterate of its own.
pub fn primal_estimate<S: Scalar>(s: &[S], mu: &S) -> Vec<S> {
    s.iter().map(|si| mu.clone() / si.clone()).collect()
}

/// Complementarity measure `x's / n`.
pub fn complementarity_mu<S: Scalar>(x: &[S], s: &[S]) -> Result<S> {
    if x.len() != s.len() || x.is_empty() {
        return Err(Error::Dimension(format!(
            "complementarity needs equal nonzero lengths, got {} and {}",
            x.len(),
            s.len()
        )));
    }
    Ok(linalg::dot(x, s) / S::from_f64(x.len() as f64))
}

/// Unique exact solution of the dual Newton system at `(s, mu)`, solved by
/// dense factorization of the symmetric block form
/// `[[S^2, A'], [A, 0]] (ds_hat, dy) = (0, A S^{-1} e - b/mu)`,
/// returning `(dy, ds)` with `ds = S^2 ds_hat`.
///
/// This is the reference the noisy oracle is measured against, and the step
/// underlying the proximity measure.
pub fn exact_dual_newton_step<S: Scalar>(
    problem: &LOProblem<S>,
    s: &[S],
    mu: &S,
) -> Result<(Vec<S>, Vec<S>)> {
    let (m, n) = (problem.m(), problem.n());
    if s.len() != n {
        return Err(Error::Dimension(format!(
            "slack has length {}, expected {n}",
            s.len()
        )));
    }
    if !s.iter().all(|v| *v > S::zero()) {
        return Err(Error::NotStrictlyPositive { what: "slack s" });
    }
    let aug = crate::newton::build_augmented(problem, s, mu)?;
    let lu = linalg::Lu::factor(&aug.matrix, "exact dual Newton step")?;
    let sol = lu.solve(&aug.rhs);
    let ds: Vec<S> = (0..n)
        .map(|i| s[i].clone() * s[i].clone() * sol[i].clone())
        .collect();
    let dy = sol[n..n + m].to_vec();
    Ok((dy, ds))
}

/// Proximity to the mu-center: `||S^{-1} ds||_2` for the exact step.
///
/// Invariant under rescaling `(s, mu) -> (alpha s, alpha mu)`, which is
/// exploited for conditioning: slacks above one are brought to unit size
/// before the step solve, so the measure stays computable for iterates of
/// rescaled subproblems whose slacks carry the magnification factor.
pub fn proximity<S: Scalar>(problem: &LOProblem<S>, s: &[S], mu: &S) -> Result<S> {
    let mut alpha = S::one();
    for v in s {
        if *v > alpha.recip() {
            alpha = v.recip();
        }
    }
    let scaled_s: Vec<S> = s.iter().map(|v| v.clone() * alpha.clone()).collect();
    let scaled_mu = mu.clone() * alpha.clone();
    let (_, ds) = exact_dual_newton_step(problem, &scaled_s, &scaled_mu)?;
    let scaled: Vec<S> = ds
        .iter()
        .zip(&scaled_s)
        .map(|(d, si)| d.clone() / si.clone())
        .collect();
    Ok(linalg::norm2(&scaled))
}
