//! Outer iterative refinement around the dual barrier method.
//!
//! One refinement round: project the current slack onto exact dual
//! feasibility, rescale the residual objective by the running factor, solve
//! the rescaled problem to the fixed low accuracy, and fold the correction
//! back. Every inner solve covers the same barrier range at its own scale,
//! so the per-round work is constant while the composed accuracy improves
//! geometrically; the duality-gap certificate contracts by the per-solve
//! accuracy each round.
//!
//! Classical arithmetic done at this level (the matrix-vector products of
//! projection, objective rescaling, and slack refresh) is metered into a
//! multiply-add counter; everything inside the inner solves is charged to
//! the query counter instead.

use crate::error::{Error, Result};
use crate::ipm::{center_dual_start, run_dual, IPMConfig};
use crate::linalg::{self, norm2, Lu, Matrix};
use crate::model::{proximity, DualIterate, LOProblem, Partition};
use crate::newton::build_augmented;
use crate::oracle::{condition_estimate, Oracle};
use crate::refine::solve_normal_system;
use crate::scalar::Scalar;

/// Scale bookkeeping of the refinement loop.
///
/// `nabla` is the factor by which the current subproblem magnifies the
/// remaining error; it starts at one and divides by `zeta_tilde` per round,
/// staying an exact power because the quotient of the representable
/// start values rounds to the representable power.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RefinementState {
    pub nabla: f64,
    /// Final composed accuracy target.
    pub zeta: f64,
    /// Fixed per-solve accuracy.
    pub zeta_tilde: f64,
    pub outer_iter: usize,
}

impl RefinementState {
    pub fn new(zeta: f64, zeta_tilde: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta <= zeta_tilde && zeta_tilde < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < zeta <= zeta_tilde < 1, got zeta {zeta}, zeta_tilde {zeta_tilde}"
            )));
        }
        Ok(RefinementState {
            nabla: 1.0,
            zeta,
            zeta_tilde,
            outer_iter: 0,
        })
    }

    /// True while the composed accuracy `zeta_tilde / nabla` is still above
    /// the target. The relative guard keeps a rounding-inflated quotient
    /// from buying a spurious extra round.
    pub fn needs_refinement(&self) -> bool {
        self.nabla < self.zeta_tilde / self.zeta * (1.0 - 1e-9)
    }

    pub fn advance(&mut self) {
        self.nabla /= self.zeta_tilde;
        self.outer_iter += 1;
    }
}

/// Closed-form total round count the bookkeeping produces.
pub fn expected_outer_iterations(zeta: f64, zeta_tilde: f64) -> usize {
    let ratio = (1.0 / zeta).ln() / (1.0 / zeta_tilde).ln();
    (ratio - 1e-9).ceil().max(1.0) as usize
}

/// Exact-feasibility restoration of a dual point: `y` minimizes
/// `||A'y - (c - s_k)||_2` through the normal system, and the returned
/// slack is recomputed as `c - A'y`, so `A'y + s = c` holds by
/// construction. The slack is not sign-constrained; `nonnegative` reports
/// whether it stayed positive.
pub struct Projection<S> {
    pub y: Vec<S>,
    pub s: Vec<S>,
    pub nonnegative: bool,
    pub queries: u64,
}

pub fn project_dual<S: Scalar>(
    problem: &LOProblem<S>,
    s_k: &[S],
    oracle: &mut Oracle,
    classical_ops: &mut u64,
) -> Result<Projection<S>> {
    let (m, n) = (problem.m(), problem.n());
    if s_k.len() != n {
        return Err(Error::Dimension(format!(
            "slack has length {}, expected {n}",
            s_k.len()
        )));
    }
    let target = linalg::v_sub(problem.c(), s_k);
    *classical_ops += (m * n) as u64;
    let rhs = problem.a().matvec(&target);
    let solved = solve_normal_system(problem.a(), &rhs, 1e-12, oracle)?;
    *classical_ops += (m * n) as u64;
    let s = problem.slack(&solved.z);
    let nonnegative = s.iter().all(|v| *v > S::zero());
    Ok(Projection {
        y: solved.z,
        s,
        nonnegative,
        queries: solved.queries,
    })
}

/// Residual subproblem at magnification `nabla`: same constraints, objective
/// `nabla * (c - A'y)`. With a strictly feasible `(y, s)`, the point
/// `(0, nabla * s)` is strictly feasible for the result, and corrections
/// found at this scale fold back as `y + y_hat / nabla`.
pub fn construct_refining<S: Scalar>(
    problem: &LOProblem<S>,
    y: &[S],
    nabla: f64,
    classical_ops: &mut u64,
) -> Result<LOProblem<S>> {
    if !(nabla >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "magnification must be at least 1, got {nabla}"
        )));
    }
    if y.len() != problem.m() {
        return Err(Error::Dimension(format!(
            "y has length {}, expected {}",
            y.len(),
            problem.m()
        )));
    }
    *classical_ops += (problem.m() * problem.n()) as u64;
    let scale = S::from_f64(nabla);
    let c_hat: Vec<S> = problem
        .slack(y)
        .into_iter()
        .map(|v| scale.clone() * v)
        .collect();
    problem.with_objective(c_hat)
}

/// One refinement round in the output trace. Scale-dependent quantities
/// are reported at both scales: `mu_end` is the inner solve's final barrier
/// value at its own magnification, `gap_certificate` is the original-scale
/// duality-gap bound `n * mu_end / nabla`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OuterRow {
    pub outer_iter: usize,
    pub nabla: f64,
    pub mu_end: f64,
    pub gap_certificate: f64,
    /// Condition estimate of the original problem's Newton system at the
    /// accumulated iterate after this round; -1 when not computable.
    pub kappa_system: f64,
    /// Largest condition estimate among the systems the inner solve
    /// presented to the oracle (after slack equilibration). Every round
    /// covers the same barrier range at its own scale, so this stays near
    /// the first round's value; that stability is the payoff of stopping
    /// each inner solve at the fixed accuracy.
    pub kappa_inner_max: f64,
    /// `||A'y + s - c||` of the accumulated iterate after this round's
    /// projection and fold-back; rounding-level when restoration works.
    pub post_projection_drift: f64,
    pub inner_iterations: usize,
    pub queries: u64,
    pub solve_converged: bool,
}

#[derive(Clone, Debug)]
pub struct IrRunOutput<S> {
    /// Accumulated original-scale iterate; `mu` is the final inner barrier
    /// value mapped back through the magnification.
    pub iterate: DualIterate<S>,
    pub outer: Vec<OuterRow>,
    pub total_queries: u64,
    /// Multiply-adds of this module's own matrix-vector products.
    pub classical_ops: u64,
    pub converged: bool,
}

impl<S: Scalar> IrRunOutput<S> {
    pub fn gap_certificate(&self) -> f64 {
        self.outer.last().map_or(f64::NAN, |r| r.gap_certificate)
    }

    pub fn outer_iterations(&self) -> usize {
        self.outer.len()
    }
}

fn to_f64_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Condition estimate of the original problem's Newton matrix at `(s, mu)`,
/// evaluated in hardware floats; -1 when the slack is nonpositive or the
/// estimate fails.
fn accumulated_kappa<S: Scalar>(problem: &LOProblem<f64>, s: &[S], mu: f64) -> f64 {
    let s_f = to_f64_vec(s);
    if !s_f.iter().all(|v| *v > 0.0) {
        return -1.0;
    }
    build_augmented(problem, &s_f, &mu)
        .ok()
        .and_then(|aug| condition_estimate(&aug.matrix).ok())
        .unwrap_or(-1.0)
}

fn dual_drift_norm<S: Scalar>(problem: &LOProblem<S>, y: &[S], s: &[S]) -> f64 {
    let mut r = problem.a().tr_matvec(y);
    for ((ri, si), ci) in r.iter_mut().zip(s).zip(problem.c()) {
        *ri += si.clone() - ci.clone();
    }
    norm2(&r).to_f64()
}

/// Barrier parameter for a solve from slack `s`: the provided value when it
/// is already proximal, otherwise the centering search's choice.
fn choose_start_mu<S: Scalar>(problem: &LOProblem<S>, s: &[S], mu: &S) -> Result<S> {
    let pf = problem.convert::<f64>();
    let s_f = to_f64_vec(s);
    let delta = proximity(&pf, &s_f, &mu.to_f64()).unwrap_or(f64::INFINITY);
    if delta < 0.5 {
        return Ok(mu.clone());
    }
    let (mu_c, _) = center_dual_start(problem, s)?;
    Ok(mu_c)
}

/// Refinement loop: an initial solve to the per-round accuracy, then
/// rescaled residual solves until the composed accuracy reaches `zeta`.
/// `config.mu_stop` is overridden by `zeta_tilde` for every inner solve;
/// the other knobs apply as given. The start only needs a strictly
/// positive slack; its `mu` is recentered if not proximal, and exact dual
/// feasibility is restored by projection after every solve.
pub fn run_ir<S: Scalar>(
    problem: &LOProblem<S>,
    start: &DualIterate<S>,
    zeta: f64,
    zeta_tilde: f64,
    config: &IPMConfig,
    oracle: &mut Oracle,
) -> Result<IrRunOutput<S>> {
    config.validate()?;
    let mut state = RefinementState::new(zeta, zeta_tilde)?;
    let inner_config = IPMConfig {
        mu_stop: zeta_tilde,
        ..config.clone()
    };
    let (m, n) = (problem.m(), problem.n());
    let problem_f = problem.convert::<f64>();
    let zt = S::from_f64(zeta_tilde);

    let mut classical_ops = 0u64;
    let mut total_queries = 0u64;
    let mut outer = Vec::new();
    let mut converged = true;

    // initial solve on the original problem
    let mu0 = choose_start_mu(problem, &start.s, &start.mu)?;
    let start0 = DualIterate::new(start.y.clone(), start.s.clone(), mu0)?;
    let run = run_dual(problem, &start0, &inner_config, oracle)?;
    converged &= run.converged;
    let proj = project_dual(problem, &run.iterate.s, oracle, &mut classical_ops)?;
    let row_queries = run.trajectory.total_queries().saturating_add(proj.queries);
    total_queries = total_queries.saturating_add(row_queries);

    let mut y_acc = proj.y;
    let mut s_acc = proj.s;
    let mut mu_hat_end = run.iterate.mu.clone();
    let mut mu_acc = mu_hat_end.clone();
    outer.push(OuterRow {
        outer_iter: 0,
        nabla: 1.0,
        mu_end: mu_hat_end.to_f64(),
        gap_certificate: n as f64 * mu_hat_end.to_f64(),
        kappa_system: accumulated_kappa(&problem_f, &s_acc, mu_acc.to_f64()),
        kappa_inner_max: run
            .trajectory
            .rows
            .iter()
            .map(|r| r.kappa_est)
            .fold(0.0, f64::max),
        post_projection_drift: dual_drift_norm(problem, &y_acc, &s_acc),
        inner_iterations: run.trajectory.iterations(),
        queries: row_queries,
        solve_converged: run.converged,
    });

    while state.needs_refinement() {
        state.advance();
        let nabla_s = S::from_f64(state.nabla);
        let refined = construct_refining(problem, &y_acc, state.nabla, &mut classical_ops)?;
        let s0 = refined.c().to_vec();
        // the previous end point is proximal at the new scale with the
        // barrier value carried over through the magnification step
        let mu_hat0 = choose_start_mu(&refined, &s0, &(mu_hat_end.clone() / zt.clone()))?;
        let start_k = DualIterate::new(vec![S::zero(); m], s0, mu_hat0)?;
        let run = run_dual(&refined, &start_k, &inner_config, oracle)?;
        converged &= run.converged;
        let proj = project_dual(&refined, &run.iterate.s, oracle, &mut classical_ops)?;
        let row_queries = run.trajectory.total_queries().saturating_add(proj.queries);
        total_queries = total_queries.saturating_add(row_queries);

        for (yi, pi) in y_acc.iter_mut().zip(&proj.y) {
            *yi += pi.clone() / nabla_s.clone();
        }
        classical_ops += (m * n) as u64;
        s_acc = problem.slack(&y_acc);
        mu_hat_end = run.iterate.mu.clone();
        mu_acc = mu_hat_end.clone() / nabla_s.clone();

        outer.push(OuterRow {
            outer_iter: state.outer_iter,
            nabla: state.nabla,
            mu_end: mu_hat_end.to_f64(),
            gap_certificate: n as f64 * mu_hat_end.to_f64() / state.nabla,
            kappa_system: accumulated_kappa(&problem_f, &s_acc, mu_acc.to_f64()),
            kappa_inner_max: run
                .trajectory
                .rows
                .iter()
                .map(|r| r.kappa_est)
                .fold(0.0, f64::max),
            post_projection_drift: dual_drift_norm(problem, &y_acc, &s_acc),
            inner_iterations: run.trajectory.iterations(),
            queries: row_queries,
            solve_converged: run.converged,
        });
    }

    let iterate = DualIterate::new(y_acc, s_acc, mu_acc)?;
    Ok(IrRunOutput {
        iterate,
        outer,
        total_queries,
        classical_ops,
        converged,
    })
}

/// Default basic/nonbasic cut for rounding a solve of accuracy `zeta`:
/// slacks above `sqrt(zeta)` are provably inactive once the gap is below
/// the square of the cut.
pub fn default_threshold(zeta: f64) -> f64 {
    zeta.sqrt()
}

#[derive(Clone, Debug)]
pub struct RoundedSolution<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub s: Vec<S>,
    pub partition: Partition,
}

impl<S: Scalar> RoundedSolution<S> {
    pub fn objective<'a>(&self, c: impl IntoIterator<Item = &'a S>) -> S {
        c.into_iter()
            .zip(&self.x)
            .fold(S::zero(), |acc, (ci, xi)| acc + ci.clone() * xi.clone())
    }
}

/// Snaps a high-accuracy dual iterate to an exact vertex solution.
///
/// Slacks above `threshold` are declared inactive (their primal coordinate
/// is zero); the remaining coordinates are solved from the basic equations
/// in a least-squares sense, the dual point is refit to the basic columns,
/// and the candidate triple is verified: primal feasibility, sign
/// conditions, complementarity, and zero slack on the basic set, all to the
/// backend's verification floor (square root of its unit roundoff). A
/// failed verification reports the attempted partition, which is the
/// actionable datum (threshold off, or the input not accurate enough).
pub fn round_to_optimal<S: Scalar>(
    problem: &LOProblem<S>,
    s: &[S],
    threshold: f64,
) -> Result<RoundedSolution<S>> {
    let (m, n) = (problem.m(), problem.n());
    if s.len() != n {
        return Err(Error::Dimension(format!(
            "slack has length {}, expected {n}",
            s.len()
        )));
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let cut = S::from_f64(threshold);
    let basic: Vec<usize> = (0..n).filter(|&i| !(s[i] > cut)).collect();
    let nonbasic: Vec<usize> = (0..n).filter(|&i| s[i] > cut).collect();
    let k = basic.len();
    let a = problem.a();
    let a_b = Matrix::from_fn(m, k, |i, j| a.at(i, basic[j]));
    let c_b: Vec<S> = basic.iter().map(|&j| problem.c()[j].clone()).collect();

    let fail = |reason: String| Error::RoundingFailed {
        reason,
        basic: basic.clone(),
        nonbasic: nonbasic.clone(),
    };

    // x_B from the basic equations, least squares through the smaller Gram
    let x_b: Vec<S> = if k == 0 {
        Vec::new()
    } else if k <= m {
        let gram = Matrix::from_fn(k, k, |i, j| {
            (0..m).fold(S::zero(), |acc, r| {
                acc + a_b.at(r, i) * a_b.at(r, j)
            })
        });
        let rhs = a_b.tr_matvec(problem.b());
        let lu = Lu::factor(&gram, "rounding basic columns")
            .map_err(|_| fail("basic columns are rank deficient".into()))?;
        lu.solve(&rhs)
    } else {
        let gram = Matrix::from_fn(m, m, |i, j| {
            (0..k).fold(S::zero(), |acc, r| {
                acc + a_b.at(i, r) * a_b.at(j, r)
            })
        });
        let lu = Lu::factor(&gram, "rounding basic rows")
            .map_err(|_| fail("basic rows are rank deficient".into()))?;
        let w = lu.solve(problem.b());
        a_b.tr_matvec(&w)
    };

    // dual refit to the basic columns
    let y_star: Vec<S> = if k == 0 {
        vec![S::zero(); m]
    } else if k >= m {
        let gram = Matrix::from_fn(m, m, |i, j| {
            (0..k).fold(S::zero(), |acc, r| {
                acc + a_b.at(i, r) * a_b.at(j, r)
            })
        });
        let rhs = a_b.matvec(&c_b);
        let lu = Lu::factor(&gram, "rounding dual refit")
            .map_err(|_| fail("basic rows are rank deficient".into()))?;
        lu.solve(&rhs)
    } else {
        let gram = Matrix::from_fn(k, k, |i, j| {
            (0..m).fold(S::zero(), |acc, r| {
                acc + a_b.at(r, i) * a_b.at(r, j)
            })
        });
        let lu = Lu::factor(&gram, "rounding dual refit")
            .map_err(|_| fail("basic columns are rank deficient".into()))?;
        let z = lu.solve(&c_b);
        a_b.matvec(&z)
    };

    let floor = S::epsilon().to_f64().sqrt();
    let scale = problem
        .b()
        .iter()
        .chain(problem.c())
        .fold(1.0f64, |acc, v| acc.max(v.to_f64().abs()));
    let tol = S::from_f64(floor * scale);

    let mut x = vec![S::zero(); n];
    for (&j, v) in basic.iter().zip(&x_b) {
        if *v < -tol.clone() {
            return Err(fail(format!("basic coordinate {j} is negative: {v:?}")));
        }
        x[j] = if v.abs() <= tol { S::zero() } else { v.clone() };
    }
    let mut s_star = problem.slack(&y_star);
    for &j in &basic {
        if s_star[j].abs() > tol {
            return Err(fail(format!(
                "slack {j} did not vanish on the basic set: {:?}",
                s_star[j]
            )));
        }
        s_star[j] = S::zero();
    }
    for &j in &nonbasic {
        if s_star[j] < -tol.clone() {
            return Err(fail(format!(
                "nonbasic slack {j} is negative: {:?}",
                s_star[j]
            )));
        }
    }
    let ax = a.matvec(&x);
    for (i, (lhs, rhs)) in ax.iter().zip(problem.b()).enumerate() {
        if (lhs.clone() - rhs.clone()).abs() > tol {
            return Err(fail(format!("primal equation {i} violated")));
        }
    }
    let gap = x
        .iter()
        .zip(&s_star)
        .fold(S::zero(), |acc, (xi, si)| acc + xi.clone() * si.clone());
    if gap.abs() > tol {
        return Err(fail(format!("complementarity gap {gap:?} did not vanish")));
    }

    Ok(RoundedSolution {
        x,
        y: y_star,
        s: s_star,
        partition: Partition { basic, nonbasic },
    })
}
