//! Interior point loops driven by the noisy solver.
//!
//! `run_dual` is the main algorithm: a short-step dual logarithmic-barrier
//! method that never touches a primal iterate. Each iteration solves the
//! dual Newton system inexactly, takes the full step, and multiplies the
//! barrier parameter by `1 - theta`; when the right-hand side is already
//! negligible the solve is skipped outright and only the barrier parameter
//! moves. Because the solves are inexact, the iterates drift off the exact
//! dual-feasible set; the drift is not an error but a measured quantity,
//! tracked per iteration in a [`PerturbationLedger`] and judged against
//! closed-form tolerances by [`check_error_conditions`].
//!
//! `run_ifqipm_oss` is the compact feasible primal-dual variant built on the
//! null-space form of the Newton system: its directions keep primal and dual
//! feasibility exactly regardless of how badly the inner solve is truncated,
//! which is the property the feasibility sweep pins down.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{self, norm2};
use crate::model::{
    complementarity_mu, exact_dual_newton_step, proximity, DualIterate, LOProblem,
    PrimalDualIterate,
};
use crate::newton::{build_augmented, build_oss, nullspace_basis, recover_dual_step,
    recover_oss_directions};
use crate::oracle::{Oracle, PreparedSystem};
use crate::refine::refine_prepared;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IPMConfig {
    /// Barrier reduction per step: `mu <- (1 - theta) mu`.
    pub theta: f64,
    /// Precision exponent of the inner solves, recorded for reporting; the
    /// operative tolerance is `inner_tol`.
    pub t: u32,
    /// Stop once `mu <= mu_stop`.
    pub mu_stop: f64,
    /// Centering parameter of the primal-dual variant, in (0, 1].
    pub beta: f64,
    pub max_outer: usize,
    /// Relative residual target for each inner solve.
    pub inner_tol: f64,
    /// Skip the solve entirely when the Newton right-hand side is at or
    /// below this norm; the barrier parameter still decreases.
    pub skip_tol: f64,
    /// Accept a start with proximity >= 1/2 (warn instead of failing).
    pub proceed_off_center: bool,
    /// When set, replace the refinement loop by exactly this many raw
    /// solver calls per Newton system, accepting the result unconditionally.
    /// Diagnostic knob: it lets gross oracle noise reach the iterates so the
    /// error-condition checker has something to flag.
    pub inner_passes: Option<usize>,
}

impl IPMConfig {
    /// Defaults for an n-column problem: `theta = 1/(4 sqrt(n))`, which is
    /// the short-step choice behind the square-root iteration growth.
    pub fn for_dimension(n: usize, mu_stop: f64) -> Self {
        IPMConfig {
            theta: 0.25 / (n as f64).sqrt(),
            t: 4,
            mu_stop,
            beta: 0.9,
            max_outer: 100_000,
            inner_tol: 1e-12,
            skip_tol: 1e-12,
            proceed_off_center: false,
            inner_passes: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if !(self.mu_stop > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mu_stop must be positive, got {}",
                self.mu_stop
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if !(self.inner_tol > 0.0) || !(self.skip_tol >= 0.0) {
            return Err(Error::InvalidConfig(
                "inner_tol must be positive and skip_tol nonnegative".into(),
            ));
        }
        if self.t == 0 || self.max_outer == 0 {
            return Err(Error::InvalidConfig(
                "t and max_outer must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Snapshot after one iteration. Row 0 is the start point. Diagnostic
/// fields are plain floats regardless of the scalar backend; `delta_est`
/// and `kappa_est` are 0 on skipped iterations (nothing was solved).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryRow {
    pub iteration: usize,
    /// Primal iterate; empty for the dual-only method.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub mu: f64,
    /// Proximity spent by this iteration's step, `||S^{-1} ds||`.
    pub delta_est: f64,
    /// Condition estimate of the system this iteration solved.
    pub kappa_est: f64,
    /// Queries charged by this iteration's solve.
    pub queries: u64,
    pub skipped: bool,
    pub solve_converged: bool,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    pub fn total_queries(&self) -> u64 {
        self.rows
            .iter()
            .fold(0u64, |acc, r| acc.saturating_add(r.queries))
    }

    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn final_mu(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.mu)
    }
}

/// Measured dual-feasibility drift after one iteration. `r` is recomputed
/// from scratch as `A'y + s - c`; `xi` is the increment contributed by this
/// iteration's step, `A' dy + ds`; `running_error` is the distance between
/// the scratch value and the accumulated sum of increments, which the
/// telescoping identity says should be rounding-level.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LedgerRow {
    pub iteration: usize,
    pub r: Vec<f64>,
    pub r_norm: f64,
    pub xi: Vec<f64>,
    pub xi_norm: f64,
    /// Norm of the Newton right-hand side this iteration faced. The inner
    /// solve certifies a residual relative to this, so it is the scale
    /// against which `xi_norm` should be judged.
    pub rhs_norm: f64,
    pub running_error: f64,
    pub skipped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PerturbationLedger {
    pub rows: Vec<LedgerRow>,
}

impl PerturbationLedger {
    pub fn max_running_error(&self) -> f64 {
        self.rows.iter().map(|r| r.running_error).fold(0.0, f64::max)
    }

    pub fn final_r_norm(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.r_norm)
    }
}

#[derive(Clone, Debug)]
pub struct DualRunOutput<S> {
    pub iterate: DualIterate<S>,
    pub trajectory: Trajectory,
    pub ledger: PerturbationLedger,
    /// True when the loop exited because `mu <= mu_stop`; false means the
    /// iteration cap ran out first.
    pub converged: bool,
}

impl<S: Scalar> DualRunOutput<S> {
    /// Complementarity certificate `mu * n` at the final iterate.
    pub fn gap_certificate(&self) -> f64 {
        self.iterate.mu.to_f64() * self.iterate.s.len() as f64
    }
}

fn dual_drift<S: Scalar>(problem: &LOProblem<S>, y: &[S], s: &[S]) -> Vec<S> {
    let mut r = problem.a().tr_matvec(y);
    for ((ri, si), ci) in r.iter_mut().zip(s).zip(problem.c()) {
        *ri += si.clone() - ci.clone();
    }
    r
}

fn to_f64_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Inner solve used by `run_dual`: either full refinement to `inner_tol`,
/// or a fixed number of raw solver passes when `inner_passes` is set.
/// Returns the solution, queries charged, and whether the residual target
/// was certified.
fn inner_solve<S: Scalar>(
    system: &PreparedSystem<S>,
    rhs: &[S],
    config: &IPMConfig,
    oracle: &mut Oracle,
) -> Result<(Vec<S>, u64, bool)> {
    match config.inner_passes {
        None => {
            let out = refine_prepared(system, rhs, config.inner_tol, oracle, None)?;
            Ok((out.z, out.queries, out.trace.converged))
        }
        Some(passes) => {
            let mut z = vec![S::zero(); rhs.len()];
            let mut queries = 0u64;
            for pass in 0..passes {
                let r: Vec<S> = if pass == 0 {
                    rhs.to_vec()
                } else {
                    let mz = system.apply(&z);
                    rhs.iter()
                        .zip(&mz)
                        .map(|(a, b)| a.clone() - b.clone())
                        .collect()
                };
                if !(norm2(&r) > S::zero()) {
                    break;
                }
                let est = oracle.estimate_direction(system, &r)?;
                for (zi, ui) in z.iter_mut().zip(&est.unit_dir) {
                    *zi += est.norm_solution.clone() * ui.clone();
                }
                queries = queries.saturating_add(est.queries_charged);
            }
            Ok((z, queries, false))
        }
    }
}

/// Dual logarithmic-barrier method with inexact solves and the small-rhs
/// skip rule.
///
/// Loops while `mu > mu_stop`: build the dual Newton system at `(s, mu)`;
/// if its right-hand side has norm at or below `skip_tol`, charge nothing
/// and only decay `mu`; otherwise solve it inexactly, apply the full step
/// `y += dy`, `s += S^2 ds_hat`, and decay `mu`. Slack positivity after a
/// step is guaranteed by short-step theory when the start is proximal and
/// tolerances are sane, so losing it is a hard error naming the iteration
/// rather than a fallback.
pub fn run_dual<S: Scalar>(
    problem: &LOProblem<S>,
    start: &DualIterate<S>,
    config: &IPMConfig,
    oracle: &mut Oracle,
) -> Result<DualRunOutput<S>> {
    config.validate()?;
    let n = problem.n();
    if start.s.len() != n || start.y.len() != problem.m() {
        return Err(Error::Dimension(format!(
            "start iterate sized ({}, {}), problem needs ({}, {n})",
            start.y.len(),
            start.s.len(),
            problem.m()
        )));
    }
    let delta0 = proximity(problem, &start.s, &start.mu)?.to_f64();
    if delta0 >= 0.5 {
        if config.proceed_off_center {
            eprintln!(
                "warning: start proximity {delta0:.3} is outside the short-step region (< 0.5); \
                 positivity of the iterates is no longer guaranteed"
            );
        } else {
            return Err(Error::CenteringFailed { best_delta: delta0 });
        }
    }

    let clock = Instant::now();
    let mut y = start.y.clone();
    let mut s = start.s.clone();
    let mut mu = start.mu.clone();
    let decay = S::one() - S::from_f64(config.theta);
    let mu_stop = S::from_f64(config.mu_stop);
    let skip_tol = S::from_f64(config.skip_tol);

    let mut running_r = dual_drift(problem, &y, &s);
    let mut trajectory = Trajectory::default();
    let mut ledger = PerturbationLedger::default();
    trajectory.rows.push(TrajectoryRow {
        iteration: 0,
        x: Vec::new(),
        y: to_f64_vec(&y),
        s: to_f64_vec(&s),
        mu: mu.to_f64(),
        delta_est: delta0,
        kappa_est: 0.0,
        queries: 0,
        skipped: false,
        solve_converged: true,
        wall_ms: clock.elapsed().as_secs_f64() * 1e3,
    });
    ledger.rows.push(LedgerRow {
        iteration: 0,
        r: to_f64_vec(&running_r),
        r_norm: norm2(&running_r).to_f64(),
        xi: vec![0.0; n],
        xi_norm: 0.0,
        rhs_norm: 0.0,
        running_error: 0.0,
        skipped: false,
    });

    let mut iteration = 0usize;
    let mut converged = true;
    while mu > mu_stop {
        if iteration >= config.max_outer {
            converged = false;
            break;
        }
        iteration += 1;

        let aug = build_augmented(problem, &s, &mu)?;
        let rhs_norm = norm2(&aug.rhs);
        let (delta_est, kappa_est, queries, skipped, solve_converged, xi) =
            if !(rhs_norm > skip_tol) {
                (0.0, 0.0, 0, true, true, vec![S::zero(); n])
            } else {
                // Symmetric equilibration of the slack block: coordinates
                // with slack above one are scaled down to unit size, which
                // keeps the presented matrix's condition number bounded even
                // when some slacks are huge (as in rescaled refinement
                // subproblems, where they reach the magnification factor).
                // The slack block of the rhs is zero, so the rhs is
                // unchanged, and the solution maps back exactly through the
                // same diagonal.
                let p = n + problem.m();
                let scale: Vec<S> = s
                    .iter()
                    .map(|si| si.clone().max_with(S::one()).recip())
                    .collect();
                let mut matrix = aug.matrix;
                for i in 0..p {
                    for j in 0..p {
                        let mut v = matrix.at(i, j);
                        if i < n {
                            v = v * scale[i].clone();
                        }
                        if j < n {
                            v = v * scale[j].clone();
                        }
                        matrix[(i, j)] = v;
                    }
                }
                let system = PreparedSystem::new(matrix, "dual Newton solve")?;
                let (sol, queries, solve_converged) =
                    inner_solve(&system, &aug.rhs, config, oracle)?;
                let dshat: Vec<S> = sol[..n]
                    .iter()
                    .zip(&scale)
                    .map(|(z, e)| z.clone() * e.clone())
                    .collect();
                let ds = recover_dual_step(&dshat, &s);
                let dy = &sol[n..];
                // proximity spent by this step, measured against the
                // pre-step slack
                let delta_est = {
                    let scaled: Vec<S> = ds
                        .iter()
                        .zip(&s)
                        .map(|(d, si)| d.clone() / si.clone())
                        .collect();
                    norm2(&scaled).to_f64()
                };
                let mut xi = problem.a().tr_matvec(dy);
                for (xii, di) in xi.iter_mut().zip(&ds) {
                    *xii += di.clone();
                }
                for (yi, di) in y.iter_mut().zip(dy) {
                    *yi += di.clone();
                }
                for (si, di) in s.iter_mut().zip(&ds) {
                    *si += di.clone();
                }
                if !s.iter().all(|v| *v > S::zero()) {
                    return Err(Error::PositivityLoss { iteration });
                }
                (delta_est, system.kappa_est(), queries, false, solve_converged, xi)
            };
        mu = mu * decay.clone();

        for (acc, inc) in running_r.iter_mut().zip(&xi) {
            *acc += inc.clone();
        }
        let scratch = dual_drift(problem, &y, &s);
        let running_error = {
            let diff: Vec<S> = scratch
                .iter()
                .zip(&running_r)
                .map(|(a, b)| a.clone() - b.clone())
                .collect();
            norm2(&diff).to_f64()
        };
        ledger.rows.push(LedgerRow {
            iteration,
            r: to_f64_vec(&scratch),
            r_norm: norm2(&scratch).to_f64(),
            xi: to_f64_vec(&xi),
            xi_norm: norm2(&xi).to_f64(),
            rhs_norm: rhs_norm.to_f64(),
            running_error,
            skipped,
        });
        trajectory.rows.push(TrajectoryRow {
            iteration,
            x: Vec::new(),
            y: to_f64_vec(&y),
            s: to_f64_vec(&s),
            mu: mu.to_f64(),
            delta_est,
            kappa_est,
            queries,
            skipped,
            solve_converged,
            wall_ms: clock.elapsed().as_secs_f64() * 1e3,
        });
    }

    Ok(DualRunOutput {
        iterate: DualIterate::new(y, s, mu)?,
        trajectory,
        ledger,
        converged,
    })
}

#[derive(Clone, Debug)]
pub struct OssRunOutput<S> {
    pub iterate: PrimalDualIterate<S>,
    pub trajectory: Trajectory,
    pub converged: bool,
}

impl<S: Scalar> OssRunOutput<S> {
    /// Complementarity gap `x' s` at the final iterate.
    pub fn gap_certificate(&self) -> f64 {
        self.iterate
            .x
            .iter()
            .zip(&self.iterate.s)
            .map(|(x, s)| x.clone() * s.clone())
            .fold(S::zero(), |acc, v| acc + v)
            .to_f64()
    }
}

fn feasibility_error<S: Scalar>(
    problem: &LOProblem<S>,
    iterate: &PrimalDualIterate<S>,
) -> (f64, f64) {
    let ax = problem.a().matvec(&iterate.x);
    let primal: Vec<S> = ax
        .iter()
        .zip(problem.b())
        .map(|(a, b)| a.clone() - b.clone())
        .collect();
    let dual = dual_drift(problem, &iterate.y, &iterate.s);
    (norm2(&primal).to_f64(), norm2(&dual).to_f64())
}

/// Feasible primal-dual method on the null-space form of the Newton system.
///
/// Steps are damped by the standard fraction-to-boundary rule with factor
/// 0.99 and the complementarity measure plays the role of `mu`. Because the
/// recovered directions satisfy `A dx = 0` and `A' dy + ds = 0` identically,
/// primal and dual feasibility of the start are preserved no matter how
/// inexact the solves are.
pub fn run_ifqipm_oss<S: Scalar>(
    problem: &LOProblem<S>,
    start: &PrimalDualIterate<S>,
    config: &IPMConfig,
    oracle: &mut Oracle,
) -> Result<OssRunOutput<S>> {
    config.validate()?;
    let (m, n) = (problem.m(), problem.n());
    if start.x.len() != n || start.s.len() != n || start.y.len() != m {
        return Err(Error::Dimension(
            "start iterate does not match problem dimensions".into(),
        ));
    }
    if !start.is_interior() {
        return Err(Error::InfeasibleStart(
            "primal or slack component is not strictly positive".into(),
        ));
    }
    let (primal_err, dual_err) = feasibility_error(problem, start);
    let b_scale = 1.0 + norm2(problem.b()).to_f64();
    let c_scale = 1.0 + norm2(problem.c()).to_f64();
    if primal_err > 1e-10 * b_scale || dual_err > 1e-10 * c_scale {
        return Err(Error::InfeasibleStart(format!(
            "primal residual {primal_err:.3e}, dual residual {dual_err:.3e} exceed 1e-10"
        )));
    }

    let clock = Instant::now();
    let basis = nullspace_basis(problem.a())?;
    let beta = S::from_f64(config.beta);
    let damping = S::from_f64(0.99);
    let mu_stop = S::from_f64(config.mu_stop);

    let mut x = start.x.clone();
    let mut y = start.y.clone();
    let mut s = start.s.clone();
    let mut mu = complementarity_mu(&x, &s)?;

    let center_distance = |x: &[S], s: &[S], mu: &S| -> f64 {
        let dev: Vec<S> = x
            .iter()
            .zip(s)
            .map(|(xi, si)| xi.clone() * si.clone() / mu.clone() - S::one())
            .collect();
        norm2(&dev).to_f64()
    };

    let mut trajectory = Trajectory::default();
    trajectory.rows.push(TrajectoryRow {
        iteration: 0,
        x: to_f64_vec(&x),
        y: to_f64_vec(&y),
        s: to_f64_vec(&s),
        mu: mu.to_f64(),
        delta_est: center_distance(&x, &s, &mu),
        kappa_est: 0.0,
        queries: 0,
        skipped: false,
        solve_converged: true,
        wall_ms: clock.elapsed().as_secs_f64() * 1e3,
    });

    let mut iteration = 0usize;
    let mut converged = true;
    while mu > mu_stop {
        if iteration >= config.max_outer {
            converged = false;
            break;
        }
        iteration += 1;

        let oss = build_oss(problem, &x, &s, &mu, &beta, &basis)?;
        let system = PreparedSystem::new(oss.matrix, "null-space Newton solve")?;
        let out = refine_prepared(&system, &oss.rhs, config.inner_tol, oracle, None)?;
        let dy = &out.z[..m];
        let lambda = &out.z[m..];
        let (dx, ds) = recover_oss_directions(dy, lambda, &basis, problem.a());

        // fraction-to-boundary damping
        let mut alpha = S::one();
        for (v, d) in x.iter().zip(&dx).chain(s.iter().zip(&ds)) {
            if *d < S::zero() {
                let limit = damping.clone() * (-(v.clone() / d.clone()));
                if limit < alpha {
                    alpha = limit;
                }
            }
        }
        let step_size = norm2(&dx).to_f64().max(norm2(&ds).to_f64());
        if step_size == 0.0 {
            trajectory.rows.push(TrajectoryRow {
                iteration,
                x: to_f64_vec(&x),
                y: to_f64_vec(&y),
                s: to_f64_vec(&s),
                mu: mu.to_f64(),
                delta_est: center_distance(&x, &s, &mu),
                kappa_est: system.kappa_est(),
                queries: out.queries,
                skipped: false,
                solve_converged: out.trace.converged,
                wall_ms: clock.elapsed().as_secs_f64() * 1e3,
            });
            converged = !(mu > mu_stop);
            break;
        }

        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += alpha.clone() * di.clone();
        }
        for (yi, di) in y.iter_mut().zip(dy) {
            *yi += alpha.clone() * di.clone();
        }
        for (si, di) in s.iter_mut().zip(&ds) {
            *si += alpha.clone() * di.clone();
        }
        if !(x.iter().all(|v| *v > S::zero()) && s.iter().all(|v| *v > S::zero())) {
            return Err(Error::PositivityLoss { iteration });
        }
        mu = complementarity_mu(&x, &s)?;

        trajectory.rows.push(TrajectoryRow {
            iteration,
            x: to_f64_vec(&x),
            y: to_f64_vec(&y),
            s: to_f64_vec(&s),
            mu: mu.to_f64(),
            delta_est: center_distance(&x, &s, &mu),
            kappa_est: system.kappa_est(),
            queries: out.queries,
            skipped: false,
            solve_converged: out.trace.converged,
            wall_ms: clock.elapsed().as_secs_f64() * 1e3,
        });
    }

    Ok(OssRunOutput {
        iterate: PrimalDualIterate { x, y, s },
        trajectory,
        converged,
    })
}

/// One iteration's error-condition evaluation. The three left-hand sides
/// are the diagonal-matrix norms that must stay under their bounds for the
/// drifted iterates to keep behaving like iterates of a nearby exact
/// problem: with `rho_i = s_i / (s_i + r_i)`,
/// `lhs_gram = max |rho_i (1 - rho_i)|` and `lhs_square = max |1 - rho_i^2|`
/// measure how far the perturbed slack is from the true one, and
/// `lhs_residual = ||diag(s + r)^{-1} xi||` measures the step's own solve
/// error. Bounds: `0.033 * delta_tilde`, `0.033`, `0.033 * delta_tilde`,
/// where `delta_tilde` is the proximity of the perturbed iterate.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConditionRow {
    pub iteration: usize,
    pub lhs_gram: f64,
    pub lhs_square: f64,
    pub lhs_residual: f64,
    /// Proximity of the drift-corrected slack; -1 when not computable
    /// (nonpositive perturbed slack or singular system).
    pub delta_tilde: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConditionReport {
    pub rows: Vec<ConditionRow>,
    pub all_satisfied: bool,
}

const CONDITION_BOUND: f64 = 0.033;

/// Evaluates the perturbation tolerances against an instrumented run.
/// Diagnostic only: rows report values, nothing aborts.
pub fn check_error_conditions<S: Scalar>(
    problem: &LOProblem<S>,
    trajectory: &Trajectory,
    ledger: &PerturbationLedger,
) -> ConditionReport {
    let problem_f = problem.convert::<f64>();
    let mut rows = Vec::new();
    let count = trajectory.rows.len().min(ledger.rows.len());
    for k in 1..count {
        let traj = &trajectory.rows[k];
        let led = &ledger.rows[k];
        debug_assert_eq!(traj.iteration, led.iteration);
        let s = &traj.s;
        let s_tilde: Vec<f64> = s.iter().zip(&led.r).map(|(si, ri)| si + ri).collect();
        if s_tilde.iter().any(|v| !(*v > 0.0)) {
            rows.push(ConditionRow {
                iteration: traj.iteration,
                lhs_gram: f64::MAX,
                lhs_square: f64::MAX,
                lhs_residual: f64::MAX,
                delta_tilde: -1.0,
                satisfied: false,
            });
            continue;
        }
        let mut lhs_gram = 0.0f64;
        let mut lhs_square = 0.0f64;
        for (si, ti) in s.iter().zip(&s_tilde) {
            let rho = si / ti;
            lhs_gram = lhs_gram.max((rho * (1.0 - rho)).abs());
            lhs_square = lhs_square.max((1.0 - rho * rho).abs());
        }
        let lhs_residual = {
            let scaled: Vec<f64> = led
                .xi
                .iter()
                .zip(&s_tilde)
                .map(|(xi, ti)| xi / ti)
                .collect();
            norm2(&scaled)
        };
        let delta_tilde = match proximity(&problem_f, &s_tilde, &traj.mu) {
            Ok(d) => d,
            Err(_) => {
                rows.push(ConditionRow {
                    iteration: traj.iteration,
                    lhs_gram,
                    lhs_square,
                    lhs_residual,
                    delta_tilde: -1.0,
                    satisfied: false,
                });
                continue;
            }
        };
        let satisfied = lhs_gram <= CONDITION_BOUND * delta_tilde
            && lhs_square <= CONDITION_BOUND
            && lhs_residual <= CONDITION_BOUND * delta_tilde;
        rows.push(ConditionRow {
            iteration: traj.iteration,
            lhs_gram,
            lhs_square,
            lhs_residual,
            delta_tilde,
            satisfied,
        });
    }
    let all_satisfied = rows.iter().all(|r| r.satisfied);
    ConditionReport {
        rows,
        all_satisfied,
    }
}

/// Finds a barrier parameter making a fixed slack vector proximal: golden
/// section search on `log mu` of the proximity measure, which is unimodal
/// there because the Newton step is affine in `1/mu`. Fails when even the
/// best value has proximity at or above 1/2.
pub fn center_dual_start<S: Scalar>(problem: &LOProblem<S>, s: &[S]) -> Result<(S, f64)> {
    let problem_f = problem.convert::<f64>();
    let s_f = to_f64_vec(s);
    if !s_f.iter().all(|v| *v > 0.0) {
        return Err(Error::NotStrictlyPositive { what: "slack s" });
    }

    // seed: least-squares fit of 1/mu in the Newton right-hand side
    let a_sinv: Vec<f64> = {
        let inv: Vec<f64> = s_f.iter().map(|v| 1.0 / v).collect();
        problem_f.a().matvec(&inv)
    };
    let b = problem_f.b();
    let btb = linalg::dot(b, b);
    let guess = {
        let inv_mu = linalg::dot(b, &a_sinv) / btb;
        if inv_mu > 0.0 {
            1.0 / inv_mu
        } else {
            1.0
        }
    };

    let eval = |log_mu: f64| -> f64 {
        let mu = log_mu.exp();
        proximity(&problem_f, &s_f, &mu).unwrap_or(f64::INFINITY)
    };
    let (mut lo, mut hi) = (guess.ln() - 10.0, guess.ln() + 10.0);
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut p1 = hi - gr * (hi - lo);
    let mut p2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (eval(p1), eval(p2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = p2;
            p2 = p1;
            f2 = f1;
            p1 = hi - gr * (hi - lo);
            f1 = eval(p1);
        } else {
            lo = p1;
            p1 = p2;
            f1 = f2;
            p2 = lo + gr * (hi - lo);
            f2 = eval(p2);
        }
    }
    let (best_log, best_delta) = if f1 <= f2 { (p1, f1) } else { (p2, f2) };
    if !(best_delta < 0.5) {
        return Err(Error::CenteringFailed { best_delta });
    }
    Ok((S::from_f64(best_log.exp()), best_delta))
}

/// Interior dual start for an instance with no designated start point:
/// `y = 0` needs strictly positive costs; the barrier parameter is then
/// searched, and failing that the iterate itself is centered at the mean
/// slack.
pub fn interior_dual_start<S: Scalar>(problem: &LOProblem<S>) -> Result<DualIterate<S>> {
    let s0 = problem.c().to_vec();
    if !s0.iter().all(|v| *v > S::zero()) {
        return Err(Error::InfeasibleStart(
            "y = 0 is not strictly dual feasible (a cost entry is nonpositive); \
             provide a strictly positive cost vector"
                .into(),
        ));
    }
    let y0 = vec![S::zero(); problem.m()];
    if let Ok((mu, _)) = center_dual_start(problem, &s0) {
        return DualIterate::new(y0, s0, mu);
    }
    let mean = s0.iter().fold(S::zero(), |acc, v| acc + v.clone())
        / S::from_f64(problem.n() as f64);
    let raw = DualIterate::new(y0, s0, mean)?;
    let (centered, _) = center_dual_iterate(problem, &raw, 0.3, 500)?;
    Ok(centered)
}

/// Damped Newton centering at fixed `mu`: moves the whole iterate (not just
/// `mu`) until the proximity measure drops to `target`. The measure equals
/// the Newton decrement of the dual barrier, so the damped step length
/// `1/(1 + delta)` both keeps the slack strictly positive (the scaled step
/// has norm below one) and decreases the barrier by a fixed amount; full
/// steps take over inside the quadratic region. Use this to admit starts
/// that are interior but far from the central path at every `mu`.
pub fn center_dual_iterate<S: Scalar>(
    problem: &LOProblem<S>,
    start: &DualIterate<S>,
    target: f64,
    max_steps: usize,
) -> Result<(DualIterate<S>, f64)> {
    if !(0.0 < target && target < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "centering target must lie in (0, 1), got {target}"
        )));
    }
    let mut y = start.y.clone();
    let mut s = start.s.clone();
    let mut best_delta = f64::INFINITY;
    for _ in 0..=max_steps {
        let (dy, ds) = exact_dual_newton_step(problem, &s, &start.mu)?;
        let scaled: Vec<S> = ds
            .iter()
            .zip(&s)
            .map(|(d, si)| d.clone() / si.clone())
            .collect();
        let delta = norm2(&scaled).to_f64();
        best_delta = best_delta.min(delta);
        if delta <= target {
            let iterate = DualIterate::new(y, s, start.mu.clone())?;
            return Ok((iterate, delta));
        }
        let alpha = if delta < 0.5 {
            S::one()
        } else {
            S::from_f64(1.0 / (1.0 + delta))
        };
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += alpha.clone() * di.clone();
        }
        for (si, di) in s.iter_mut().zip(&ds) {
            *si += alpha.clone() * di.clone();
        }
    }
    Err(Error::CenteringFailed { best_delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::generate::generate_centered_instance;
    use crate::oracle::{Backend, OracleConfig};

    fn tiny_problem() -> LOProblem<f64> {
        LOProblem::new(
            Matrix::from_rows_f64(&[vec![1.0, 1.0]]),
            vec![1.0],
            vec![1.0, 2.0],
            "tiny",
        )
        .unwrap()
    }

    fn oracle(backend: Backend, seed: u64, eps: f64) -> Oracle {
        Oracle::new(OracleConfig {
            epsilon_direction: eps,
            epsilon_norm: eps,
            backend,
            seed,
        })
        .unwrap()
    }

    fn tiny_config(theta: f64, mu_stop: f64) -> IPMConfig {
        IPMConfig {
            theta,
            ..IPMConfig::for_dimension(2, mu_stop)
        }
    }

    #[test]
    fn test_config_validation() {
        let mut c = IPMConfig::for_dimension(4, 1e-8);
        assert!(c.validate().is_ok());
        c.theta = 1.0;
        assert!(c.validate().is_err());
        c.theta = 0.1;
        c.beta = 0.0;
        assert!(c.validate().is_err());
        c.beta = 1.0;
        assert!(c.validate().is_ok());
        c.mu_stop = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn test_mu_schedule_is_exact_product() {
        let (p, start) = generate_centered_instance::<f64>(8, 3, 1.0, 7).unwrap();
        let config = IPMConfig::for_dimension(8, 1e-6);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        assert!(out.converged);
        let factor = 1.0 - config.theta;
        let mut reference = 1.0f64;
        for (k, row) in out.trajectory.rows.iter().enumerate() {
            assert_eq!(row.iteration, k);
            assert_eq!(row.mu, reference, "row {k}");
            reference *= factor;
        }
        assert!(out.iterate.mu <= 1e-6);
        assert!(out.gap_certificate() <= 8.0 * 1e-6);
    }

    #[test]
    fn test_centered_start_first_iteration_skips() {
        let (p, start) = generate_centered_instance::<f64>(6, 2, 1.0, 3).unwrap();
        let config = IPMConfig::for_dimension(6, 0.5);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        let rows = &out.trajectory.rows;
        assert!(rows.len() >= 3);
        assert!(rows[1].skipped, "first step from an exact center is a skip");
        assert_eq!(rows[1].queries, 0);
        assert!(!rows[2].skipped, "mu moved, the rhs is no longer zero");
        assert!(rows[2].queries > 0);
        // skipped iteration still decayed mu
        let factor = 1.0 - config.theta;
        assert_eq!(rows[1].mu, rows[0].mu * factor);
    }

    #[test]
    fn test_tiny_lp_converges_to_dual_optimum() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.7).unwrap();
        let config = tiny_config(0.2, 1e-8);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        assert!(out.converged);
        assert!(out.gap_certificate() <= 2e-8);
        // optimum y* = 1 with value b'y = 1
        assert!(
            (out.iterate.y[0] - 1.0).abs() <= 2e-8,
            "objective gap {}",
            (out.iterate.y[0] - 1.0).abs()
        );
        assert!(out.iterate.s[0] > 0.0 && out.iterate.s[1] > 0.0);
    }

    #[test]
    fn test_off_center_start_rejected_without_flag() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.05).unwrap();
        let config = tiny_config(0.2, 1e-8);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        match run_dual(&p, &start, &config, &mut orc) {
            Err(Error::CenteringFailed { best_delta }) => assert!(best_delta >= 0.5),
            other => panic!("expected CenteringFailed, got {other:?}"),
        }
    }

    #[test]
    fn test_positivity_loss_names_iteration() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.05).unwrap();
        let config = IPMConfig {
            proceed_off_center: true,
            ..tiny_config(0.2, 1e-8)
        };
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        match run_dual(&p, &start, &config, &mut orc) {
            Err(Error::PositivityLoss { iteration }) => assert_eq!(iteration, 1),
            other => panic!("expected PositivityLoss, got {other:?}"),
        }
    }

    #[test]
    fn test_max_outer_reports_unconverged() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.7).unwrap();
        let config = IPMConfig {
            max_outer: 3,
            ..tiny_config(0.2, 1e-8)
        };
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        assert!(!out.converged);
        assert_eq!(out.trajectory.iterations(), 3);
    }

    #[test]
    fn test_ledger_identity_and_bounded_drift() {
        for seed in 0..5u64 {
            let (p, start) = generate_centered_instance::<f64>(8, 3, 1.0, seed).unwrap();
            let config = IPMConfig::for_dimension(8, 1e-5);
            let mut orc = oracle(Backend::Perturbed, seed, 1e-2);
            let out = run_dual(&p, &start, &config, &mut orc).unwrap();
            assert!(out.converged);
            let c_scale = 1.0 + norm2(p.c());
            assert!(
                out.ledger.max_running_error() <= 1e-12 * c_scale,
                "seed {seed}: running error {}",
                out.ledger.max_running_error()
            );
            // each certified solve leaves a drift increment no larger than
            // the relative residual target times the rhs scale it faced
            let mut budget = 1e-12 * c_scale;
            for (led, traj) in out.ledger.rows.iter().zip(&out.trajectory.rows).skip(1) {
                if led.skipped {
                    assert_eq!(led.xi_norm, 0.0, "seed {seed}: skip must not drift");
                    continue;
                }
                let allowed = 2.0 * config.inner_tol * led.rhs_norm.max(1.0);
                if traj.solve_converged {
                    assert!(
                        led.xi_norm <= allowed,
                        "seed {seed} iter {}: drift {} exceeds {allowed}",
                        led.iteration,
                        led.xi_norm
                    );
                }
                budget += allowed;
            }
            // the telescoped total stays within the summed increments
            assert!(
                out.ledger.final_r_norm() <= budget,
                "seed {seed}: final drift {} exceeds budget {budget}",
                out.ledger.final_r_norm()
            );
        }
    }

    #[test]
    fn test_skip_rows_charge_nothing_and_drift_nothing() {
        let (p, start) = generate_centered_instance::<f64>(6, 2, 1.0, 11).unwrap();
        let config = IPMConfig::for_dimension(6, 1e-4);
        let mut orc = oracle(Backend::Perturbed, 1, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        let skipped: Vec<usize> = out
            .trajectory
            .rows
            .iter()
            .filter(|r| r.skipped)
            .map(|r| r.iteration)
            .collect();
        assert!(!skipped.is_empty(), "centered start must produce a skip");
        for k in skipped {
            assert_eq!(out.trajectory.rows[k].queries, 0);
            assert_eq!(out.ledger.rows[k].xi_norm, 0.0);
        }
    }

    #[test]
    fn test_oss_first_step_matches_hand_values() {
        // two-variable problem whose first null-space step solves a 2x2
        // system by hand: dy = 0.1, dx = (-0.45, 0.45), ds = (-0.1, -0.1)
        let p = LOProblem::new(
            Matrix::from_rows_f64(&[vec![1.0, 1.0]]),
            vec![3.0],
            vec![1.0, 1.0],
            "oss-hand",
        )
        .unwrap();
        let start = PrimalDualIterate {
            x: vec![2.0, 1.0],
            y: vec![0.0],
            s: vec![1.0, 1.0],
        };
        let config = IPMConfig {
            max_outer: 1,
            ..IPMConfig::for_dimension(2, 1e-8)
        };
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_ifqipm_oss(&p, &start, &config, &mut orc).unwrap();
        assert!(!out.converged);
        let row = &out.trajectory.rows[1];
        assert!((row.y[0] - 0.1).abs() < 1e-10);
        assert!((row.x[0] - 1.55).abs() < 1e-10);
        assert!((row.x[1] - 1.45).abs() < 1e-10);
        assert!((row.s[0] - 0.9).abs() < 1e-10);
        assert!((row.s[1] - 0.9).abs() < 1e-10);
        assert!((row.mu - (1.55 * 0.9 + 1.45 * 0.9) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn test_oss_centered_beta_one_takes_zero_step() {
        let p = LOProblem::new(
            Matrix::from_rows_f64(&[vec![1.0, 1.0]]),
            vec![3.0],
            vec![1.0, 1.0],
            "oss-centered",
        )
        .unwrap();
        let start = PrimalDualIterate {
            x: vec![1.5, 1.5],
            y: vec![0.0],
            s: vec![1.0, 1.0],
        };
        let config = IPMConfig {
            beta: 1.0,
            max_outer: 5,
            ..IPMConfig::for_dimension(2, 1e-8)
        };
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_ifqipm_oss(&p, &start, &config, &mut orc).unwrap();
        assert!(!out.converged, "mu cannot move when beta = 1");
        assert_eq!(out.trajectory.iterations(), 1);
        let row = &out.trajectory.rows[1];
        assert_eq!(row.mu, out.trajectory.rows[0].mu, "mu unchanged");
        assert_eq!(row.x, out.trajectory.rows[0].x, "zero step");
    }

    #[test]
    fn test_oss_converges_and_stays_feasible_under_gross_noise() {
        let (p, start) = generate_centered_instance::<f64>(8, 3, 1.0, 5).unwrap();
        let x0 = crate::model::primal_estimate(&start.s, &start.mu);
        let pd = PrimalDualIterate {
            x: x0,
            y: start.y.clone(),
            s: start.s.clone(),
        };
        let config = IPMConfig::for_dimension(8, 1e-6);
        let mut orc = oracle(Backend::Perturbed, 9, 0.1);
        let out = run_ifqipm_oss(&p, &pd, &config, &mut orc).unwrap();
        assert!(out.converged);
        let b_scale = 1.0 + norm2(p.b());
        let c_scale = 1.0 + norm2(p.c());
        for row in &out.trajectory.rows {
            let it = PrimalDualIterate {
                x: row.x.clone(),
                y: row.y.clone(),
                s: row.s.clone(),
            };
            let (pe, de) = feasibility_error(&p, &it);
            assert!(pe <= 1e-10 * b_scale, "iter {}: primal {pe}", row.iteration);
            assert!(de <= 1e-10 * c_scale, "iter {}: dual {de}", row.iteration);
        }
    }

    #[test]
    fn test_oss_rejects_infeasible_start() {
        let p = tiny_problem();
        let start = PrimalDualIterate {
            x: vec![1.0, 1.0], // A x = 2 != 1
            y: vec![0.0],
            s: vec![1.0, 2.0],
        };
        let config = IPMConfig::for_dimension(2, 1e-8);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        assert!(matches!(
            run_ifqipm_oss(&p, &start, &config, &mut orc),
            Err(Error::InfeasibleStart(_))
        ));
    }

    #[test]
    fn test_conditions_exact_backend_near_zero() {
        // shallow run: slacks stay order one, so rounding-level drift is
        // not inflated by division through a vanishing slack
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.7).unwrap();
        let config = tiny_config(0.2, 0.3);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        let report = check_error_conditions(&p, &out.trajectory, &out.ledger);
        assert!(report.rows.len() >= 3);
        assert!(report.all_satisfied);
        for row in &report.rows {
            assert!(row.lhs_gram <= 1e-12, "iter {}: {}", row.iteration, row.lhs_gram);
            assert!(row.lhs_square <= 1e-12);
            assert!(row.lhs_residual <= 1e-12);
        }
    }

    #[test]
    fn test_conditions_hold_with_tight_noise() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.7).unwrap();
        let config = IPMConfig {
            inner_tol: 1e-10,
            ..tiny_config(0.2, 1e-6)
        };
        let mut orc = oracle(Backend::Perturbed, 4, 1e-8);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        let report = check_error_conditions(&p, &out.trajectory, &out.ledger);
        assert!(report.all_satisfied, "rows: {:?}", report.rows.iter().filter(|r| !r.satisfied).collect::<Vec<_>>());
    }

    #[test]
    fn test_conditions_flag_gross_noise() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 0.7).unwrap();
        let config = IPMConfig {
            inner_passes: Some(1),
            max_outer: 5,
            mu_stop: 0.3,
            ..tiny_config(0.2, 0.3)
        };
        let mut orc = oracle(Backend::Perturbed, 2, 0.5);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        let report = check_error_conditions(&p, &out.trajectory, &out.ledger);
        assert!(
            !report.all_satisfied,
            "gross noise must violate at least one condition: {:?}",
            report.rows
        );
    }

    #[test]
    fn test_center_dual_start_finds_proximal_mu() {
        let p = tiny_problem();
        let (mu, delta) = center_dual_start(&p, &[1.0, 2.0]).unwrap();
        assert!(delta < 0.5, "delta {delta}");
        // the residual seed is exact here: 1/mu = 1.5
        assert!((mu - 2.0 / 3.0).abs() < 1e-3, "mu {mu}");
        let direct = proximity(&p, &[1.0, 2.0], &mu).unwrap();
        assert!((direct - delta).abs() < 1e-9);
    }

    #[test]
    fn test_center_dual_start_extended_backend() {
        use crate::scalar::Extended;
        let p = tiny_problem().convert::<Extended>();
        let s = crate::linalg::vec_from_f64::<Extended>(&[1.0, 2.0]);
        let (mu, delta) = center_dual_start(&p, &s).unwrap();
        assert!(delta < 0.5);
        assert!((mu.to_f64() - 2.0 / 3.0).abs() < 1e-3);
    }

    // A slack pattern no single mu can make proximal: spread magnitudes
    // with a right-hand side that fights the barrier gradient.
    fn off_path_start() -> (LOProblem<f64>, DualIterate<f64>) {
        let a = Matrix::from_rows_f64(&[
            vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
            vec![0.0, 1.0, 2.0, 0.0, -1.0, -2.0],
            vec![-1.0, -1.0, -1.0, -1.0, -1.0, -1.0],
        ]);
        let b = vec![0.0, 0.0, -1.0];
        let c = vec![1.0, 3.0, 5.0, -1.0, -3.0, -5.0];
        let p = LOProblem::new(a, b, c, "off-path").unwrap();
        let y0 = vec![0.0, 0.0, 6.0];
        let s0 = p.slack(&y0);
        let start = DualIterate::new(y0, s0, 6.0).unwrap();
        (p, start)
    }

    #[test]
    fn test_center_dual_iterate_recovers_off_path_start() {
        let (p, start) = off_path_start();
        // mu-search alone cannot fix this slack vector
        assert!(center_dual_start(&p, &start.s).is_err());
        let (centered, delta) = center_dual_iterate(&p, &start, 0.3, 200).unwrap();
        assert!(delta <= 0.3, "delta {delta}");
        assert_eq!(centered.mu, start.mu);
        assert!(centered.s.iter().all(|&v| v > 0.0));
        // centering never leaves the dual feasible manifold
        let drift = dual_drift(&p, &centered.y, &centered.s);
        assert!(norm2(&drift) < 1e-9 * 7.0);
        let direct = proximity(&p, &centered.s, &centered.mu).unwrap();
        assert!((direct - delta).abs() < 1e-9);
    }

    #[test]
    fn test_center_dual_iterate_keeps_proximal_start() {
        let p = tiny_problem();
        let start = DualIterate::new(vec![0.0], vec![1.0, 2.0], 2.0 / 3.0).unwrap();
        let before = proximity(&p, &start.s, &start.mu).unwrap();
        assert!(before < 0.5);
        let (centered, delta) = center_dual_iterate(&p, &start, 0.5, 50).unwrap();
        // already inside the target: returned untouched
        assert_eq!(centered.y, start.y);
        assert_eq!(centered.s, start.s);
        assert!((delta - before).abs() < 1e-12);
    }

    #[test]
    fn test_center_dual_iterate_budget_and_target_validation() {
        let (p, start) = off_path_start();
        let err = center_dual_iterate(&p, &start, 0.3, 0).unwrap_err();
        assert!(matches!(err, Error::CenteringFailed { .. }), "{err}");
        assert!(center_dual_iterate(&p, &start, 0.0, 10).is_err());
        assert!(center_dual_iterate(&p, &start, 1.0, 10).is_err());
    }

    #[test]
    fn test_dual_run_extended_scalar() {
        use crate::scalar::Extended;
        let p = tiny_problem().convert::<Extended>();
        let start = DualIterate::new(
            crate::linalg::vec_from_f64::<Extended>(&[0.0]),
            crate::linalg::vec_from_f64::<Extended>(&[1.0, 2.0]),
            Extended::from_f64(0.7),
        )
        .unwrap();
        let config = tiny_config(0.2, 1e-10);
        let mut orc = oracle(Backend::Exact, 0, 1e-2);
        let out = run_dual(&p, &start, &config, &mut orc).unwrap();
        assert!(out.converged);
        assert!(out.iterate.mu.to_f64() <= 1e-10);
        assert!((out.iterate.y[0].to_f64() - 1.0).abs() < 1e-9);
    }
}
