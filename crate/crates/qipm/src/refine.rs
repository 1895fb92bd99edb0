//! Iterative refinement wrapper around the noisy normalized-direction solver.
//!
//! Each pass recomputes the residual `r = sigma - M z` classically, asks the
//! solver for the direction and magnitude of the correction `M dz = r`, and
//! adds `norm_solution * unit_dir`. Because the solver's error is relative to
//! the residual it is handed, every pass multiplies the residual by roughly
//! the solver's error level and the loop converges log-linearly; a
//! low-precision primitive is driven to an arbitrarily precise classical
//! solution. The loop core is generic over closures so tests can exercise it
//! with synthetic solvers.

use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::oracle::{Backend, Oracle, PreparedSystem};
use crate::scalar::Scalar;

/// One refinement pass as recorded in the trace. `iteration` counts
/// correction steps applied so far, so row 0 describes the initial residual
/// and `step_norm` is the size of the correction that produced this row.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct RefineRow {
    pub iteration: usize,
    pub residual_norm: f64,
    /// `||r|| / max(1, ||sigma||)`, the quantity the stopping rule tests.
    pub relative_residual: f64,
    pub step_norm: f64,
    pub queries_total: u64,
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct RefineTrace {
    pub rows: Vec<RefineRow>,
    pub eps_target: f64,
    /// True when the loop left with the residual under its threshold; false
    /// when it stopped early because corrections shrank below `eps_target`
    /// (the solver's noise floor) without certifying the residual.
    pub converged: bool,
}

impl RefineTrace {
    /// Number of correction steps applied.
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn final_relative_residual(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.relative_residual)
    }

    pub fn total_queries(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.queries_total)
    }
}

#[derive(Clone, Debug)]
pub struct RefinedSolution<S> {
    pub z: Vec<S>,
    pub queries: u64,
    pub trace: RefineTrace,
}

/// Iteration budget for a target accuracy: the loop contracts by at least
/// one decimal digit every few passes, so the budget scales with the digit
/// count and keeps a flat allowance for slow starts.
pub fn iteration_budget(eps_target: f64) -> usize {
    let digits = (1.0 / eps_target).log10().ceil().max(0.0) as usize;
    4 * digits + 20
}

/// Refinement loop core: drives `M z = sigma` to
/// `||sigma - M z|| <= eps_target * max(1, ||sigma||)`.
///
/// `apply_m` computes `M v`; `step` maps a residual to a correction and the
/// query cost charged for it. Stops successfully when the residual threshold
/// is met; stops with `converged = false` when a correction falls to
/// `eps_target` or below first, which is how a noise-floor plateau announces
/// itself. Exhausting `budget` is an error carrying the full trace.
pub fn refine_with<S: Scalar>(
    sigma: &[S],
    eps_target: f64,
    budget: usize,
    mut apply_m: impl FnMut(&[S]) -> Vec<S>,
    mut step: impl FnMut(&[S]) -> Result<(Vec<S>, u64)>,
) -> Result<RefinedSolution<S>> {
    if !(eps_target > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "refinement target must be positive, got {eps_target}"
        )));
    }
    let norm_sigma = norm2(sigma);
    let threshold = S::from_f64(eps_target) * norm_sigma.clone().max_with(S::one());
    let step_floor = S::from_f64(eps_target);

    let mut z = vec![S::zero(); sigma.len()];
    let mut queries = 0u64;
    let mut trace = RefineTrace {
        rows: Vec::new(),
        eps_target,
        converged: false,
    };
    let mut last_step = S::zero();

    for iteration in 0..=budget {
        let r: Vec<S> = if iteration == 0 {
            sigma.to_vec()
        } else {
            let mz = apply_m(&z);
            sigma
                .iter()
                .zip(&mz)
                .map(|(s, m)| s.clone() - m.clone())
                .collect()
        };
        let r_norm = norm2(&r);
        let r_norm_f = r_norm.to_f64();
        trace.rows.push(RefineRow {
            iteration,
            residual_norm: r_norm_f,
            relative_residual: r_norm_f / norm_sigma.to_f64().max(1.0),
            step_norm: last_step.to_f64(),
            queries_total: queries,
        });
        if !(r_norm > threshold) {
            trace.converged = true;
            return Ok(RefinedSolution { z, queries, trace });
        }
        if iteration > 0 && !(last_step > step_floor) {
            return Ok(RefinedSolution { z, queries, trace });
        }
        if iteration == budget {
            break;
        }
        let (dz, q) = step(&r)?;
        queries = queries.saturating_add(q);
        for (zi, di) in z.iter_mut().zip(&dz) {
            *zi += di.clone();
        }
        last_step = norm2(&dz);
    }
    Err(Error::NonConvergence {
        trace: Box::new(trace),
    })
}

/// Per-pass residual contraction the noise model predicts in the worst
/// case. Refinement is guaranteed progress when this is below one; the
/// prediction is pessimistic for random perturbations, which rarely align
/// with the worst singular direction, so a value above one is a caution
/// rather than a verdict. A run that really stalls ends in a
/// non-convergence error carrying its residual trace.
pub fn contraction_bound(oracle: &Oracle, kappa: f64) -> f64 {
    let c = oracle.config();
    match c.backend {
        Backend::Exact => 0.0,
        Backend::Perturbed | Backend::TruncatedIterative => {
            c.epsilon_direction * kappa + c.epsilon_norm + c.epsilon_direction * c.epsilon_norm
        }
    }
}

/// Solves `M z = sigma` through the noisy solver on an already prepared
/// system, refining to relative residual `eps_target`. `max_iter` defaults
/// to [`iteration_budget`].
pub fn refine_prepared<S: Scalar>(
    system: &PreparedSystem<S>,
    sigma: &[S],
    eps_target: f64,
    oracle: &mut Oracle,
    max_iter: Option<usize>,
) -> Result<RefinedSolution<S>> {
    let budget = max_iter.unwrap_or_else(|| iteration_budget(eps_target));
    refine_with(
        sigma,
        eps_target,
        budget,
        |v| system.apply(v),
        |r| {
            let est = oracle.estimate_direction(system, r)?;
            let dz: Vec<S> = est
                .unit_dir
                .iter()
                .map(|u| est.norm_solution.clone() * u.clone())
                .collect();
            Ok((dz, est.queries_charged))
        },
    )
}

/// Solves symmetric `M z = sigma` to relative residual `eps_target` by
/// preparing the system and refining through the noisy solver.
pub fn refine_solve<S: Scalar>(
    m: &Matrix<S>,
    sigma: &[S],
    eps_target: f64,
    oracle: &mut Oracle,
    max_iter: Option<usize>,
) -> Result<RefinedSolution<S>> {
    let system = PreparedSystem::new(m.clone(), "refinement solve")?;
    refine_prepared(&system, sigma, eps_target, oracle, max_iter)
}

/// Solves `A A^T y = rhs` for a full-row-rank `A` by forming the normal
/// matrix explicitly (symmetric positive definite) and refining.
pub fn solve_normal_system<S: Scalar>(
    a: &Matrix<S>,
    rhs: &[S],
    eps_target: f64,
    oracle: &mut Oracle,
) -> Result<RefinedSolution<S>> {
    let m = a.rows();
    if rhs.len() != m {
        return Err(Error::Dimension(format!(
            "normal-system rhs length {} does not match row count {m}",
            rhs.len()
        )));
    }
    let mut normal = Matrix::<S>::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let mut acc = S::zero();
            for k in 0..a.cols() {
                acc += a.at(i, k) * a.at(j, k);
            }
            normal[(i, j)] = acc.clone();
            normal[(j, i)] = acc;
        }
    }
    refine_solve(&normal, rhs, eps_target, oracle, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Lu;
    use crate::oracle::OracleConfig;

    fn test_system() -> (Matrix<f64>, Vec<f64>) {
        let m = Matrix::from_rows_f64(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ]);
        let sigma = vec![1.0, -2.0, 0.5];
        (m, sigma)
    }

    fn oracle_with(backend: Backend, seed: u64, eps_dir: f64, eps_norm: f64) -> Oracle {
        Oracle::new(OracleConfig {
            epsilon_direction: eps_dir,
            epsilon_norm: eps_norm,
            backend,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn test_exact_solver_converges_in_one_pass() {
        let (m, sigma) = test_system();
        let lu = Lu::factor(&m, "test").unwrap();
        let out = refine_with(
            &sigma,
            1e-12,
            iteration_budget(1e-12),
            |v| m.matvec(v),
            |r| Ok((lu.solve(r), 7)),
        )
        .unwrap();
        assert!(out.trace.converged);
        assert_eq!(out.trace.iterations(), 1);
        assert_eq!(out.queries, 7);
        assert_eq!(out.trace.total_queries(), 7);
        assert_eq!(out.trace.rows[0].step_norm, 0.0);
        assert!(out.trace.rows[1].step_norm > 0.0);
        let exact = lu.solve(&sigma);
        for (got, want) in out.z.iter().zip(&exact) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn test_halving_solver_contracts_log_linearly() {
        let (m, sigma) = test_system();
        let lu = Lu::factor(&m, "test").unwrap();
        let out = refine_with(
            &sigma,
            1e-6,
            iteration_budget(1e-6),
            |v| m.matvec(v),
            |r| {
                let mut dz = lu.solve(r);
                for d in dz.iter_mut() {
                    *d *= 0.5;
                }
                Ok((dz, 1))
            },
        )
        .unwrap();
        assert!(out.trace.converged);
        // residual halves each pass: ||sigma|| happens to be > 1 so the
        // stopping rule needs about log2(||sigma|| / 1e-6) passes
        assert!(out.trace.iterations() >= 18 && out.trace.iterations() <= 24);
        for pair in out.trace.rows.windows(2) {
            let ratio = pair[1].residual_norm / pair[0].residual_norm;
            assert!((ratio - 0.5).abs() < 1e-9, "ratio {ratio}");
        }
        assert_eq!(out.queries, out.trace.iterations() as u64);
    }

    #[test]
    fn test_zero_rhs_converges_without_steps() {
        let (m, _) = test_system();
        let out = refine_with(
            &[0.0, 0.0, 0.0],
            1e-10,
            iteration_budget(1e-10),
            |v| m.matvec(v),
            |_| panic!("no step should be needed"),
        )
        .unwrap();
        assert!(out.trace.converged);
        assert_eq!(out.trace.iterations(), 0);
        assert_eq!(out.z, vec![0.0; 3]);
    }

    #[test]
    fn test_collapsed_steps_stop_without_certifying() {
        let (m, sigma) = test_system();
        let out = refine_with(
            &sigma,
            1e-10,
            iteration_budget(1e-10),
            |v| m.matvec(v),
            |r| Ok((vec![0.0; r.len()], 3)),
        )
        .unwrap();
        assert!(!out.trace.converged);
        assert_eq!(out.trace.iterations(), 1, "zero step stops the next pass");
        assert!(out.trace.final_relative_residual() > 1e-10);
        assert_eq!(out.trace.rows[1].step_norm, 0.0);
    }

    #[test]
    fn test_budget_exhaustion_fails_with_trace() {
        let (m, sigma) = test_system();
        let lu = Lu::factor(&m, "test").unwrap();
        // contracts by 0.9 per pass: too slow for 1e-30 within the budget,
        // with steps far above the floor so no early stop interferes
        let err = refine_with(
            &sigma,
            1e-30,
            iteration_budget(1e-30),
            |v| m.matvec(v),
            |r| {
                let mut dz = lu.solve(r);
                for d in dz.iter_mut() {
                    *d *= 0.1;
                }
                Ok((dz, 1))
            },
        )
        .unwrap_err();
        match err {
            Error::NonConvergence { trace } => {
                assert_eq!(trace.iterations(), iteration_budget(1e-30));
                let msg = format!(
                    "{}",
                    Error::NonConvergence {
                        trace: trace.clone()
                    }
                );
                assert!(msg.contains("did not converge"), "display: {msg}");
            }
            other => panic!("expected NonConvergence, got {other}"),
        }
    }

    #[test]
    fn test_budget_formula() {
        assert_eq!(iteration_budget(1e-8), 52);
        assert_eq!(iteration_budget(1e-2), 28);
        assert_eq!(iteration_budget(0.5), 24);
    }

    #[test]
    fn test_exact_backend_one_correction() {
        let m = Matrix::from_rows_f64(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let mut oracle = oracle_with(Backend::Exact, 0, 1e-2, 1e-2);
        let out = refine_solve(&m, &[2.0, 0.0], 1e-12, &mut oracle, None).unwrap();
        assert!(out.trace.converged);
        assert_eq!(out.trace.iterations(), 1);
        assert!((out.z[0] - 1.0).abs() < 1e-12 && out.z[1].abs() < 1e-12);
    }

    #[test]
    fn test_zero_sigma_skips() {
        let m = Matrix::from_rows_f64(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let mut oracle = oracle_with(Backend::Perturbed, 5, 1e-2, 1e-2);
        let out = refine_solve(&m, &[0.0, 0.0], 1e-12, &mut oracle, None).unwrap();
        assert!(out.trace.converged);
        assert_eq!(out.trace.iterations(), 0);
        assert_eq!(out.z, vec![0.0, 0.0]);
        assert_eq!(out.queries, 0);
    }

    #[test]
    fn test_perturbed_backend_reaches_tight_target() {
        let m = Matrix::from_rows_f64(&[vec![1.0, 0.0], vec![0.0, 4.0]]);
        let mut oracle = oracle_with(Backend::Perturbed, 0, 1e-2, 1e-2);
        let out = refine_solve(&m, &[1.0, 4.0], 1e-12, &mut oracle, None).unwrap();
        assert!(out.trace.converged);
        assert!(
            out.trace.iterations() <= 12,
            "iterations {}",
            out.trace.iterations()
        );
        assert!(out.trace.final_relative_residual() <= 1e-12);
        assert!((out.z[0] - 1.0).abs() < 1e-10 && (out.z[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn test_perturbed_contraction_is_monotone() {
        // condition numbers up to 100 keep the predicted contraction under
        // one half, so every pass must strictly shrink the residual
        for seed in 0..10u64 {
            let kappa = 1.0 + (seed as f64) * 11.0;
            let m = Matrix::from_rows_f64(&[
                vec![kappa, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 2.5],
            ]);
            let mut oracle = oracle_with(Backend::Perturbed, seed, 1e-3, 1e-3);
            let out = refine_solve(&m, &[1.0, -1.0, 0.5], 1e-10, &mut oracle, None).unwrap();
            assert!(out.trace.converged);
            for pair in out.trace.rows.windows(2) {
                assert!(
                    pair[1].residual_norm < pair[0].residual_norm,
                    "seed {seed}: {} -> {}",
                    pair[0].residual_norm,
                    pair[1].residual_norm
                );
            }
        }
    }

    #[test]
    fn test_iterations_scale_linearly_in_digits() {
        let (m, sigma) = test_system();
        let run = |eps: f64| {
            let mut oracle = oracle_with(Backend::Perturbed, 13, 1e-2, 1e-2);
            refine_solve(&m, &sigma, eps, &mut oracle, None)
                .unwrap()
                .trace
                .iterations()
        };
        let base = run(1e-6);
        let doubled = run(1e-12);
        assert!(
            doubled <= 2 * base + 2,
            "digits doubled: {base} -> {doubled}"
        );
    }

    #[test]
    fn test_exact_backend_matches_factorization() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..100 {
            let p = 2 + trial % 6;
            let mut rows: Vec<Vec<f64>> = (0..p)
                .map(|i| {
                    (0..p)
                        .map(|j| if i == j { p as f64 } else { rng.gen_range(-1.0..1.0) })
                        .collect()
                })
                .collect();
            for i in 0..p {
                for j in 0..i {
                    rows[i][j] = rows[j][i];
                }
            }
            let m = Matrix::from_rows_f64(&rows);
            let sigma: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut oracle = oracle_with(Backend::Exact, 0, 1e-2, 0.0);
            let eps = 1e-11;
            let out = refine_solve(&m, &sigma, eps, &mut oracle, None).unwrap();
            let exact = Lu::factor(&m, "test").unwrap().solve(&sigma);
            let err = crate::linalg::norm2(&crate::linalg::v_sub(&out.z, &exact));
            let scale = crate::linalg::norm2(&exact).max(1e-300);
            assert!(err <= 10.0 * eps * scale, "trial {trial}: err {err}");
        }
    }

    #[test]
    fn test_queries_match_oracle_accounting() {
        let (m, sigma) = test_system();
        let mut oracle = oracle_with(Backend::Perturbed, 3, 1e-2, 1e-2);
        let out = refine_solve(&m, &sigma, 1e-10, &mut oracle, None).unwrap();
        assert_eq!(out.queries, oracle.total_queries());
        assert_eq!(out.trace.total_queries(), out.queries);
        // row-to-row increments all equal the per-call charge
        let increments: Vec<u64> = out
            .trace
            .rows
            .windows(2)
            .map(|w| w[1].queries_total - w[0].queries_total)
            .collect();
        assert!(!increments.is_empty());
        assert!(increments.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn test_normal_system_single_row() {
        let a = Matrix::from_rows_f64(&[vec![1.0, 1.0]]);
        let mut oracle = oracle_with(Backend::Exact, 0, 1e-2, 0.0);
        let out = solve_normal_system(&a, &[1.0], 1e-12, &mut oracle).unwrap();
        assert!((out.z[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn test_normal_system_identity() {
        let a = Matrix::<f64>::identity(2);
        let mut oracle = oracle_with(Backend::Perturbed, 9, 1e-2, 1e-2);
        let out = solve_normal_system(&a, &[0.7, -2.0], 1e-12, &mut oracle).unwrap();
        assert!((out.z[0] - 0.7).abs() < 1e-11 && (out.z[1] + 2.0).abs() < 1e-11);
    }

    #[test]
    fn test_normal_system_recovers_sample_mean() {
        // regression with design column (1, 1) and observations (1, 3):
        // the normal system reduces to 2 beta = 4
        let design_t = Matrix::from_rows_f64(&[vec![1.0, 1.0]]);
        let rhs = design_t.matvec(&[1.0, 3.0]);
        let mut oracle = oracle_with(Backend::Exact, 0, 1e-2, 0.0);
        let out = solve_normal_system(&design_t, &rhs, 1e-12, &mut oracle).unwrap();
        assert!((out.z[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn test_truncated_backend_refines_too() {
        let (m, sigma) = test_system();
        let mut oracle = oracle_with(Backend::TruncatedIterative, 0, 1e-2, 0.0);
        let out = refine_solve(&m, &sigma, 1e-10, &mut oracle, None).unwrap();
        assert!(out.trace.converged);
        let exact = Lu::factor(&m, "test").unwrap().solve(&sigma);
        let err = crate::linalg::norm2(&crate::linalg::v_sub(&out.z, &exact));
        assert!(err < 1e-9, "err {err}");
    }

    #[test]
    fn test_extended_scalar_refinement() {
        use crate::scalar::Extended;
        let m = Matrix::<f64>::from_rows_f64(&[vec![2.0, 1.0], vec![1.0, 3.0]]).convert::<Extended>();
        let sigma = crate::linalg::vec_from_f64::<Extended>(&[1.0, 0.0]);
        let mut oracle = oracle_with(Backend::Perturbed, 21, 1e-2, 1e-2);
        let out = refine_solve(&m, &sigma, 1e-40, &mut oracle, None).unwrap();
        assert!(out.trace.converged);
        // exact solution (0.6, -0.2)
        let e0 = (out.z[0].to_f64() - 0.6).abs();
        let e1 = (out.z[1].to_f64() + 0.2).abs();
        assert!(e0 < 1e-15 && e1 < 1e-15);
        assert!(out.trace.final_relative_residual() <= 1e-40);
    }
}
