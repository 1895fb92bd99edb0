//! Noisy normalized-direction solver with query-cost accounting.
//!
//! The solver answers one question: given a nonsingular system `M z = r`,
//! what is the direction of `z`? It returns a unit vector within
//! `epsilon_direction` of `z/||z||` plus relative-error-bounded estimates of
//! `||z||` and `||r||`, and charges a query count from a fixed cost model.
//! Three interchangeable backends span the fidelity range: `exact` (a
//! factorized solve, zero injected error), `perturbed` (exact solve plus a
//! seeded spherical perturbation of magnitude exactly `epsilon_direction`),
//! and `truncated-iterative` (a Krylov iteration stopped early, so its error
//! has the character of a real low-precision solve rather than synthetic
//! noise).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, norm2, Lu, Matrix};
use crate::scalar::Scalar;

/// Closed form of the query charge, recorded so reports stay reproducible.
pub const POLYLOG_FORM: &str = "ceil(p * kappa * frob * ceil(log2(1/eps)) * ceil(log2(p + 1)))";

/// Threshold below which condition numbers come from a full decomposition
/// rather than power iteration.
const EXACT_CONDITION_LIMIT: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Exact,
    Perturbed,
    TruncatedIterative,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Backend::Exact => "exact",
            Backend::Perturbed => "perturbed",
            Backend::TruncatedIterative => "truncated-iterative",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct OracleConfig {
    /// Direction error: `||unit_dir - z/||z||||` is at most this (and for the
    /// perturbed backend, exactly this).
    pub epsilon_direction: f64,
    /// Relative error bound for the two norm estimates.
    pub epsilon_norm: f64,
    pub backend: Backend,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            epsilon_direction: 1e-2,
            epsilon_norm: 1e-2,
            backend: Backend::Perturbed,
            seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_direction > 0.0 && self.epsilon_direction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "direction error must lie in (0, 1), got {}",
                self.epsilon_direction
            )));
        }
        if !(self.epsilon_norm >= 0.0 && self.epsilon_norm < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "norm-estimate error must lie in [0, 1), got {}",
                self.epsilon_norm
            )));
        }
        Ok(())
    }
}

/// What one solve call hands back.
#[derive(Clone, Debug)]
pub struct DirectionEstimate<S> {
    /// Unit vector approximating `z/||z||`; its norm is 1 to within 1e-12.
    pub unit_dir: Vec<S>,
    /// Estimate of `||z||`, relative error at most `epsilon_norm`.
    pub norm_solution: S,
    /// Estimate of `||r||`, relative error at most `epsilon_norm`.
    pub norm_rhs: S,
    pub queries_charged: u64,
}

/// Cost-model snapshot for a prepared system, embedded in reports.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct QueryCostModel {
    pub kappa_est: f64,
    pub frob_norm: f64,
    pub polylog_form: String,
}

/// Per-call instrumentation record: the error actually injected, measurable
/// because the true direction is computed alongside the noisy one.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CallRecord {
    pub call: usize,
    pub true_direction: Vec<f64>,
    pub injected_error: f64,
    pub queries: u64,
}

/// Queries charged for one solve-and-extract call on a `p`-dimensional
/// system: the solver factor `kappa * frob` times the extraction factor `p`,
/// times fixed polylog terms (the form is exported as [`POLYLOG_FORM`]).
/// Counts saturate at `u64::MAX` (as do all downstream accumulations); a
/// saturated count means the modeled cost exceeds any feasible budget.
pub fn query_cost(p: usize, kappa: f64, frob: f64, eps: f64) -> u64 {
    let log_eps = (1.0 / eps).log2().ceil().max(1.0);
    let log_p = (p as f64 + 1.0).log2().ceil().max(1.0);
    (p as f64 * kappa * frob * log_eps * log_p).ceil() as u64
}

/// Two-norm condition number, by full decomposition up to 512 rows and by
/// power/inverse iteration above (relative accuracy about 1e-6 there).
pub fn condition_estimate(m: &Matrix<f64>) -> Result<f64> {
    let p = m.rows();
    if p != m.cols() {
        return Err(Error::Dimension(format!(
            "condition estimate needs a square matrix, got {p}x{}",
            m.cols()
        )));
    }
    if p <= EXACT_CONDITION_LIMIT {
        let kappa = linalg::condition_number(m)?;
        if !kappa.is_finite() {
            return Err(Error::Singular {
                context: "condition estimate",
            });
        }
        return Ok(kappa);
    }
    let lu = Lu::factor(m, "condition estimate")?;
    Ok(linalg::extreme_singular_values(m, &lu).condition())
}

/// A system the solver has been pointed at: factorization plus the condition
/// and norm figures the cost model charges against. Preparing once and
/// reusing across calls mirrors how the refinement loop drives one system.
#[derive(Clone, Debug)]
pub struct PreparedSystem<S: Scalar> {
    matrix: Matrix<S>,
    lu: Lu<S>,
    kappa_est: f64,
    frob_norm: f64,
    symmetric: bool,
}

impl<S: Scalar> PreparedSystem<S> {
    pub fn new(matrix: Matrix<S>, context: &'static str) -> Result<Self> {
        let p = matrix.rows();
        if p != matrix.cols() || p == 0 {
            return Err(Error::Dimension(format!(
                "prepared system must be square and nonempty, got {p}x{}",
                matrix.cols()
            )));
        }
        let lu = Lu::factor(&matrix, context)?;
        let mf = matrix.map_to_f64();
        let kappa_est = condition_estimate(&mf)?;
        let frob_norm = mf.frobenius_norm();
        let symmetric = matrix.is_symmetric(1e-12);
        Ok(PreparedSystem {
            matrix,
            lu,
            kappa_est,
            frob_norm,
            symmetric,
        })
    }

    pub fn p(&self) -> usize {
        self.matrix.rows()
    }

    pub fn kappa_est(&self) -> f64 {
        self.kappa_est
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.matrix.matvec(v)
    }

    /// Exact factorized solve, bypassing the noise model. The refinement
    /// loop never calls this; tests and reference paths do.
    pub fn solve_exact(&self, r: &[S]) -> Vec<S> {
        self.lu.solve(r)
    }

    pub fn cost_model(&self) -> QueryCostModel {
        QueryCostModel {
            kappa_est: self.kappa_est,
            frob_norm: self.frob_norm,
            polylog_form: POLYLOG_FORM.to_string(),
        }
    }
}

/// The noisy solver itself. Holds the seeded generator, so calls must stay
/// sequential on one instance; run parallel solves on separate instances.
#[derive(Clone, Debug)]
pub struct Oracle {
    config: OracleConfig,
    rng: ChaCha8Rng,
    instrumented: bool,
    calls: Vec<CallRecord>,
    total_calls: u64,
    total_queries: u64,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Result<Self> {
        config.validate()?;
        Ok(Oracle {
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            instrumented: false,
            calls: Vec::new(),
            total_calls: 0,
            total_queries: 0,
        })
    }

    /// Enables per-call records (true direction and injected error).
    pub fn instrumented(config: OracleConfig) -> Result<Self> {
        let mut oracle = Self::new(config)?;
        oracle.instrumented = true;
        Ok(oracle)
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn call_log(&self) -> &[CallRecord] {
        &self.calls
    }

    pub fn total_queries(&self) -> u64 {
        self.total_queries
    }

    /// Number of direction estimates served, instrumented or not.
    pub fn total_calls(&self) -> u64 {
        self.total_calls
    }

    /// Estimates the direction and magnitude of the solution of
    /// `M z = r` for a prepared `M`.
    ///
    /// A zero right-hand side is an error by contract: the caller owns the
    /// skip rule and must not ask for the direction of a zero vector.
    pub fn estimate_direction<S: Scalar>(
        &mut self,
        system: &PreparedSystem<S>,
        r: &[S],
    ) -> Result<DirectionEstimate<S>> {
        let p = system.p();
        if r.len() != p {
            return Err(Error::Dimension(format!(
                "rhs length {} does not match system dimension {p}",
                r.len()
            )));
        }
        let r_norm = norm2(r);
        if !(r_norm > S::zero()) {
            return Err(Error::ZeroRhs);
        }
        let queries = query_cost(
            p,
            system.kappa_est,
            system.frob_norm,
            self.config.epsilon_direction,
        );

        let (unit_dir, norm_solution, norm_rhs) = match self.config.backend {
            Backend::Exact => {
                let z = system.lu.solve(r);
                let nz = norm2(&z);
                let unit: Vec<S> = z.iter().map(|v| v.clone() / nz.clone()).collect();
                (unit, nz, r_norm.clone())
            }
            Backend::Perturbed => {
                let z = system.lu.solve(r);
                let nz = norm2(&z);
                let unit = self.perturb_direction(&z, nz.clone());
                let fs = self.norm_factor();
                let fr = self.norm_factor();
                (unit, nz * fs, r_norm.clone() * fr)
            }
            Backend::TruncatedIterative => {
                let z = self.truncated_solve(system, r)?;
                let nz = norm2(&z);
                if !(nz > S::zero()) {
                    return Err(Error::Singular {
                        context: "truncated iterative solve returned zero",
                    });
                }
                let unit: Vec<S> = z.iter().map(|v| v.clone() / nz.clone()).collect();
                (unit, nz, r_norm.clone())
            }
        };

        if self.instrumented {
            let zt = system.lu.solve(r);
            let nt = norm2(&zt);
            let true_direction: Vec<f64> =
                zt.iter().map(|v| (v.clone() / nt.clone()).to_f64()).collect();
            let injected_error = unit_dir
                .iter()
                .zip(&true_direction)
                .map(|(u, t)| {
                    let d = u.to_f64() - t;
                    d * d
                })
                .sum::<f64>()
                .sqrt();
            self.calls.push(CallRecord {
                call: self.calls.len(),
                true_direction,
                injected_error,
                queries,
            });
        }

        self.total_calls += 1;
        self.total_queries = self.total_queries.saturating_add(queries);
        Ok(DirectionEstimate {
            unit_dir,
            norm_solution,
            norm_rhs,
            queries_charged: queries,
        })
    }

    /// Rotates the exact unit direction by the angle whose chord is exactly
    /// `epsilon_direction`, toward a uniformly random direction in the
    /// orthogonal complement. Both the perturbation magnitude and the unit
    /// norm then hold by construction, not by renormalization alone.
    fn perturb_direction<S: Scalar>(&mut self, z: &[S], nz: S) -> Vec<S> {
        let p = z.len();
        let u_star: Vec<S> = z.iter().map(|v| v.clone() / nz.clone()).collect();
        if p == 1 {
            // the unit sphere in one dimension is two points; no perturbation
            // of magnitude < 2 exists, so the direction passes through exactly
            return u_star;
        }
        let u_f: Vec<f64> = u_star.iter().map(Scalar::to_f64).collect();
        let w = loop {
            let g: Vec<f64> = (0..p).map(|_| self.rng.sample(StandardNormal)).collect();
            let proj = linalg::dot(&g, &u_f);
            let mut w: Vec<f64> = g.iter().zip(&u_f).map(|(gi, ui)| gi - proj * ui).collect();
            let nw = norm2(&w);
            if nw > 1e-12 {
                for wi in w.iter_mut() {
                    *wi /= nw;
                }
                break w;
            }
        };
        let eps = self.config.epsilon_direction;
        let phi = 2.0 * (eps / 2.0).asin();
        let (c, s) = (S::from_f64(phi.cos()), S::from_f64(phi.sin()));
        let mut u: Vec<S> = u_star
            .iter()
            .zip(&w)
            .map(|(ui, wi)| c.clone() * ui.clone() + s.clone() * S::from_f64(*wi))
            .collect();
        let nu = norm2(&u);
        for ui in u.iter_mut() {
            *ui = ui.clone() / nu.clone();
        }
        u
    }

    /// Multiplicative norm-estimate error, uniform in
    /// `(1 - epsilon_norm, 1 + epsilon_norm)`.
    fn norm_factor<S: Scalar>(&mut self) -> S {
        let u: f64 = self.rng.gen_range(-1.0..1.0);
        S::from_f64(1.0 + self.config.epsilon_norm * u)
    }

    /// Krylov solve stopped at relative residual `epsilon_direction`.
    /// Unsymmetric systems go through the symmetric embedding
    /// `[[0, M], [M^T, 0]] [u; z] = [r; 0]`, whose solution carries `z`
    /// in the bottom block and whose condition equals that of `M`.
    fn truncated_solve<S: Scalar>(
        &mut self,
        system: &PreparedSystem<S>,
        r: &[S],
    ) -> Result<Vec<S>> {
        let p = system.p();
        let rel_tol = self.config.epsilon_direction;
        if system.symmetric {
            let out = linalg::minres(&system.matrix, r, rel_tol, 3 * p + 30);
            if !out.converged {
                return Err(Error::Singular {
                    context: "truncated iterative solve stalled",
                });
            }
            return Ok(out.x);
        }
        let m = &system.matrix;
        let emb = Matrix::from_fn(2 * p, 2 * p, |i, j| {
            if i < p && j >= p {
                m.at(i, j - p)
            } else if i >= p && j < p {
                m.at(j, i - p)
            } else {
                S::zero()
            }
        });
        let mut rhs = vec![S::zero(); 2 * p];
        rhs[..p].clone_from_slice(r);
        let out = linalg::minres(&emb, &rhs, rel_tol, 6 * p + 30);
        if !out.converged {
            return Err(Error::Singular {
                context: "truncated iterative solve stalled",
            });
        }
        Ok(out.x[p..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn prepared(rows: &[Vec<f64>]) -> PreparedSystem<f64> {
        PreparedSystem::new(Matrix::from_rows_f64(rows), "test").unwrap()
    }

    fn config(backend: Backend, seed: u64) -> OracleConfig {
        OracleConfig {
            backend,
            seed,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn test_exact_identity_system() {
        let sys = prepared(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let mut oracle = Oracle::new(config(Backend::Exact, 0)).unwrap();
        let est = oracle.estimate_direction(&sys, &[3.0, 0.0]).unwrap();
        assert_eq!(est.unit_dir, vec![1.0, 0.0]);
        assert_eq!(est.norm_solution, 3.0);
        assert_eq!(est.norm_rhs, 3.0);
        assert!(est.queries_charged > 0);
    }

    #[test]
    fn test_exact_diagonal_system() {
        let sys = prepared(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let mut oracle = Oracle::new(config(Backend::Exact, 0)).unwrap();
        let est = oracle.estimate_direction(&sys, &[0.0, 2.0]).unwrap();
        assert_relative_eq!(est.unit_dir[0], 0.0);
        assert_relative_eq!(est.unit_dir[1], 1.0);
        assert_relative_eq!(est.norm_solution, 1.0);
    }

    #[test]
    fn test_zero_rhs_is_an_error() {
        let sys = prepared(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let mut oracle = Oracle::new(config(Backend::Exact, 0)).unwrap();
        match oracle.estimate_direction(&sys, &[0.0, 0.0]) {
            Err(Error::ZeroRhs) => {}
            other => panic!("expected ZeroRhs, got {other:?}"),
        }
    }

    #[test]
    fn test_singular_matrix_rejected_at_prepare() {
        let m = Matrix::<f64>::from_rows_f64(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(PreparedSystem::new(m, "test").is_err());
    }

    #[test]
    fn test_perturbed_error_magnitude_is_exact() {
        let sys = prepared(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let mut oracle = Oracle::new(config(Backend::Perturbed, 7)).unwrap();
        let est = oracle.estimate_direction(&sys, &[1.0, 0.0]).unwrap();
        let err = ((est.unit_dir[0] - 1.0).powi(2) + est.unit_dir[1].powi(2)).sqrt();
        assert!((err - 1e-2).abs() < 1e-12, "injected error {err}");
        assert!((norm2(&est.unit_dir) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn test_perturbed_error_magnitude_across_systems() {
        let mut oracle = Oracle::instrumented(config(Backend::Perturbed, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..100 {
            let p = 2 + (trial % 7);
            // SPD via diagonal dominance, saddle via bordering
            let mut rows: Vec<Vec<f64>> = (0..p)
                .map(|i| {
                    (0..p)
                        .map(|j| {
                            if i == j {
                                p as f64 + 1.0
                            } else {
                                rng.gen_range(-1.0..1.0)
                            }
                        })
                        .collect()
                })
                .collect();
            for i in 0..p {
                for j in 0..i {
                    rows[i][j] = rows[j][i];
                }
            }
            if trial % 2 == 1 {
                rows[p - 1][p - 1] = 0.0;
            }
            let sys = prepared(&rows);
            let r: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let est = oracle.estimate_direction(&sys, &r).unwrap();
            assert!((norm2(&est.unit_dir) - 1.0).abs() < 1e-12);
            let record = oracle.call_log().last().unwrap();
            assert!(
                (record.injected_error - 1e-2).abs() < 1e-12,
                "trial {trial}: injected {}",
                record.injected_error
            );
        }
    }

    #[test]
    fn test_perturbed_norm_estimates_within_band() {
        let sys = prepared(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let mut oracle = Oracle::new(config(Backend::Perturbed, 11)).unwrap();
        for _ in 0..50 {
            let est = oracle.estimate_direction(&sys, &[4.0, 0.0]).unwrap();
            // z = (2, 0): true norms 2 and 4
            assert!(est.norm_solution >= 2.0 * 0.99 && est.norm_solution <= 2.0 * 1.01);
            assert!(est.norm_rhs >= 4.0 * 0.99 && est.norm_rhs <= 4.0 * 1.01);
        }
    }

    #[test]
    fn test_same_seed_same_inputs_bit_identical() {
        let sys = prepared(&[vec![3.0, 1.0], vec![1.0, 2.0]]);
        let run = || {
            let mut oracle = Oracle::new(config(Backend::Perturbed, 42)).unwrap();
            let a = oracle.estimate_direction(&sys, &[1.0, -1.0]).unwrap();
            let b = oracle.estimate_direction(&sys, &[0.5, 2.0]).unwrap();
            (a, b)
        };
        let (a1, b1) = run();
        let (a2, b2) = run();
        assert_eq!(a1.unit_dir, a2.unit_dir);
        assert_eq!(a1.norm_solution, a2.norm_solution);
        assert_eq!(a1.norm_rhs, a2.norm_rhs);
        assert_eq!(b1.unit_dir, b2.unit_dir);
        assert_eq!(a1.queries_charged, a2.queries_charged);
    }

    #[test]
    fn test_exact_backend_matches_factorized_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut oracle = Oracle::new(config(Backend::Exact, 0)).unwrap();
        for trial in 0..100 {
            let p = 2 + (trial % 8);
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
            let sys = prepared(&rows);
            let r: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if norm2(&r) == 0.0 {
                continue;
            }
            let est = oracle.estimate_direction(&sys, &r).unwrap();
            let rescaled: Vec<f64> = est.unit_dir.iter().map(|u| u * est.norm_solution).collect();
            let exact = sys.solve_exact(&r);
            let diff = linalg::v_sub(&rescaled, &exact);
            assert!(
                norm2(&diff) <= 1e-12 * norm2(&exact).max(1e-300),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn test_truncated_backend_symmetric() {
        let sys = prepared(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let mut oracle = Oracle::new(OracleConfig {
            epsilon_direction: 1e-3,
            epsilon_norm: 0.0,
            backend: Backend::TruncatedIterative,
            seed: 0,
        })
        .unwrap();
        let r = vec![1.0, -2.0, 0.5];
        let est = oracle.estimate_direction(&sys, &r).unwrap();
        assert!((norm2(&est.unit_dir) - 1.0).abs() < 1e-12);
        // residual of the rescaled iterate meets the requested tolerance
        let z: Vec<f64> = est.unit_dir.iter().map(|u| u * est.norm_solution).collect();
        let resid = linalg::v_sub(&r, &sys.apply(&z));
        assert!(norm2(&resid) <= 1e-3 * norm2(&r) * 1.01);
    }

    #[test]
    fn test_truncated_backend_unsymmetric_embedding() {
        let sys = prepared(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        let mut oracle = Oracle::new(OracleConfig {
            epsilon_direction: 1e-8,
            epsilon_norm: 0.0,
            backend: Backend::TruncatedIterative,
            seed: 0,
        })
        .unwrap();
        // M z = (3, 1) has z = (1, 1)
        let est = oracle.estimate_direction(&sys, &[3.0, 1.0]).unwrap();
        let want = 1.0 / 2.0f64.sqrt();
        assert_relative_eq!(est.unit_dir[0], want, max_relative = 1e-6);
        assert_relative_eq!(est.unit_dir[1], want, max_relative = 1e-6);
        assert_relative_eq!(est.norm_solution, 2.0f64.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn test_query_cost_frozen_values() {
        assert_eq!(query_cost(2, 1.0, 2.0f64.sqrt(), 0.5), 6);
        assert_eq!(query_cost(4, 10.0, 4.0, 1e-2), 3360);
    }

    #[test]
    fn test_query_cost_monotone() {
        let kappas = [1.0, 2.0, 10.0, 55.5];
        let frobs = [0.5, 1.0, 7.0, 30.0];
        let epss = [0.5, 0.1, 1e-3, 1e-8];
        let ps = [1usize, 2, 5, 64, 513];
        for w in ps.windows(2) {
            for (&k, &f) in kappas.iter().zip(&frobs) {
                for &e in &epss {
                    assert!(query_cost(w[0], k, f, e) <= query_cost(w[1], k, f, e));
                }
            }
        }
        for w in kappas.windows(2) {
            assert!(query_cost(3, w[0], 2.0, 0.1) <= query_cost(3, w[1], 2.0, 0.1));
        }
        for w in frobs.windows(2) {
            assert!(query_cost(3, 2.0, w[0], 0.1) <= query_cost(3, 2.0, w[1], 0.1));
        }
        for w in epss.windows(2) {
            // later entries are smaller tolerances, so cost must not drop
            assert!(query_cost(3, 2.0, 2.0, w[1]) >= query_cost(3, 2.0, 2.0, w[0]));
        }
    }

    #[test]
    fn test_condition_estimate_examples() {
        let id5 = Matrix::<f64>::identity(5);
        assert_relative_eq!(condition_estimate(&id5).unwrap(), 1.0, max_relative = 1e-9);

        let d = Matrix::from_rows_f64(&[vec![1.0, 0.0], vec![0.0, 100.0]]);
        assert_relative_eq!(condition_estimate(&d).unwrap(), 100.0, max_relative = 1e-9);

        // dual Newton block matrix at the unit-slack interior point
        let saddle = Matrix::from_rows_f64(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert_relative_eq!(
            condition_estimate(&saddle).unwrap(),
            2.0,
            max_relative = 1e-9
        );

        // shear by 2: singular values (1 + sqrt(2))^{\pm 1} shifted, ratio 5.828...
        let shear = Matrix::from_rows_f64(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert_relative_eq!(
            condition_estimate(&shear).unwrap(),
            5.828427124746189,
            max_relative = 1e-9
        );
    }

    #[test]
    fn test_condition_estimate_rejects_singular() {
        let m = Matrix::from_rows_f64(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(condition_estimate(&m).is_err());
    }

    #[test]
    fn test_total_queries_accumulate() {
        let sys = prepared(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let mut oracle = Oracle::new(config(Backend::Exact, 0)).unwrap();
        let a = oracle.estimate_direction(&sys, &[1.0, 0.0]).unwrap();
        let b = oracle.estimate_direction(&sys, &[0.0, 1.0]).unwrap();
        assert_eq!(oracle.total_queries(), a.queries_charged + b.queries_charged);
    }

    #[test]
    fn test_cost_model_snapshot() {
        let sys = prepared(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let model = sys.cost_model();
        assert_relative_eq!(model.kappa_est, 2.0, max_relative = 1e-9);
        assert_relative_eq!(model.frob_norm, 5.0f64.sqrt(), max_relative = 1e-12);
        assert_eq!(model.polylog_form, POLYLOG_FORM);
    }

    #[test]
    fn test_config_validation() {
        let mut c = OracleConfig::default();
        c.epsilon_direction = 0.0;
        assert!(c.validate().is_err());
        c.epsilon_direction = 1.0;
        assert!(c.validate().is_err());
        c.epsilon_direction = 0.5;
        c.epsilon_norm = 1.0;
        assert!(c.validate().is_err());
        c.epsilon_norm = 0.0;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn test_one_dimensional_system_passes_direction_through() {
        let sys = prepared(&[vec![4.0]]);
        let mut oracle = Oracle::new(config(Backend::Perturbed, 1)).unwrap();
        let est = oracle.estimate_direction(&sys, &[-2.0]).unwrap();
        assert_eq!(est.unit_dir, vec![-1.0]);
        assert!(est.norm_solution >= 0.5 * 0.99 && est.norm_solution <= 0.5 * 1.01);
    }

    #[test]
    fn test_extended_precision_direction() {
        use crate::scalar::Extended;
        let m = Matrix::<f64>::from_rows_f64(&[vec![2.0, 1.0], vec![1.0, 3.0]]).convert::<Extended>();
        let sys = PreparedSystem::new(m, "test").unwrap();
        let mut oracle = Oracle::new(config(Backend::Exact, 0)).unwrap();
        let r = crate::linalg::vec_from_f64::<Extended>(&[1.0, 1.0]);
        let est = oracle.estimate_direction(&sys, &r).unwrap();
        let n = norm2(&est.unit_dir).to_f64();
        assert!((n - 1.0).abs() < 1e-15);
        // z = (0.4, 0.2), direction (2, 1)/sqrt(5)
        assert_relative_eq!(
            est.unit_dir[0].to_f64(),
            2.0 / 5.0f64.sqrt(),
            max_relative = 1e-12
        );
    }
}
