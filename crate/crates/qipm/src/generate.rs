//! Seeded instance generators.
//!
//! Both generators draw integer constraint matrices from {-10..10} so
//! binary lengths stay small, and both are bit-for-bit deterministic per
//! seed (fixed generator, fixed draw order).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{DualIterate, LOProblem};
use crate::scalar::Scalar;

const REDRAW_ATTEMPTS: usize = 64;

fn draw_full_rank_matrix(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    check_last_col: bool,
) -> Result<Matrix<f64>> {
    for _ in 0..REDRAW_ATTEMPTS {
        let a = Matrix::<f64>::from_fn(m, n, |_, _| rng.gen_range(-10i32..=10) as f64);
        if check_last_col && (0..m).any(|i| a[(i, n - 1)] == 0.0) {
            continue;
        }
        if linalg::rank(&a) == m {
            return Ok(a);
        }
    }
    Err(Error::RankDeficient {
        rank: 0,
        expected: m,
    })
}

/// Instance plus an exactly centered dual start: draws integer A and a
/// random dual interior point, then back-solves the data so that
/// `x0 = mu0 S0^{-1} e` is primal feasible and `(y0, s0)` is dual feasible.
/// The start therefore sits exactly on the central path at `mu0`
/// (proximity zero up to factorization accuracy).
pub fn generate_centered_instance<S: Scalar>(
    n: usize,
    m: usize,
    mu0: f64,
    seed: u64,
) -> Result<(LOProblem<S>, DualIterate<S>)> {
    if !(m >= 1 && m < n) {
        return Err(Error::Dimension(format!(
            "generator needs 1 <= m < n, got m={m}, n={n}"
        )));
    }
    if !(mu0 > 0.0) {
        return Err(Error::NotStrictlyPositive {
            what: "initial barrier parameter mu0",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = draw_full_rank_matrix(&mut rng, m, n, false)?;
    let y0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let c = linalg::v_add(&a.tr_matvec(&y0), &s0);
    let x0: Vec<f64> = s0.iter().map(|si| mu0 / si).collect();
    let b = a.matvec(&x0);

    let name = format!("centered-n{n}-m{m}-seed{seed}");
    let problem = LOProblem::new(a, b, c, name)?.convert::<S>();
    let start = DualIterate::new(
        linalg::vec_from_f64(&y0),
        linalg::vec_from_f64(&s0),
        S::from_f64(mu0),
    )?;
    Ok((problem, start))
}

/// Instance whose optimal face is a segment: the last two columns are
/// identical with equal (zero) reduced costs, and `b` is reached by any
/// convex split between them. Data stays integral, so binary-length
/// thresholds are available.
///
/// The construction fixes `y* = 0`, `c = s*` with `s*` zero exactly on the
/// duplicated pair, and `b = 2 a_last`; every `x >= 0` supported on the pair
/// with `x_{n-1} + x_n = 2` is optimal with objective 0.
pub fn generate_degenerate_instance<S: Scalar>(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<LOProblem<S>> {
    if n < m + 2 {
        return Err(Error::Dimension(format!(
            "degenerate generator needs n >= m + 2, got m={m}, n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = draw_full_rank_matrix(&mut rng, m, n - 1, true)?;
    let a = Matrix::from_fn(m, n, |i, j| {
        if j < n - 1 {
            base[(i, j)]
        } else {
            base[(i, n - 2)]
        }
    });
    let mut s_star: Vec<f64> = (0..n).map(|_| rng.gen_range(1i32..5) as f64).collect();
    s_star[n - 2] = 0.0;
    s_star[n - 1] = 0.0;
    let c = s_star;
    let b: Vec<f64> = (0..m).map(|i| 2.0 * a[(i, n - 1)]).collect();

    let name = format!("degenerate-n{n}-m{m}-seed{seed}");
    Ok(LOProblem::new(a, b, c, name)?.convert::<S>())
}

/// Strictly feasible dual start for a degenerate-generator instance,
/// exploiting its structure: `y = -tau a_last` lifts the zero slacks of the
/// duplicated pair to `tau ||a_last||^2 > 0` while perturbing the others by
/// less than 1/2.
pub fn degenerate_dual_start<S: Scalar>(problem: &LOProblem<S>) -> Result<Vec<S>> {
    let (m, n) = (problem.m(), problem.n());
    let a = problem.a();
    let a_last: Vec<S> = (0..m).map(|i| a.at(i, n - 1)).collect();
    let mut max_corr = S::zero();
    for j in 0..n {
        let col: Vec<S> = (0..m).map(|i| a.at(i, j)).collect();
        max_corr = max_corr.max_with(linalg::dot(&col, &a_last).abs());
    }
    let tau = (S::from_f64(2.0) * max_corr + S::one()).recip();
    let y: Vec<S> = a_last.iter().map(|v| -(tau.clone() * v.clone())).collect();
    let s = problem.slack(&y);
    if !s.iter().all(|v| *v > S::zero()) {
        return Err(Error::InfeasibleStart(
            "structural start is not strictly feasible; instance does not match the degenerate generator layout".into(),
        ));
    }
    Ok(y)
}
