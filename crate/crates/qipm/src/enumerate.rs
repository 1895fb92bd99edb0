//! Brute-force reference solver for small instances.
//!
//! Enumerates every m-column candidate basis of `min c'x, Ax = b, x >= 0`,
//! solves each square system with its own Gaussian elimination (kept
//! deliberately independent of the crate's linear algebra so the two can
//! check each other), keeps the feasible basic solutions, and reports the
//! best vertex objective together with every vertex attaining it. Intended
//! for cross-checking rounded solutions on instances small enough that
//! exhaustive search is instant.

use crate::error::{Error, Result};
use crate::model::LOProblem;

/// One feasible basic solution.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic column set, ascending.
    pub basis: Vec<usize>,
    /// Columns with `x_i` above the feasibility tolerance, ascending.
    pub support: Vec<usize>,
}

/// Result of exhaustive vertex enumeration: the optimal vertex objective
/// and all distinct vertices attaining it (degenerate problems often have
/// several).
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub best_objective: f64,
    pub optimal_vertices: Vec<Vertex>,
    /// Number of candidate bases whose square system was nonsingular.
    pub bases_solved: usize,
}

impl Enumeration {
    /// True when some optimal vertex has exactly this support.
    pub fn has_support(&self, support: &[usize]) -> bool {
        self.optimal_vertices.iter().any(|v| v.support == support)
    }
}

const MAX_BASES: usize = 200_000;
const FEAS_TOL: f64 = 1e-9;

/// Exhaustive search over basis candidates. Returns `None` when no
/// candidate basis yields a feasible basic solution (the instance has no
/// vertex, so it is infeasible for full-row-rank data). The objective is
/// minimized over vertices only; unboundedness is not detected, so callers
/// compare against other vertex solutions (rounded iterates are vertices).
pub fn enumerate_optimum(problem: &LOProblem<f64>) -> Result<Option<Enumeration>> {
    let (m, n) = (problem.m(), problem.n());
    let total = binomial(n, m).ok_or_else(|| {
        Error::InvalidConfig(format!("basis count overflow for {n} choose {m}"))
    })?;
    if total > MAX_BASES {
        return Err(Error::InvalidConfig(format!(
            "enumeration over {total} bases exceeds the limit {MAX_BASES}; \
             this oracle is for small instances"
        )));
    }

    let a = problem.a();
    let mut best: Option<f64> = None;
    let mut optimal: Vec<Vertex> = Vec::new();
    let mut bases_solved = 0usize;

    let mut basis: Vec<usize> = (0..m).collect();
    loop {
        // columns of the basis submatrix, row-major m x m
        let sub: Vec<Vec<f64>> = (0..m)
            .map(|i| basis.iter().map(|&j| a.at(i, j)).collect())
            .collect();
        if let Some(xb) = gauss_solve(sub, problem.b().to_vec()) {
            bases_solved += 1;
            if xb.iter().all(|v| *v >= -FEAS_TOL) {
                let mut x = vec![0.0; n];
                for (&j, v) in basis.iter().zip(&xb) {
                    x[j] = v.max(0.0);
                }
                let objective: f64 =
                    x.iter().zip(problem.c()).map(|(xi, ci)| xi * ci).sum();
                let tol = 1e-9 * (1.0 + objective.abs());
                match best {
                    Some(b) if objective > b + tol => {}
                    Some(b) if objective >= b - tol => {
                        push_distinct(&mut optimal, x, objective, &basis);
                    }
                    _ => {
                        best = Some(objective);
                        optimal.clear();
                        push_distinct(&mut optimal, x, objective, &basis);
                    }
                }
            }
        }
        if !next_combination(&mut basis, n) {
            break;
        }
    }

    Ok(best.map(|best_objective| Enumeration {
        best_objective,
        optimal_vertices: optimal,
        bases_solved,
    }))
}

fn push_distinct(optimal: &mut Vec<Vertex>, x: Vec<f64>, objective: f64, basis: &[usize]) {
    // degenerate vertices are reachable through several bases; keep one
    let dup = optimal
        .iter()
        .any(|v| v.x.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-7));
    if dup {
        return;
    }
    let support = x
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > FEAS_TOL)
        .map(|(i, _)| i)
        .collect();
    optimal.push(Vertex {
        x,
        objective,
        basis: basis.to_vec(),
        support,
    });
}

/// Advances `comb` to the next m-subset of `0..n` in lexicographic order;
/// false once exhausted.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let m = comb.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if comb[i] < n - m + i {
            comb[i] += 1;
            for k in i + 1..m {
                comb[k] = comb[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Gaussian elimination with partial pivoting, self-contained. Returns
/// `None` for (numerically) singular systems: pivot below `1e-10` times
/// the largest input entry.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-10 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
