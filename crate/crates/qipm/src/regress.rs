//! Regression demos driven by the solver stack: least squares through the
//! iteratively refined normal-equations solver, and minimax (l-infinity)
//! regression recast as a linear optimization problem and solved end to end
//! through the refinement pipeline with rounding.

use crate::error::{Error, Result};
use crate::ipm::{center_dual_iterate, IPMConfig};
use crate::ir::{default_threshold, round_to_optimal, run_ir};
use crate::linalg::{norm2, Matrix};
use crate::model::{DualIterate, LOProblem};
use crate::oracle::Oracle;
use crate::refine::solve_normal_system;
use crate::scalar::Scalar;

/// Parses comma-separated numeric rows. Blank lines are skipped; a single
/// leading header line is tolerated and skipped. All data rows must have the
/// same width.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut saw_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if !saw_data => continue, // header line
            Err(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected comma-separated numbers, got {line:?}"),
                })
            }
        };
        saw_data = true;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} fields, previous rows have {w}", row.len()),
                })
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(rows)
}

/// Parses a single-column CSV into a vector.
pub fn parse_vector_csv(text: &str) -> Result<Vec<f64>> {
    let rows = parse_matrix_csv(text)?;
    if rows[0].len() != 1 {
        return Err(Error::Parse {
            line: 0,
            message: format!("expected one value per line, got {} columns", rows[0].len()),
        });
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

#[derive(Clone, Debug)]
pub struct RegressOutput {
    pub beta: Vec<f64>,
    /// Euclidean norm of `X beta - obs`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub queries: u64,
    pub converged: bool,
}

/// Solves `min ||X beta - obs||_2` through the normal equations
/// `(X' X) beta = X' obs`, using the refined solver with the given oracle.
pub fn least_squares(
    design: &[Vec<f64>],
    obs: &[f64],
    eps: f64,
    oracle: &mut Oracle,
) -> Result<RegressOutput> {
    let rows = design.len();
    let cols = design.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidConfig("empty design matrix".into()));
    }
    if obs.len() != rows {
        return Err(Error::Dimension(format!(
            "design has {rows} rows, observations have {}",
            obs.len()
        )));
    }
    if rows < cols {
        return Err(Error::InvalidConfig(format!(
            "underdetermined system: {rows} observations for {cols} coefficients"
        )));
    }
    let xt: Matrix<f64> = Matrix::from_rows_f64(design).transpose();
    let rhs = xt.matvec(obs);
    let solved = solve_normal_system(&xt, &rhs, eps, oracle)?;

    let fitted = xt.tr_matvec(&solved.z);
    let residual: Vec<f64> = fitted.iter().zip(obs).map(|(f, o)| f - o).collect();
    Ok(RegressOutput {
        beta: solved.z,
        residual_norm: norm2(&residual),
        iterations: solved.trace.iterations(),
        queries: solved.queries,
        converged: solved.trace.converged,
    })
}

/// Builds the minimax regression LO. With coefficients `beta` and bound `t`
/// as the dual variables `y = (beta, t)`, each data point contributes the
/// two constraint columns `(x_i, -1)` with cost `obs_i` and `(-x_i, -1)`
/// with cost `-obs_i`, and the objective `b = (0, -1)` maximizes `-t`. The
/// returned start is strictly interior: `beta = 0`, `t = max|obs| + 1`.
pub fn linf_problem(design: &[Vec<f64>], obs: &[f64]) -> Result<(LOProblem<f64>, DualIterate<f64>)> {
    let points = design.len();
    let dim = design.first().map_or(0, Vec::len);
    if points == 0 || dim == 0 {
        return Err(Error::InvalidConfig("empty design matrix".into()));
    }
    if obs.len() != points {
        return Err(Error::Dimension(format!(
            "design has {points} rows, observations have {}",
            obs.len()
        )));
    }
    let m = dim + 1;
    let n = 2 * points;
    let a = Matrix::from_fn(m, n, |i, j| {
        let (point, sign) = if j < points {
            (j, 1.0)
        } else {
            (j - points, -1.0)
        };
        if i < dim {
            sign * design[point][i]
        } else {
            -1.0
        }
    });
    let mut c = Vec::with_capacity(n);
    c.extend_from_slice(obs);
    c.extend(obs.iter().map(|v| -v));
    let mut b = vec![0.0; m];
    b[dim] = -1.0;
    let problem = LOProblem::new(a, b, c, format!("linf-{points}pts-{dim}dim"))?;

    let t0 = obs.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) + 1.0;
    let mut y0 = vec![0.0; m];
    y0[dim] = t0;
    let s0 = problem.slack(&y0);
    let mu0 = s0.iter().sum::<f64>() / n as f64;
    let start = DualIterate::new(y0, s0, mu0)?;
    Ok((problem, start))
}

#[derive(Clone, Debug)]
pub struct LinfOutput {
    pub beta: Vec<f64>,
    /// `max_i |x_i' beta - obs_i|` recomputed from the reported `beta`.
    pub max_residual: f64,
    /// Optimal value of the LO (the certified bound `t`).
    pub objective: f64,
    pub outer_iterations: usize,
    pub queries: u64,
    /// True when the final iterate rounded to a certified vertex; false
    /// means the interior iterate itself is reported.
    pub rounded: bool,
}

/// Minimax regression end to end: ingest, recast as LO, solve by refinement
/// to precision `zeta`, round to a vertex.
pub fn solve_linf(
    design: &[Vec<f64>],
    obs: &[f64],
    zeta: f64,
    zeta_tilde: f64,
    oracle: &mut Oracle,
) -> Result<LinfOutput> {
    let (problem, start) = linf_problem(design, obs)?;
    // the analytic start is interior but not proximal at any mu
    let (centered, _) = center_dual_iterate(&problem, &start, 0.3, 500)?;
    let config = IPMConfig::for_dimension(problem.n(), zeta_tilde);
    let out = run_ir(&problem, &centered, zeta, zeta_tilde, &config, oracle)?;

    let dim = design[0].len();
    let (y, rounded) = match round_to_optimal(&problem, &out.iterate.s, default_threshold(zeta)) {
        Ok(vertex) => (vertex.y, true),
        Err(_) => (out.iterate.y.clone(), false),
    };
    let beta = y[..dim].to_vec();
    let objective = y[dim];
    let max_residual = design
        .iter()
        .zip(obs)
        .map(|(row, o)| {
            let fit: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (fit - o).abs()
        })
        .fold(0.0f64, f64::max);
    Ok(LinfOutput {
        beta,
        max_residual,
        objective,
        outer_iterations: out.outer.len(),
        queries: out.total_queries,
        rounded,
    })
}
