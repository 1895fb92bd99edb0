//! Builders for the three Newton-system reformulations used by the
//! solvers, plus direction recovery and diagonal equilibration.
//!
//! Forms:
//! - augmented (dual method): `[[S^2, A'], [A, 0]] (ds_hat, dy) =
//!   (0, A S^{-1} e - b/mu)`, symmetric indefinite, size n+m;
//! - normal equations: `A D^2 A' dy = A x - beta mu A S^{-1} e` with
//!   `D^2 = diag(x/s)`, positive definite, size m;
//! - orthogonal-subspace form: `[-X A' | S V] (dy, lambda) = beta mu e - X s`,
//!   square of size n, where V spans null(A). Directions recovered from it
//!   satisfy `A dx = 0` and `A' dy + ds = 0` by construction no matter how
//!   inexact the solve was.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::LOProblem;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct AugmentedSystem<S> {
    pub matrix: Matrix<S>,
    pub rhs: Vec<S>,
    /// The slack vector the blocks were scaled with.
    pub scaling_s: Vec<S>,
}

#[derive(Clone, Debug)]
pub struct NESystem<S> {
    pub matrix: Matrix<S>,
    pub rhs: Vec<S>,
    pub beta: S,
}

#[derive(Clone, Debug)]
pub struct OSSSystem<S> {
    pub matrix: Matrix<S>,
    pub rhs: Vec<S>,
}

/// Orthonormal null-space basis of the constraint matrix, columns
/// sign-normalized for determinism.
#[derive(Clone, Debug)]
pub struct NullBasis<S> {
    pub v: Matrix<S>,
}

fn check_positive<S: Scalar>(v: &[S], what: &'static str) -> Result<()> {
    if v.iter().all(|x| *x > S::zero()) {
        Ok(())
    } else {
        Err(Error::NotStrictlyPositive { what })
    }
}

/// Dual Newton system at `(s, mu)` in symmetric block form.
pub fn build_augmented<S: Scalar>(
    problem: &LOProblem<S>,
    s: &[S],
    mu: &S,
) -> Result<AugmentedSystem<S>> {
    let (m, n) = (problem.m(), problem.n());
    if s.len() != n {
        return Err(Error::Dimension(format!(
            "slack has length {}, expected {n}",
            s.len()
        )));
    }
    check_positive(s, "slack s")?;
    if !(*mu > S::zero()) {
        return Err(Error::NotStrictlyPositive {
            what: "barrier parameter mu",
        });
    }
    let a = problem.a();
    let mut matrix = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        matrix[(i, i)] = s[i].clone() * s[i].clone();
    }
    for i in 0..m {
        for j in 0..n {
            matrix[(n + i, j)] = a.at(i, j);
            matrix[(j, n + i)] = a.at(i, j);
        }
    }
    let s_inv: Vec<S> = s.iter().map(|v| v.recip()).collect();
    let a_sinv = a.matvec(&s_inv);
    let mut rhs = vec![S::zero(); n + m];
    for i in 0..m {
        rhs[n + i] = a_sinv[i].clone() - problem.b()[i].clone() / mu.clone();
    }
    Ok(AugmentedSystem {
        matrix,
        rhs,
        scaling_s: s.to_vec(),
    })
}

/// Normal-equation system `A D^2 A' dy = A x - beta mu A S^{-1} e`.
pub fn build_nes<S: Scalar>(
    problem: &LOProblem<S>,
    x: &[S],
    s: &[S],
    mu: &S,
    beta: &S,
) -> Result<NESystem<S>> {
    let n = problem.n();
    if x.len() != n || s.len() != n {
        return Err(Error::Dimension(format!(
            "x and s must have length {n}, got {} and {}",
            x.len(),
            s.len()
        )));
    }
    check_positive(x, "primal iterate x")?;
    check_positive(s, "slack s")?;
    if !(*beta > S::zero() && *beta < S::one()) {
        return Err(Error::InvalidConfig(format!(
            "centering parameter must be in (0,1), got {}",
            beta.to_f64()
        )));
    }
    let a = problem.a();
    let m = problem.m();
    let d2: Vec<S> = x
        .iter()
        .zip(s)
        .map(|(xi, si)| xi.clone() / si.clone())
        .collect();
    let mut matrix = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let mut acc = S::zero();
            for k in 0..n {
                acc += a.at(i, k) * d2[k].clone() * a.at(j, k);
            }
            matrix[(i, j)] = acc.clone();
            matrix[(j, i)] = acc;
        }
    }
    let ax = a.matvec(x);
    let s_inv: Vec<S> = s.iter().map(|v| v.recip()).collect();
    let a_sinv = a.matvec(&s_inv);
    let coef = beta.clone() * mu.clone();
    let rhs: Vec<S> = ax
        .iter()
        .zip(&a_sinv)
        .map(|(axi, asi)| axi.clone() - coef.clone() * asi.clone())
        .collect();
    Ok(NESystem {
        matrix,
        rhs,
        beta: beta.clone(),
    })
}

/// Orthonormal basis of null(A); wraps the rank-revealing factorization
/// with the basis-type invariants.
pub fn nullspace_basis<S: Scalar>(a: &Matrix<S>) -> Result<NullBasis<S>> {
    Ok(NullBasis {
        v: linalg::nullspace_basis(a)?,
    })
}

/// Orthogonal-subspace system `[-X A' | S V] (dy, lambda) = beta mu e - X s`.
pub fn build_oss<S: Scalar>(
    problem: &LOProblem<S>,
    x: &[S],
    s: &[S],
    mu: &S,
    beta: &S,
    basis: &NullBasis<S>,
) -> Result<OSSSystem<S>> {
    let (m, n) = (problem.m(), problem.n());
    if x.len() != n || s.len() != n {
        return Err(Error::Dimension(format!(
            "x and s must have length {n}, got {} and {}",
            x.len(),
            s.len()
        )));
    }
    check_positive(x, "primal iterate x")?;
    check_positive(s, "slack s")?;
    if basis.v.rows() != n || basis.v.cols() != n - m {
        return Err(Error::Dimension(format!(
            "null basis is {}x{}, expected {n}x{}",
            basis.v.rows(),
            basis.v.cols(),
            n - m
        )));
    }
    let a = problem.a();
    let mut matrix = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..m {
            matrix[(i, j)] = -(x[i].clone() * a.at(j, i));
        }
        for j in 0..(n - m) {
            matrix[(i, m + j)] = s[i].clone() * basis.v.at(i, j);
        }
    }
    let coef = beta.clone() * mu.clone();
    let rhs: Vec<S> = x
        .iter()
        .zip(s)
        .map(|(xi, si)| coef.clone() - xi.clone() * si.clone())
        .collect();
    Ok(OSSSystem { matrix, rhs })
}

/// Feasible directions from an (arbitrarily inexact) OSS solution:
/// `dx = V lambda`, `ds = -A' dy`.
pub fn recover_oss_directions<S: Scalar>(
    dy: &[S],
    lambda: &[S],
    basis: &NullBasis<S>,
    a: &Matrix<S>,
) -> (Vec<S>, Vec<S>) {
    let dx = basis.v.matvec(lambda);
    let ds = a.tr_matvec(dy).iter().map(|v| -v.clone()).collect();
    (dx, ds)
}

/// Maps the scaled dual step back: `ds = diag(s^2) ds_hat`.
pub fn recover_dual_step<S: Scalar>(ds_hat: &[S], s: &[S]) -> Vec<S> {
    ds_hat
        .iter()
        .zip(s)
        .map(|(d, si)| si.clone() * si.clone() * d.clone())
        .collect()
}

/// Diagonal scaling record from [`equilibrate`]; turns solutions of the
/// scaled system back into solutions of the original.
#[derive(Clone, Debug)]
pub struct Equilibration<S> {
    pub d: Vec<S>,
}

impl<S: Scalar> Equilibration<S> {
    pub fn scale_rhs(&self, rhs: &[S]) -> Vec<S> {
        rhs.iter()
            .zip(&self.d)
            .map(|(r, d)| r.clone() * d.clone())
            .collect()
    }

    pub fn unscale_solution(&self, w: &[S]) -> Vec<S> {
        w.iter()
            .zip(&self.d)
            .map(|(wi, d)| wi.clone() * d.clone())
            .collect()
    }
}

/// Symmetric Jacobi equilibration `D M D` with
/// `D_ii = 1/sqrt(max(|M_ii|, floor))`, where the floor is relative to the
/// largest diagonal magnitude so zero diagonal blocks (the saddle form)
/// don't blow the scaling up.
pub fn equilibrate<S: Scalar>(matrix: &Matrix<S>) -> (Matrix<S>, Equilibration<S>) {
    let n = matrix.rows();
    assert_eq!(n, matrix.cols(), "square matrix required");
    let mut max_diag = S::zero();
    for i in 0..n {
        max_diag = max_diag.max_with(matrix.at(i, i).abs());
    }
    if !(max_diag > S::zero()) {
        max_diag = S::one();
    }
    let floor = S::from_f64(1e-8) * max_diag;
    let d: Vec<S> = (0..n)
        .map(|i| matrix.at(i, i).abs().max_with(floor.clone()).sqrt().recip())
        .collect();
    let scaled = Matrix::from_fn(n, n, |i, j| {
        d[i].clone() * matrix.at(i, j) * d[j].clone()
    });
    (scaled, Equilibration { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm2, v_sub, Lu};
    use approx::assert_relative_eq;

    fn problem(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LOProblem<f64> {
        LOProblem::new(Matrix::from_rows_f64(a), b.to_vec(), c.to_vec(), "test").unwrap()
    }

    #[test]
    fn test_build_augmented_hand_values() {
        let p = problem(&[vec![1.0, 1.0]], &[1.0], &[1.0, 2.0]);
        let sys = build_augmented(&p, &[1.0, 1.0], &1.0).unwrap();
        let want = Matrix::from_rows_f64(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert_eq!(sys.matrix, want);
        assert_eq!(sys.rhs, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn test_build_augmented_centered_rhs_is_zero() {
        // b = A S^{-1} e makes the bottom rhs vanish at mu = 1
        let p = problem(&[vec![1.0, 1.0]], &[2.0], &[1.0, 1.0]);
        let sys = build_augmented(&p, &[1.0, 1.0], &1.0).unwrap();
        assert!(norm2(&sys.rhs) < 1e-15);
    }

    #[test]
    fn test_build_augmented_mu_scaling() {
        let p = problem(&[vec![1.0, 1.0]], &[1.0], &[1.0, 2.0]);
        let sys = build_augmented(&p, &[1.0, 1.0], &2.0).unwrap();
        assert_relative_eq!(sys.rhs[2], 2.0 - 0.5);
    }

    #[test]
    fn test_build_augmented_symmetry_and_inertia() {
        let p = problem(
            &[vec![2.0, -1.0, 0.0, 3.0], vec![1.0, 1.0, -2.0, 0.0]],
            &[1.0, 2.0],
            &[1.0, 0.0, 1.0, 4.0],
        );
        let sys = build_augmented(&p, &[0.5, 1.0, 2.0, 0.25], &0.7).unwrap();
        assert!(sys.matrix.is_symmetric(1e-15));
        // saddle structure: n positive and m negative eigenvalues
        let eig = linalg::sym_eigenvalues(&sys.matrix).unwrap();
        let neg = eig.iter().filter(|v| **v < 0.0).count();
        let pos = eig.iter().filter(|v| **v > 0.0).count();
        assert_eq!((pos, neg), (4, 2));
    }

    #[test]
    fn test_build_nes_hand_values() {
        let p = problem(&[vec![1.0, 1.0]], &[1.0], &[1.0, 2.0]);
        let sys = build_nes(&p, &[1.0, 1.0], &[1.0, 1.0], &1.0, &0.5).unwrap();
        assert_eq!(sys.matrix[(0, 0)], 2.0);

        let sys = build_nes(&p, &[2.0, 1.0], &[1.0, 1.0], &1.5, &0.9).unwrap();
        assert_relative_eq!(sys.matrix[(0, 0)], 3.0);
        assert_relative_eq!(sys.rhs[0], 0.3, max_relative = 1e-13);
    }

    #[test]
    fn test_nes_positive_definite_on_interior_points() {
        let p = problem(
            &[vec![1.0, 2.0, 0.0, -1.0], vec![0.0, 1.0, 3.0, 1.0]],
            &[1.0, 2.0],
            &[1.0, 1.0, 1.0, 1.0],
        );
        for k in 1..=20 {
            let x: Vec<f64> = (0..4).map(|i| 0.1 + ((i + k) % 5) as f64).collect();
            let s: Vec<f64> = (0..4).map(|i| 0.2 + ((2 * i + k) % 3) as f64).collect();
            let sys = build_nes(&p, &x, &s, &1.0, &0.9).unwrap();
            let eig = linalg::sym_eigenvalues(&sys.matrix).unwrap();
            assert!(eig[0] > 0.0, "not positive definite at k={k}");
        }
    }

    #[test]
    fn test_nullspace_basis_examples() {
        let a: Matrix<f64> = Matrix::from_rows_f64(&[vec![1.0, 1.0]]);
        let basis = nullspace_basis(&a).unwrap();
        let r = 0.5f64.sqrt();
        assert_relative_eq!(basis.v[(0, 0)], r, max_relative = 1e-14);
        assert_relative_eq!(basis.v[(1, 0)], -r, max_relative = 1e-14);

        let a: Matrix<f64> = Matrix::from_rows_f64(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let basis = nullspace_basis(&a).unwrap();
        assert!(basis.v[(0, 0)].abs() < 1e-14);
        assert!(basis.v[(1, 0)].abs() < 1e-14);
        assert_relative_eq!(basis.v[(2, 0)], 1.0);
    }

    #[test]
    fn test_build_oss_hand_values() {
        let p = problem(&[vec![1.0, 1.0]], &[3.0], &[1.0, 2.0]);
        let basis = nullspace_basis(p.a()).unwrap();
        let sys = build_oss(&p, &[2.0, 1.0], &[1.0, 1.0], &1.5, &0.9, &basis).unwrap();
        assert_relative_eq!(sys.rhs[0], -0.65, max_relative = 1e-13);
        assert_relative_eq!(sys.rhs[1], 0.35, max_relative = 1e-13);
        assert_eq!((sys.matrix.rows(), sys.matrix.cols()), (2, 2));

        let sol = Lu::factor(&sys.matrix, "test").unwrap().solve(&sys.rhs);
        assert_relative_eq!(sol[0], 0.1, max_relative = 1e-12);
        assert_relative_eq!(sol[1], -0.45 * 2f64.sqrt(), max_relative = 1e-12);

        let (dx, ds) = recover_oss_directions(&sol[..1], &sol[1..], &basis, p.a());
        assert_relative_eq!(dx[0], -0.45, max_relative = 1e-12);
        assert_relative_eq!(dx[1], 0.45, max_relative = 1e-12);
        assert_relative_eq!(ds[0], -0.1, max_relative = 1e-12);
        assert_relative_eq!(ds[1], -0.1, max_relative = 1e-12);
    }

    #[test]
    fn test_oss_centered_rhs_is_zero() {
        let p = problem(&[vec![1.0, 1.0]], &[2.0], &[1.0, 1.0]);
        let basis = nullspace_basis(p.a()).unwrap();
        // x s = mu e componentwise; beta = 1 targets the current center
        let sys = build_oss(&p, &[1.0, 1.0], &[1.0, 1.0], &1.0, &1.0, &basis).unwrap();
        assert!(norm2(&sys.rhs) < 1e-15);
    }

    #[test]
    fn test_recovered_directions_feasible_for_arbitrary_inputs() {
        let p = problem(
            &[vec![1.0, 2.0, 0.0, -1.0, 3.0], vec![0.0, 1.0, 3.0, 1.0, -2.0]],
            &[1.0, 2.0],
            &[1.0, 1.0, 1.0, 1.0, 1.0],
        );
        let basis = nullspace_basis(p.a()).unwrap();
        for k in 0..100 {
            let kf = k as f64;
            let dy = vec![kf.sin(), (2.0 * kf).cos()];
            let lambda = vec![(3.0 * kf).sin(), kf.cos() - 0.3, 0.7 - (kf * 0.1).sin()];
            let (dx, ds) = recover_oss_directions(&dy, &lambda, &basis, p.a());
            assert!(norm2(&p.a().matvec(&dx)) < 1e-12);
            let mut drift = p.a().tr_matvec(&dy);
            for (d, dsi) in drift.iter_mut().zip(&ds) {
                *d += *dsi;
            }
            assert!(norm2(&drift) < 1e-12);
        }
    }

    #[test]
    fn test_nes_and_oss_agree_on_dy() {
        let p = problem(
            &[vec![1.0, 2.0, 0.0, -1.0], vec![0.0, 1.0, 3.0, 1.0]],
            &[1.0, 2.0],
            &[3.0, 1.0, 2.0, 1.0],
        );
        let basis = nullspace_basis(p.a()).unwrap();
        for k in 1..=50 {
            let x: Vec<f64> = (0..4).map(|i| 0.3 + ((i * 3 + k) % 7) as f64 * 0.5).collect();
            let s: Vec<f64> = (0..4).map(|i| 0.4 + ((i + 2 * k) % 5) as f64 * 0.3).collect();
            let mu = crate::model::complementarity_mu(&x, &s).unwrap();
            let nes = build_nes(&p, &x, &s, &mu, &0.7).unwrap();
            let dy_nes = Lu::factor(&nes.matrix, "test").unwrap().solve(&nes.rhs);
            let oss = build_oss(&p, &x, &s, &mu, &0.7, &basis).unwrap();
            let sol = Lu::factor(&oss.matrix, "test").unwrap().solve(&oss.rhs);
            for (a, b) in dy_nes.iter().zip(&sol[..2]) {
                assert_relative_eq!(a, b, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn test_augmented_matches_schur_elimination() {
        let p = problem(
            &[vec![1.0, 2.0, 0.0, -1.0], vec![0.0, 1.0, 3.0, 1.0]],
            &[1.0, 2.0],
            &[3.0, 1.0, 2.0, 1.0],
        );
        let s = vec![0.5, 1.5, 2.0, 0.8];
        let mu = 0.37;
        let sys = build_augmented(&p, &s, &mu).unwrap();
        let sol = Lu::factor(&sys.matrix, "test").unwrap().solve(&sys.rhs);
        let dy_aug = &sol[4..];
        // eliminating ds_hat gives A S^{-2} A' dy = b/mu - A S^{-1} e
        let a = p.a();
        let mut schur = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += a.at(i, k) * a.at(j, k) / (s[k] * s[k]);
                }
                schur[(i, j)] = acc;
            }
        }
        let s_inv: Vec<f64> = s.iter().map(|v| 1.0 / v).collect();
        let a_sinv = a.matvec(&s_inv);
        let rhs: Vec<f64> = p
            .b()
            .iter()
            .zip(&a_sinv)
            .map(|(bi, asi)| bi / mu - asi)
            .collect();
        let dy_schur = Lu::factor(&schur, "test").unwrap().solve(&rhs);
        for (a, b) in dy_aug.iter().zip(&dy_schur) {
            assert_relative_eq!(a, b, max_relative = 1e-11);
        }
    }

    #[test]
    fn test_recover_dual_step() {
        assert_eq!(recover_dual_step(&[-0.5, -0.5], &[1.0, 1.0]), vec![-0.5, -0.5]);
        assert_eq!(recover_dual_step(&[1.0, 0.0], &[2.0, 1.0]), vec![4.0, 0.0]);
        let s = vec![0.3, 1.7, 2.2];
        let v = vec![1.0, -2.0, 0.5];
        let hat: Vec<f64> = v.iter().zip(&s).map(|(vi, si)| vi / (si * si)).collect();
        let back = recover_dual_step(&hat, &s);
        for (got, want) in back.iter().zip(&v) {
            assert_relative_eq!(got, want, max_relative = 1e-14);
        }
    }

    #[test]
    fn test_equilibrate_diagonal_and_identity() {
        let m: Matrix<f64> = Matrix::from_rows_f64(&[vec![1.0, 0.0], vec![0.0, 10000.0]]);
        let (scaled, _) = equilibrate(&m);
        assert_relative_eq!(scaled[(0, 0)], 1.0);
        assert_relative_eq!(scaled[(1, 1)], 1.0);
        assert_relative_eq!(
            linalg::condition_number(&scaled).unwrap(),
            1.0,
            max_relative = 1e-10
        );

        let i: Matrix<f64> = Matrix::identity(3);
        let (scaled, _) = equilibrate(&i);
        assert_eq!(scaled, i);
    }

    #[test]
    fn test_equilibrate_solve_round_trip() {
        let p = problem(
            &[vec![1.0, 2.0, 0.0, -1.0], vec![0.0, 1.0, 3.0, 1.0]],
            &[1.0, 2.0],
            &[3.0, 1.0, 2.0, 1.0],
        );
        for k in 1..=100 {
            let s: Vec<f64> = (0..4)
                .map(|i| 0.01 + ((i * 5 + k) % 11) as f64 * 0.7)
                .collect();
            let sys = build_augmented(&p, &s, &0.5).unwrap();
            let direct = Lu::factor(&sys.matrix, "test").unwrap().solve(&sys.rhs);
            let (scaled, record) = equilibrate(&sys.matrix);
            let w = Lu::factor(&scaled, "test")
                .unwrap()
                .solve(&record.scale_rhs(&sys.rhs));
            let via_scaled = record.unscale_solution(&w);
            let err = norm2(&v_sub(&via_scaled, &direct));
            assert!(err < 1e-12 * (1.0 + norm2(&direct)), "seed {k}: err {err}");
        }
    }

    #[test]
    fn test_null_basis_orthonormality() {
        let a: Matrix<f64> = Matrix::from_rows_f64(&[
            vec![1.0, 2.0, 0.0, -1.0, 3.0],
            vec![0.0, 1.0, 3.0, 1.0, -2.0],
        ]);
        let basis = nullspace_basis(&a).unwrap();
        let v = &basis.v;
        for i in 0..3 {
            for j in 0..3 {
                let ci: Vec<f64> = (0..5).map(|r| v[(r, i)]).collect();
                let cj: Vec<f64> = (0..5).map(|r| v[(r, j)]).collect();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&ci, &cj) - want).abs() < 1e-12);
            }
        }
    }
}
