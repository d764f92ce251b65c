//! Independent grid oracle for cylinder boundary problems.
//!
//! The solver in the parent module uses the eigendecomposition flow; this
//! oracle never diagonalizes. It integrates `psi' = -A psi` with classical
//! fourth-order Runge-Kutta steps on a uniform grid and intersects the
//! resulting discrete Cauchy graph with the boundary condition. Used by
//! verification suites and acceptance tests to cross-check kernels and
//! indices of the exact solver.

use super::{adjoint_problem, CylinderProblem, ProblemCondition};
use crate::linalg::{subspace_meet, subspace_sum, Mat, Subspace};
use crate::{Result, ToleranceConfig};

/// Transfer matrix of `psi' = -A psi` over `[0, L]` by RK4 on `steps`
/// uniform steps.
pub fn rk4_transfer(a: &Mat, length: f64, steps: usize) -> Mat {
    let n = a.nrows();
    let h = length / steps as f64;
    let f = |m: &Mat| -> Mat { -(a * m) };
    let mut transfer = Mat::identity(n, n);
    for _ in 0..steps {
        let k1 = f(&transfer);
        let k2 = f(&(&transfer + &k1 * (h / 2.0)));
        let k3 = f(&(&transfer + &k2 * (h / 2.0)));
        let k4 = f(&(&transfer + &k3 * h));
        transfer += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    transfer
}

/// Discrete Cauchy graph `{(v, T v)}` with per-column normalization.
fn discrete_graph(transfer: &Mat) -> Subspace {
    let n = transfer.nrows();
    let mut basis = Mat::zeros(2 * n, n);
    for j in 0..n {
        let mut col = nalgebra::DVector::zeros(2 * n);
        col[j] = 1.0;
        for i in 0..n {
            col[n + i] = transfer[(i, j)];
        }
        basis.set_column(j, &col);
    }
    Subspace::from_spanning(2 * n, &basis, 1e-12)
}

/// Kernel initial values computed on the grid.
pub fn grid_kernel(p: &CylinderProblem, steps: usize, cfg: &ToleranceConfig) -> Result<Subspace> {
    let n = p.cyl.a.entries.nrows();
    let transfer = rk4_transfer(&p.cyl.a.entries, p.length, steps);
    let graph = discrete_graph(&transfer);
    let joint = match &p.condition {
        ProblemCondition::Joint { space } => space.clone(),
        ProblemCondition::PerEnd { end0, end_l } => {
            let far = match &p.monodromy {
                Some(g) => end_l.subspace.map_through(g, cfg.rank_tol),
                None => end_l.subspace.clone(),
            };
            subspace_sum(&end0.subspace.embed(2 * n, 0), &far.embed(2 * n, n), cfg)
        }
    };
    let meet = subspace_meet(&graph, &joint, cfg)?;
    let mut v_cols = Mat::zeros(n, meet.dim());
    for j in 0..meet.dim() {
        for i in 0..n {
            v_cols[(i, j)] = meet.basis[(i, j)];
        }
    }
    Ok(Subspace::from_spanning(n, &v_cols, cfg.rank_tol))
}

/// Index computed entirely on the grid: kernel of the problem minus kernel
/// of the adjoint problem, over the base field.
pub fn grid_index(p: &CylinderProblem, steps: usize, cfg: &ToleranceConfig) -> Result<i64> {
    let ker = grid_kernel(p, steps, cfg)?;
    let adj = adjoint_problem(p, cfg)?;
    let coker = grid_kernel(&adj, steps, cfg)?;
    let k = p.cyl.a.domain.field.dim_r() as i64;
    Ok(ker.dim() as i64 / k - coker.dim() as i64 / k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::{aps, solve, BoundaryCondition};
    use crate::linalg::{eig_selfadjoint, StructuredMatrix};

    #[test]
    fn oracle_matches_solver_on_the_aps_example() {
        let cfg = ToleranceConfig::default();
        let cyl = crate::bvp::tests::simple_cylinder(&[1.0, -1.0]);
        let model = eig_selfadjoint(&cyl.a, &cfg).unwrap();
        let far_model = eig_selfadjoint(
            &StructuredMatrix::endo(-cyl.a.entries.clone(), cyl.a.domain.clone()),
            &cfg,
        )
        .unwrap();
        let p = CylinderProblem {
            cyl: cyl.clone(),
            length: 1.0,
            condition: ProblemCondition::PerEnd {
                end0: aps(&model, -0.5, &cfg).unwrap(),
                end_l: aps(&far_model, -0.5, &cfg).unwrap(),
            },
            monodromy: None,
        };
        let exact = solve(&p, &cfg).unwrap();
        let oracle_ker = grid_kernel(&p, 10_000, &cfg).unwrap();
        assert_eq!(exact.ker_basis.dim(), oracle_ker.dim());
        assert_eq!(exact.index, grid_index(&p, 10_000, &cfg).unwrap());
    }

    #[test]
    fn transfer_matches_scalar_exponential() {
        let a = Mat::from_row_slice(1, 1, &[0.7]);
        let t = rk4_transfer(&a, 2.0, 1000);
        assert!((t[(0, 0)] - (-1.4_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn full_conditions_constants_example() {
        let cfg = ToleranceConfig::default();
        let cyl = crate::bvp::tests::simple_cylinder(&[0.0]);
        let p = CylinderProblem {
            cyl,
            length: 1.0,
            condition: ProblemCondition::PerEnd {
                end0: BoundaryCondition::plain(Subspace::full(1)),
                end_l: BoundaryCondition::plain(Subspace::full(1)),
            },
            monodromy: None,
        };
        assert_eq!(grid_kernel(&p, 1000, &cfg).unwrap().dim(), 1);
    }
}
