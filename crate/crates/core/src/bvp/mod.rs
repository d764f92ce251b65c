//! Exact boundary-value theory on cylinders and mapping tori.
//!
//! Solutions of `sigma (d/dt + A) psi = 0` on `[0, L]` are flows
//! `psi(t) = e^{-tA} v`, so kernels, cokernels, and indices of boundary
//! problems reduce to intersections of explicit subspaces of the joint
//! boundary space `W + W`. The far end is written in the reversed-collar
//! convention: its boundary operator is `-A` and its symbol `-sigma`.

pub mod oracle;

use crate::adapted::CylinderData;
use crate::linalg::{
    eig_selfadjoint, subspace_meet, subspace_perp, subspace_sum, Mat, SelfAdjointModel,
    StructuredMatrix, Subspace,
};
use crate::signs::torsors::GroupVal;
use crate::{Error, Result, ToleranceConfig};

/// A boundary condition: a subspace of the boundary model, optionally with
/// its nearly-APS decomposition `B = B_APS(-delta) + L_delta`.
#[derive(Debug, Clone)]
pub struct BoundaryCondition {
    pub subspace: Subspace,
    pub nearly_aps: Option<NearlyAps>,
}

#[derive(Debug, Clone)]
pub struct NearlyAps {
    pub delta: f64,
    pub l_delta: Subspace,
}

impl BoundaryCondition {
    pub fn plain(subspace: Subspace) -> Self {
        BoundaryCondition {
            subspace,
            nearly_aps: None,
        }
    }
}

/// End conditions of a cylinder problem: independent conditions at the two
/// ends, or a joint subspace of `W + W` (transmission-type conditions).
#[derive(Debug, Clone)]
pub enum ProblemCondition {
    PerEnd {
        end0: BoundaryCondition,
        end_l: BoundaryCondition,
    },
    Joint {
        space: Subspace,
    },
}

/// A boundary problem for `sigma (d/dt + A)` on a cylinder of the given
/// length. `monodromy` identifies the far fiber with the far boundary
/// model (`psi(L)` is compared against `g * B_L`); mapping-torus problems
/// are expressed through [`closed_kernel`] instead.
#[derive(Debug, Clone)]
pub struct CylinderProblem {
    pub cyl: CylinderData,
    pub length: f64,
    pub condition: ProblemCondition,
    pub monodromy: Option<Mat>,
}

/// Kernel, cokernel, and index of a solved problem.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Initial values `v` of kernel flows.
    pub ker_basis: Subspace,
    /// Initial values of the adjoint-problem kernel flows.
    pub coker_basis: Subspace,
    /// Index over the base field of the boundary model.
    pub index: i64,
    pub ker_dim_k: usize,
    pub coker_dim_k: usize,
    /// Smallest defect-singular-value margin seen in the rank decisions.
    pub condition: f64,
}

/// Smallest cutoff `c >= lo` with both `c` and `-c` admissible.
fn symmetric_admissible(model: &SelfAdjointModel, lo: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let ok = |c: f64| {
        model.spectral_gap_at(c) >= cfg.gap_tol && model.spectral_gap_at(-c) >= cfg.gap_tol
    };
    if ok(lo) {
        return Ok(lo);
    }
    let mut abs_vals: Vec<f64> = model.eigenvalues.iter().map(|l| l.abs()).collect();
    abs_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    abs_vals.dedup_by(|a, b| (*a - *b).abs() < cfg.gap_tol);
    let mut candidates: Vec<f64> = abs_vals
        .windows(2)
        .filter(|w| w[0] >= lo - cfg.gap_tol)
        .map(|w| (w[0] + w[1]) / 2.0)
        .collect();
    candidates.push(abs_vals.last().copied().unwrap_or(lo) + 1.0);
    for c in candidates {
        if c >= lo && ok(c) {
            return Ok(c);
        }
    }
    Err(Error::InadmissibleCutoff {
        cutoff: lo,
        gap_tol: cfg.gap_tol,
    })
}

/// The APS condition at cutoff `delta`: eigenvalues strictly below, with
/// its nearly-APS decomposition recorded at the smallest admissible
/// symmetric cutoff at least `|delta|`.
pub fn aps(model: &SelfAdjointModel, delta: f64, cfg: &ToleranceConfig) -> Result<BoundaryCondition> {
    model.check_admissible(delta, cfg)?;
    let subspace = model.spectral_interval(f64::NEG_INFINITY, delta, cfg)?;
    let d = symmetric_admissible(model, delta.abs(), cfg)?;
    let l_delta = model.spectral_interval(-d, delta, cfg)?;
    Ok(BoundaryCondition {
        subspace,
        nearly_aps: Some(NearlyAps { delta: d, l_delta }),
    })
}

/// A nearly-APS condition `B_APS(-delta) + L_delta`.
pub fn nearly_aps(
    model: &SelfAdjointModel,
    delta: f64,
    l_delta: Subspace,
    cfg: &ToleranceConfig,
) -> Result<BoundaryCondition> {
    model.check_admissible(delta, cfg)?;
    model.check_admissible(-delta, cfg)?;
    let core = model.spectral_interval(f64::NEG_INFINITY, -delta, cfg)?;
    // L_delta must live inside the small-eigenvalue space
    let small = model.spectral_interval(-delta, delta, cfg)?;
    for j in 0..l_delta.basis.ncols() {
        if !small.contains(&l_delta.basis.column(j).into_owned(), 1e-8) {
            return Err(Error::Scenario(
                "nearly-APS part must lie in the small-eigenvalue space".into(),
            ));
        }
    }
    let subspace = subspace_sum(&core, &l_delta, cfg);
    Ok(BoundaryCondition {
        subspace,
        nearly_aps: Some(NearlyAps { delta, l_delta }),
    })
}

/// Rewrite a nearly-APS decomposition at a larger cutoff:
/// `L_eps = Eig_{[-eps, -delta)} + L_delta` leaves the subspace unchanged.
pub fn nearly_aps_rewrite(
    model: &SelfAdjointModel,
    b: &BoundaryCondition,
    eps: f64,
    cfg: &ToleranceConfig,
) -> Result<BoundaryCondition> {
    let Some(na) = &b.nearly_aps else {
        return Err(Error::Scenario("condition carries no nearly-APS data".into()));
    };
    if eps < na.delta {
        return Err(Error::InadmissibleCutoff {
            cutoff: eps,
            gap_tol: cfg.gap_tol,
        });
    }
    let shell = model.spectral_interval(-eps, -na.delta, cfg)?;
    let l_eps = subspace_sum(&shell, &na.l_delta, cfg);
    nearly_aps(model, eps, l_eps, cfg)
}

/// The adjoint condition `B^adj = (sigma B)^perp`.
pub fn adjoint_bc(b: &Subspace, sigma: &Mat, cfg: &ToleranceConfig) -> Subspace {
    let moved = b.map_through(sigma, cfg.rank_tol);
    subspace_perp(&moved)
}

/// Orthonormal basis of the Cauchy data graph
/// `{(v, e^{-LA} v)} ⊂ W + W`, assembled per eigenmode.
pub fn cauchy_graph(model: &SelfAdjointModel, length: f64) -> Subspace {
    let n = model.dim();
    let mut basis = Mat::zeros(2 * n, n);
    let mut col = 0;
    for cl in &model.clusters {
        let f = (-length * cl.value).exp();
        let norm = (1.0 + f * f).sqrt();
        for k in cl.start..cl.start + cl.len {
            let u = model.eigenvectors.column(k);
            for i in 0..n {
                basis[(i, col)] = u[i] / norm;
                basis[(n + i, col)] = f * u[i] / norm;
            }
            col += 1;
        }
    }
    Subspace::from_columns(basis)
}

/// Boundary data of the adjoint problem: `A' = -sigma A sigma^T` with the
/// same boundary space.
pub fn adjoint_boundary_operator(cyl: &CylinderData) -> Mat {
    let s = &cyl.sigma.entries;
    -(s * &cyl.a.entries * s.transpose())
}

fn joint_condition_space(p: &CylinderProblem, cfg: &ToleranceConfig) -> Result<Subspace> {
    let n = p.cyl.a.entries.nrows();
    match &p.condition {
        ProblemCondition::Joint { space } => {
            if space.ambient_dim != 2 * n {
                return Err(Error::DimensionMismatch(
                    "joint condition must live in W + W".into(),
                ));
            }
            Ok(space.clone())
        }
        ProblemCondition::PerEnd { end0, end_l } => {
            let far = match &p.monodromy {
                Some(g) => end_l.subspace.map_through(g, cfg.rank_tol),
                None => end_l.subspace.clone(),
            };
            let b0 = end0.subspace.embed(2 * n, 0);
            let bl = far.embed(2 * n, n);
            Ok(subspace_sum(&b0, &bl, cfg))
        }
    }
}

/// The joint boundary symbol `diag(sigma, -sigma)` of the two-ended
/// problem (the far symbol flips by the reversed-collar convention).
pub fn joint_symbol(cyl: &CylinderData) -> Mat {
    let s = &cyl.sigma.entries;
    let n = s.nrows();
    let mut m = Mat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(s);
    m.view_mut((n, n), (n, n)).copy_from(&(-s));
    m
}

/// Adjoint of a joint condition: `(sigma_joint C)^perp`.
pub fn joint_adjoint(cyl: &CylinderData, c: &Subspace, cfg: &ToleranceConfig) -> Subspace {
    adjoint_bc(c, &joint_symbol(cyl), cfg)
}

/// Adjoint problem of `p`, with the adjoint joint condition.
pub fn adjoint_problem(p: &CylinderProblem, cfg: &ToleranceConfig) -> Result<CylinderProblem> {
    let c = joint_condition_space(p, cfg)?;
    let c_adj = joint_adjoint(&p.cyl, &c, cfg);
    let mut cyl = p.cyl.clone();
    cyl.a = StructuredMatrix::endo(adjoint_boundary_operator(&p.cyl), p.cyl.a.domain.clone());
    cyl.sigma = StructuredMatrix::endo(-p.cyl.sigma.entries.transpose(), p.cyl.sigma.domain.clone());
    Ok(CylinderProblem {
        cyl,
        length: p.length,
        condition: ProblemCondition::Joint { space: c_adj },
        monodromy: None,
    })
}

fn kernel_of(
    model: &SelfAdjointModel,
    length: f64,
    joint: &Subspace,
    cfg: &ToleranceConfig,
) -> Result<(Subspace, f64)> {
    let n = model.dim();
    let graph = cauchy_graph(model, length);
    let meet = subspace_meet(&graph, joint, cfg)?;
    // margin diagnostic: smallest defect singular value above the threshold
    let margin = {
        let d = 2 * n;
        let id = Mat::identity(d, d);
        let mut stacked = Mat::zeros(2 * d, d);
        stacked
            .view_mut((0, 0), (d, d))
            .copy_from(&(&id - graph.projector()));
        stacked
            .view_mut((d, 0), (d, d))
            .copy_from(&(&id - joint.projector()));
        let svd = stacked.svd(false, false);
        let mut above = f64::INFINITY;
        for &sv in svd.singular_values.iter() {
            if sv > cfg.rank_tol && sv < above {
                above = sv;
            }
        }
        above
    };
    // initial values: first components of the meet basis
    let mut v_cols = Mat::zeros(n, meet.dim());
    for j in 0..meet.dim() {
        for i in 0..n {
            v_cols[(i, j)] = meet.basis[(i, j)];
        }
    }
    Ok((Subspace::from_spanning(n, &v_cols, cfg.rank_tol), margin))
}

/// Solve the boundary problem: kernel, adjoint kernel, and index over the
/// base field of the boundary model.
pub fn solve(p: &CylinderProblem, cfg: &ToleranceConfig) -> Result<SolveResult> {
    let model = eig_selfadjoint(&p.cyl.a, cfg)?;
    let joint = joint_condition_space(p, cfg)?;
    let (ker, margin1) = kernel_of(&model, p.length, &joint, cfg)?;

    let adj = adjoint_problem(p, cfg)?;
    let adj_model = eig_selfadjoint(&adj.cyl.a, cfg)?;
    let adj_joint = joint_condition_space(&adj, cfg)?;
    let (coker, margin2) = kernel_of(&adj_model, p.length, &adj_joint, cfg)?;

    let k = p.cyl.a.domain.field.dim_r();
    if ker.dim() % k != 0 || coker.dim() % k != 0 {
        return Err(Error::Verification(format!(
            "kernel dimensions {} / {} are not multiples of the field dimension {k}",
            ker.dim(),
            coker.dim()
        )));
    }
    let ker_dim_k = ker.dim() / k;
    let coker_dim_k = coker.dim() / k;
    Ok(SolveResult {
        index: ker_dim_k as i64 - coker_dim_k as i64,
        ker_basis: ker,
        coker_basis: coker,
        ker_dim_k,
        coker_dim_k,
        condition: margin1.min(margin2),
    })
}

/// Index of the problem in the coefficient group of the cylinder class.
pub fn index_group_value(p: &CylinderProblem, r: &SolveResult) -> GroupVal {
    match p.cyl.ell_cyl % 8 {
        0 | 4 => GroupVal::Z(r.index),
        1 | 2 => GroupVal::Z2((r.ker_dim_k % 2) as u8),
        _ => GroupVal::Zero,
    }
}

/// Cauchy data of the two-ended problem: the graph subspace of `W + W`.
pub fn cauchy_data(p: &CylinderProblem, cfg: &ToleranceConfig) -> Result<Subspace> {
    let model = eig_selfadjoint(&p.cyl.a, cfg)?;
    Ok(cauchy_graph(&model, p.length))
}

/// The small-eigenvalue space of the joint boundary operator
/// `diag(A, -A)` at cutoff `delta`.
pub fn joint_small_space(
    model: &SelfAdjointModel,
    delta: f64,
    cfg: &ToleranceConfig,
) -> Result<Subspace> {
    let n = model.dim();
    let w0 = model.spectral_interval(-delta, delta, cfg)?;
    // Eig_{[-d, d]}(-A) = Eig_{[-d, d]}(A) as a subspace
    let a = w0.embed(2 * n, 0);
    let b = w0.embed(2 * n, n);
    Ok(subspace_sum(&a, &b, cfg))
}

/// `delta`-projected Cauchy data of the problem (projection of the Cauchy
/// graph onto the joint small-eigenvalue space, relative to the joint APS
/// core).
pub fn projected_cauchy_data(
    p: &CylinderProblem,
    delta: f64,
    cfg: &ToleranceConfig,
) -> Result<Subspace> {
    let model = eig_selfadjoint(&p.cyl.a, cfg)?;
    model.check_admissible(delta, cfg)?;
    model.check_admissible(-delta, cfg)?;
    let n = model.dim();
    let graph = cauchy_graph(&model, p.length);
    // joint APS core: Eig_{(-inf, -d)}(A) at the near end, Eig_{(-inf,-d)}(-A)
    // = Eig_{(d, inf)}(A) at the far end
    let core0 = model
        .spectral_interval(f64::NEG_INFINITY, -delta, cfg)?
        .embed(2 * n, 0);
    let core_l = model
        .spectral_interval(delta, f64::INFINITY, cfg)?
        .embed(2 * n, n);
    let core = subspace_sum(&core0, &core_l, cfg);
    let small = joint_small_space(&model, delta, cfg)?;
    let admissible = subspace_sum(&core, &small, cfg);
    let inside = subspace_meet(&graph, &admissible, cfg)?;
    Ok(inside.map_through(&small.projector(), cfg.rank_tol))
}

/// Kernel of the mapping torus: the fixed space of `g^{-1} e^{-LA}`.
pub fn closed_kernel(
    model: &SelfAdjointModel,
    length: f64,
    g: &Mat,
    cfg: &ToleranceConfig,
) -> Subspace {
    let n = model.dim();
    let flow = model.flow_map(length);
    let m = g.transpose() * flow - Mat::identity(n, n);
    let svd = m.svd(false, true);
    let vt = svd.v_t.as_ref().expect("svd v_t");
    let mut cols = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cfg.rank_tol * svd.singular_values.max().max(1.0) {
            cols.push(vt.row(k).transpose());
        }
    }
    let mut basis = Mat::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        basis.set_column(j, c);
    }
    Subspace::from_spanning(n, &basis, cfg.rank_tol)
}

/// Index of the mapping torus problem in the coefficient group of the
/// cylinder class.
pub fn closed_index(
    cyl: &CylinderData,
    length: f64,
    g: &Mat,
    cfg: &ToleranceConfig,
) -> Result<GroupVal> {
    let model = eig_selfadjoint(&cyl.a, cfg)?;
    let ker = closed_kernel(&model, length, g, cfg);
    // adjoint torus: A' = -sigma A sigma^T, monodromy sigma g sigma^T
    let s = &cyl.sigma.entries;
    let a_adj = adjoint_boundary_operator(cyl);
    let adj_model = eig_selfadjoint(&StructuredMatrix::endo(a_adj, cyl.a.domain.clone()), cfg)?;
    let g_adj = s * g * s.transpose();
    let coker = closed_kernel(&adj_model, length, &g_adj, cfg);
    let k = cyl.a.domain.field.dim_r();
    let ker_k = ker.dim() / k;
    let coker_k = coker.dim() / k;
    Ok(match cyl.ell_cyl % 8 {
        0 | 4 => GroupVal::Z(ker_k as i64 - coker_k as i64),
        1 | 2 => GroupVal::Z2((ker_k % 2) as u8),
        _ => GroupVal::Zero,
    })
}

/// The transmission condition of a cut mapping torus: the graph
/// `{(v, g v)} ⊂ W + W`.
pub fn transmission_condition(n: usize, g: &Mat) -> Subspace {
    let mut basis = Mat::zeros(2 * n, n);
    for j in 0..n {
        basis[(j, j)] = 1.0;
        for i in 0..n {
            basis[(n + i, j)] = g[(i, j)];
        }
    }
    let scale = (2.0_f64).sqrt().recip();
    Subspace::from_columns(basis * scale)
}

/// The deformation path from the transmission condition to the nearly-APS
/// condition `B_APS(-delta) + Gamma(g|_{small})`, sampled at `samples + 1`
/// joint subspaces including both endpoints.
pub fn transmission_deformation(
    model: &SelfAdjointModel,
    g: &Mat,
    delta: f64,
    samples: usize,
    cfg: &ToleranceConfig,
) -> Result<Vec<Subspace>> {
    model.check_admissible(delta, cfg)?;
    model.check_admissible(-delta, cfg)?;
    let n = model.dim();
    let low = model.spectral_interval(f64::NEG_INFINITY, -delta, cfg)?;
    let mid = model.spectral_interval(-delta, delta, cfg)?;
    let high = model.spectral_interval(delta, f64::INFINITY, cfg)?;
    let mut out = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let s = k as f64 / samples as f64;
        // low modes: (a, (1-s) g a); mid: (b, g b); high: ((1-s) c, g c)
        let mut cols: Vec<Mat> = Vec::new();
        let mut push_pair = |near: &Mat, far: &Mat| {
            let mut col = Mat::zeros(2 * n, 1);
            col.view_mut((0, 0), (n, 1)).copy_from(near);
            col.view_mut((n, 0), (n, 1)).copy_from(far);
            cols.push(col);
        };
        for j in 0..low.dim() {
            let a: Mat = low.basis.columns(j, 1).into_owned();
            push_pair(&a, &((g * &a) * (1.0 - s)));
        }
        for j in 0..mid.dim() {
            let b: Mat = mid.basis.columns(j, 1).into_owned();
            push_pair(&b, &(g * &b));
        }
        for j in 0..high.dim() {
            let c0: Mat = high.basis.columns(j, 1).into_owned();
            push_pair(&(&c0 * (1.0 - s)), &(g * &c0));
        }
        let mut m = Mat::zeros(2 * n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            m.set_column(j, &c.column(0).into_owned());
        }
        out.push(Subspace::from_spanning(2 * n, &m, cfg.rank_tol));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapted::{make_cylinder, AdaptedOperator};
    use crate::linalg::KStructure;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    pub(crate) fn simple_cylinder(a_diag: &[f64]) -> CylinderData {
        // class 7 (symmetric real) source gives sigma = id, A = D
        let n = a_diag.len();
        let mut m = Mat::zeros(n, n);
        for (i, &v) in a_diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        let d = AdaptedOperator::new(
            7,
            StructuredMatrix::new(m, KStructure::real(n), KStructure::real(n)),
        );
        make_cylinder(&d, &cfg()).unwrap()
    }

    #[test]
    fn aps_examples() {
        let c = cfg();
        let cyl = simple_cylinder(&[-1.0, 0.0, 2.0]);
        let model = eig_selfadjoint(&cyl.a, &c).unwrap();
        // delta just below zero picks only the negative mode
        let b = aps(&model, -0.5, &c).unwrap();
        assert_eq!(b.subspace.dim(), 1);
        let b = aps(&model, 1.0, &c).unwrap();
        assert_eq!(b.subspace.dim(), 2);

        // rewriting the nearly-APS cutoff reproduces the same subspace
        let na = nearly_aps(
            &model,
            0.5,
            model.spectral_interval(-0.2, 0.2, &c).unwrap(),
            &c,
        )
        .unwrap();
        let rw = nearly_aps_rewrite(&model, &na, 1.5, &c).unwrap();
        assert_eq!(na.subspace.dim(), rw.subspace.dim());
        assert!(na.subspace.max_principal_angle(&rw.subspace) < 1e-9);
    }

    #[test]
    fn adjoint_bc_examples() {
        let c = cfg();
        let sigma = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = Subspace::from_columns(Mat::from_column_slice(2, 1, &[1.0, 0.0]));
        let adj = adjoint_bc(&b, &sigma, &c);
        assert_eq!(adj.dim(), 1);
        assert!(adj.contains(&nalgebra::DVector::from_vec(vec![0.0, 1.0]), 1e-9));

        // double adjoint returns the original when sigma^2 = 1
        let dadj = adjoint_bc(&adjoint_bc(&b, &sigma, &c), &sigma, &c);
        assert!(dadj.max_principal_angle(&b) < 1e-9);
    }

    #[test]
    fn solve_basic_examples() {
        let c = cfg();
        // A = diag(1, -1), APS(0-) both ends: trivial kernel and cokernel
        let cyl = simple_cylinder(&[1.0, -1.0]);
        let model = eig_selfadjoint(&cyl.a, &c).unwrap();
        let b0 = aps(&model, -0.5, &c).unwrap();
        // far end uses -A: APS(0-) of -A picks the +1 mode of A
        let far_model = eig_selfadjoint(
            &StructuredMatrix::endo(-cyl.a.entries.clone(), cyl.a.domain.clone()),
            &c,
        )
        .unwrap();
        let bl = aps(&far_model, -0.5, &c).unwrap();
        let p = CylinderProblem {
            cyl: cyl.clone(),
            length: 1.0,
            condition: ProblemCondition::PerEnd { end0: b0, end_l: bl },
            monodromy: None,
        };
        let r = solve(&p, &c).unwrap();
        assert_eq!((r.ker_dim_k, r.coker_dim_k, r.index), (0, 0, 0));

        // A = 0 on R, full conditions both ends: constants, dim 1
        let cyl = simple_cylinder(&[0.0]);
        let p = CylinderProblem {
            cyl,
            length: 1.0,
            condition: ProblemCondition::PerEnd {
                end0: BoundaryCondition::plain(Subspace::full(1)),
                end_l: BoundaryCondition::plain(Subspace::full(1)),
            },
            monodromy: None,
        };
        let r = solve(&p, &c).unwrap();
        assert_eq!(r.ker_dim_k, 1);
        assert_eq!(r.index, 1); // adjoint condition is zero at both ends
    }

    #[test]
    fn enlarging_by_one_dim_raises_index_by_one() {
        let c = cfg();
        let cyl = simple_cylinder(&[1.4, -0.3, 0.8, -2.0]);
        let model = eig_selfadjoint(&cyl.a, &c).unwrap();
        let far_model = eig_selfadjoint(
            &StructuredMatrix::endo(-cyl.a.entries.clone(), cyl.a.domain.clone()),
            &c,
        )
        .unwrap();
        let bl = aps(&far_model, 0.5, &c).unwrap();
        let b1 = aps(&model, -0.5, &c).unwrap();
        let mid = model.spectral_interval(-0.5, 0.5, &c).unwrap();
        // enlarge by a one-dimensional piece of the small space
        let one = Subspace::from_columns(mid.basis.columns(0, 1).into_owned());
        let b2 = nearly_aps(&model, 0.5, one, &c).unwrap();
        assert_eq!(b2.subspace.dim(), b1.subspace.dim() + 1);
        let solve_with = |b: BoundaryCondition| {
            let p = CylinderProblem {
                cyl: cyl.clone(),
                length: 1.0,
                condition: ProblemCondition::PerEnd {
                    end0: b,
                    end_l: bl.clone(),
                },
                monodromy: None,
            };
            solve(&p, &c).unwrap()
        };
        let r1 = solve_with(b1);
        let r2 = solve_with(b2);
        assert_eq!(r2.index, r1.index + 1);
    }

    #[test]
    fn closed_kernel_examples() {
        let c = cfg();
        // invertible A, g = id: no fixed vectors
        let cyl = simple_cylinder(&[1.0, -2.0]);
        let model = eig_selfadjoint(&cyl.a, &c).unwrap();
        let g = Mat::identity(2, 2);
        assert_eq!(closed_kernel(&model, 1.0, &g, &c).dim(), 0);

        // 2-dim kernel of A, g = id: kernel dimension 2
        let cyl = simple_cylinder(&[0.0, 0.0, 3.0]);
        let model = eig_selfadjoint(&cyl.a, &c).unwrap();
        let g = Mat::identity(3, 3);
        assert_eq!(closed_kernel(&model, 1.0, &g, &c).dim(), 2);

        // rotation by pi on the kernel: no fixed vectors
        let mut g = Mat::identity(3, 3);
        g[(0, 0)] = -1.0;
        g[(1, 1)] = -1.0;
        assert_eq!(closed_kernel(&model, 1.0, &g, &c).dim(), 0);
    }

    #[test]
    fn cut_and_transmit_preserves_kernel_and_index() {
        let c = cfg();
        let cyl = simple_cylinder(&[0.7, -1.1, 0.0, 1.9]);
        let model = eig_selfadjoint(&cyl.a, &c).unwrap();
        let n = model.dim();
        let g = Mat::identity(n, n);
        let torus_dim = closed_kernel(&model, 1.0, &g, &c).dim();

        let trans = transmission_condition(n, &g);
        let p = CylinderProblem {
            cyl: cyl.clone(),
            length: 1.0,
            condition: ProblemCondition::Joint { space: trans },
            monodromy: None,
        };
        let r = solve(&p, &c).unwrap();
        assert_eq!(r.ker_basis.dim(), torus_dim);

        // deformation path: index constant across all samples
        let path = transmission_deformation(&model, &g, 0.5, 20, &c).unwrap();
        let mut indices = Vec::new();
        for space in path {
            let p = CylinderProblem {
                cyl: cyl.clone(),
                length: 1.0,
                condition: ProblemCondition::Joint { space },
                monodromy: None,
            };
            indices.push(solve(&p, &c).unwrap().index);
        }
        assert!(indices.windows(2).all(|w| w[0] == w[1]), "{indices:?}");

        // the diagonal inside the small space is isotropic for the joint form
        let small = joint_small_space(&model, 0.5, &c).unwrap();
        let diag = transmission_condition(n, &g);
        let inter = subspace_meet(&small, &diag, &c).unwrap();
        let beta = joint_symbol(&cyl);
        let m = inter.basis.transpose() * &beta * &inter.basis;
        assert!(m.amax() < 1e-9);
    }

    #[test]
    fn single_mode_cauchy_graph() {
        let c = cfg();
        let cyl = simple_cylinder(&[0.8]);
        let p = CylinderProblem {
            cyl,
            length: 2.0,
            condition: ProblemCondition::PerEnd {
                end0: BoundaryCondition::plain(Subspace::full(1)),
                end_l: BoundaryCondition::plain(Subspace::full(1)),
            },
            monodromy: None,
        };
        let graph = cauchy_data(&p, &c).unwrap();
        assert_eq!(graph.dim(), 1);
        let v = graph.basis.column(0);
        let ratio = v[1] / v[0];
        assert!((ratio - (-0.8_f64 * 2.0).exp()).abs() < 1e-12);
    }
}
