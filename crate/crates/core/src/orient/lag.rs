//! The small-eigenvalue quadratic space of a boundary operator, its
//! Lagrangian subspaces in graph form, and their orientation charts.
//!
//! For a class-0 operator the space splits as `V+ + V-` with the form
//! `<,>_+ - <,>_-` and every Lagrangian is the graph of a unique orthogonal
//! map `f: V+ -> V-`; for class 1 Lagrangians correspond to orthogonal
//! complex structures `J` on the small space of the operator itself.

use crate::exact::{rat, Rat, RatMat};
use crate::linalg::{subspace_meet, Mat, Subspace};
use crate::signs::lines::dual_basis_in_span;
use crate::spectral::det::DetElement;
use crate::spectral::pf::PfElement;
use crate::spectral::{rationalize, FredholmModel};
use crate::{Error, Result, ToleranceConfig};
use num::traits::One;

/// The split quadratic space `W_delta = V+ + V-` of a class-0 boundary
/// pair, with frames expressed in the boundary coordinates `W = E0 + E1`.
#[derive(Debug, Clone)]
pub struct SplitQuadraticSpace {
    pub delta: f64,
    /// Frame of `V+` embedded in `W` (`dim W x p`).
    pub plus_frame: Mat,
    /// Frame of `V-` embedded in `W`.
    pub minus_frame: Mat,
    /// The boundary symbol on `W`, defining the form `b(x, y) = <sigma x, y>`.
    pub sigma: Mat,
}

impl SplitQuadraticSpace {
    /// Assemble from the Fredholm model of `D`: `V+` sits in the first
    /// block, `V-` in the second, of `W = E0 + E1`.
    pub fn from_model(model: &FredholmModel, sigma: &Mat, delta: f64) -> Result<Self> {
        model.check_admissible(delta)?;
        let p = model.v_plus_basis(-1.0, delta);
        let m = model.v_minus_basis(-1.0, delta);
        let (n0, n1) = (model.dim_in(), model.dim_out());
        let total = n0 + n1;
        let mut plus_frame = Mat::zeros(total, p.ncols());
        plus_frame.view_mut((0, 0), (n0, p.ncols())).copy_from(&p);
        let mut minus_frame = Mat::zeros(total, m.ncols());
        minus_frame.view_mut((n0, 0), (n1, m.ncols())).copy_from(&m);
        Ok(SplitQuadraticSpace {
            delta,
            plus_frame,
            minus_frame,
            sigma: sigma.clone(),
        })
    }

    pub fn dim_plus(&self) -> usize {
        self.plus_frame.ncols()
    }

    pub fn dim_minus(&self) -> usize {
        self.minus_frame.ncols()
    }

    /// Basis of the whole small space.
    pub fn whole(&self) -> Mat {
        let n = self.plus_frame.nrows();
        let mut w = Mat::zeros(n, self.dim_plus() + self.dim_minus());
        w.view_mut((0, 0), (n, self.dim_plus())).copy_from(&self.plus_frame);
        w.view_mut((0, self.dim_plus()), (n, self.dim_minus()))
            .copy_from(&self.minus_frame);
        w
    }

    /// The form `b` restricted to the frames: should be `diag(1, -1)`.
    pub fn gram(&self) -> Mat {
        let w = self.whole();
        w.transpose() * &self.sigma * w
    }

    /// Inertia index (signature) of the restricted form.
    pub fn inertia_index(&self) -> Result<i64> {
        let g = self.gram();
        if g.nrows() == 0 {
            return Ok(0);
        }
        let sym = (&g + &g.transpose()) * 0.5;
        let (vals, _) = crate::linalg::jacobi_eigen(&sym);
        let mut pos = 0i64;
        let mut neg = 0i64;
        for &l in vals.iter() {
            if l > 1e-9 {
                pos += 1;
            } else if l < -1e-9 {
                neg += 1;
            } else {
                return Err(Error::DegeneratePairing(
                    "small-space form is degenerate".into(),
                ));
            }
        }
        Ok(pos - neg)
    }
}

/// A Lagrangian of a split space, stored as the orthogonal graph map in
/// frame coordinates.
#[derive(Debug, Clone)]
pub struct GraphLagrangian {
    pub delta: f64,
    /// Orthogonal `dim_minus x dim_plus` matrix in frame coordinates.
    pub f: Mat,
}

impl GraphLagrangian {
    pub fn identity_graph(space: &SplitQuadraticSpace) -> Result<Self> {
        if space.dim_plus() != space.dim_minus() {
            return Err(Error::GradingMismatch(
                format!("dim V+ = {}", space.dim_plus()),
                format!("dim V- = {}", space.dim_minus()),
            ));
        }
        Ok(GraphLagrangian {
            delta: space.delta,
            f: Mat::identity(space.dim_minus(), space.dim_plus()),
        })
    }

    /// Flip one column: moves to the other path component.
    pub fn flipped(&self) -> Self {
        let mut f = self.f.clone();
        if f.ncols() > 0 {
            let c = -f.column(0);
            f.set_column(0, &c);
        }
        GraphLagrangian {
            delta: self.delta,
            f,
        }
    }

    /// The subspace `Gamma(f) = {v + f(v)}` in boundary coordinates.
    pub fn subspace(&self, space: &SplitQuadraticSpace) -> Subspace {
        let cols = self.f.ncols();
        let n = space.plus_frame.nrows();
        let mut basis = Mat::zeros(n, cols);
        let imgs = &space.minus_frame * &self.f;
        for j in 0..cols {
            let col = (space.plus_frame.column(j) + imgs.column(j)) / 2.0_f64.sqrt();
            basis.set_column(j, &col);
        }
        Subspace::from_columns(basis)
    }

    /// Extract the graph map of a Lagrangian subspace; errors when the
    /// subspace is not a graph of an orthogonal map (not Lagrangian).
    pub fn from_subspace(
        space: &SplitQuadraticSpace,
        l: &Subspace,
        _cfg: &ToleranceConfig,
    ) -> Result<Self> {
        if space.dim_plus() != space.dim_minus() {
            return Err(Error::NotLagrangian("inertia index is nonzero".into()));
        }
        let p = space.plus_frame.transpose() * &l.basis;
        let m = space.minus_frame.transpose() * &l.basis;
        // solve f * p = m
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotLagrangian("subspace is not a graph over V+".into()))?;
        let f = m * p_inv;
        let g = f.transpose() * &f;
        if (g - Mat::identity(f.ncols(), f.ncols())).amax() > 1e-7 {
            return Err(Error::NotLagrangian("graph map is not orthogonal".into()));
        }
        Ok(GraphLagrangian {
            delta: space.delta,
            f,
        })
    }

    /// Stabilize into the larger space: the added shell is the graph of
    /// `-J` on the new modes, in frame coordinates.
    pub fn stabilize(
        &self,
        model: &FredholmModel,
        space_small: &SplitQuadraticSpace,
        space_big: &SplitQuadraticSpace,
    ) -> Result<GraphLagrangian> {
        if space_big.delta < self.delta {
            return Err(Error::InadmissibleCutoff {
                cutoff: space_big.delta,
                gap_tol: model.cfg.gap_tol,
            });
        }
        let shell_plus = model.v_plus_basis(self.delta, space_big.delta);
        let k = shell_plus.ncols();
        let p_old = space_small.dim_plus();
        let p_new = space_big.dim_plus();
        if p_old + k != p_new {
            return Err(Error::Verification("stabilization dims disagree".into()));
        }
        let mut f_big = Mat::zeros(space_big.dim_minus(), p_new);
        f_big.view_mut((0, 0), (p_old, p_old)).copy_from(&self.f);
        if k > 0 {
            let j_shell = model.j_map(&shell_plus)?;
            // coordinates of -J(shell) in the big minus frame
            let minus_block = space_big
                .minus_frame
                .view((model.dim_in(), 0), (model.dim_out(), space_big.dim_minus()))
                .into_owned();
            let coords = minus_block.transpose() * &(-&j_shell);
            f_big.view_mut((p_old, p_old), (space_big.dim_minus() - p_old, k))
                .copy_from(&coords.view((p_old, 0), (space_big.dim_minus() - p_old, k)).into_owned());
        }
        // re-verify orthogonality
        let g = f_big.transpose() * &f_big;
        if (g - Mat::identity(p_new, p_new)).amax() > 1e-8 {
            return Err(Error::Verification(
                "stabilized graph map lost orthogonality".into(),
            ));
        }
        Ok(GraphLagrangian {
            delta: space_big.delta,
            f: f_big,
        })
    }

    /// Exact determinant sign of the graph map.
    pub fn det_sign(&self) -> Result<i8> {
        let d = rationalize(&self.f).det();
        if d == Rat::one() || crate::exact::rat_to_f64(&d) > 0.0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    /// The orientation chart image per the graded sign rule:
    /// `Gamma(f) -> (-1)^{dim V+} O(det f)`, as a determinant-line point of
    /// the underlying operator at the same cutoff.
    pub fn orientation(&self, model: &FredholmModel) -> Result<DetElement> {
        let plus_ref = rationalize(&model.v_plus_basis(-1.0, self.delta));
        let minus_ref = rationalize(&model.v_minus_basis(-1.0, self.delta));
        let f_rat = rationalize(&self.f);
        // images f(v_i) in ambient minus coordinates
        let imgs = &minus_ref * &f_rat;
        let n = imgs.ncols();
        let dual = if n == 0 {
            RatMat::zeros(minus_ref.nrows(), 0)
        } else {
            let d = dual_basis_in_span(&imgs)?;
            RatMat::from_fn(d.nrows(), n, |i, j| d[(i, n - 1 - j)].clone())
        };
        let sign = if plus_ref.ncols() % 2 == 0 { 1 } else { -1 };
        Ok(DetElement {
            delta: self.delta,
            plus_word: plus_ref,
            minus_dual_word: dual,
            coeff: rat(sign),
        })
    }
}

/// Intersection dimension of two graph Lagrangians: the `+1`-eigenspace of
/// `f1 f2^{-1}`, cross-checked against the direct subspace intersection.
pub fn graph_intersection_dim(
    space: &SplitQuadraticSpace,
    l1: &GraphLagrangian,
    l2: &GraphLagrangian,
    cfg: &ToleranceConfig,
) -> Result<usize> {
    let m = &l1.f * l2.f.transpose();
    let n = m.nrows();
    let by_eig = if n == 0 {
        0
    } else {
        let (vals, _) = crate::linalg::jacobi_eigen(&((&m + &m.transpose()) * 0.5));
        vals.iter().filter(|&&l| (l - 1.0).abs() < 1e-7).count()
    };
    let s1 = l1.subspace(space);
    let s2 = l2.subspace(space);
    let direct = subspace_meet(&s1, &s2, cfg)?.dim();
    if by_eig != direct {
        return Err(Error::Verification(format!(
            "graph intersection mismatch: eigenspace {by_eig} vs direct {direct} (n = {n})"
        )));
    }
    Ok(direct)
}

/// A complex-structure Lagrangian for class-1 boundary data: an orthogonal
/// complex structure on the small space of the skew operator itself, in
/// frame coordinates.
#[derive(Debug, Clone)]
pub struct ComplexLagrangian {
    pub delta: f64,
    /// `J` in the coordinates of the small-space frame of the skew model.
    pub j: Mat,
}

impl ComplexLagrangian {
    /// Structure checks: orthogonal, skew, squares to `-1`.
    pub fn validate(&self) -> Result<()> {
        let n = self.j.nrows();
        let id = Mat::identity(n, n);
        if (&self.j * &self.j + &id).amax() > 1e-8
            || (&self.j + &self.j.transpose()).amax() > 1e-8
            || (&self.j * &self.j.transpose() - &id).amax() > 1e-8
        {
            return Err(Error::NotLagrangian(
                "not an orthogonal complex structure".into(),
            ));
        }
        Ok(())
    }

    /// The canonical structure on the small frame: pair the modes through
    /// the operator itself (`J = D / lambda`), which exists off the kernel;
    /// on the kernel pair consecutive frame vectors.
    pub fn canonical(model: &FredholmModel, delta: f64) -> Result<Self> {
        model.check_admissible(delta)?;
        let frame = model.v_plus_basis(-1.0, delta);
        let n = frame.ncols();
        if n % 2 != 0 {
            return Err(Error::NotLagrangian(
                "odd-dimensional small space admits no complex structure".into(),
            ));
        }
        let mut j = Mat::zeros(n, n);
        // kernel block: pair consecutive columns
        let ker = model.v_plus_basis(-1.0, model.kernel_cutoff().min(delta));
        let k = ker.ncols();
        if k % 2 != 0 {
            return Err(Error::NotLagrangian("odd kernel dimension".into()));
        }
        for p in 0..k / 2 {
            j[(2 * p + 1, 2 * p)] = 1.0;
            j[(2 * p, 2 * p + 1)] = -1.0;
        }
        // nonzero modes: J = D / lambda in frame coordinates
        if n > k {
            let shell = model.v_plus_basis(model.kernel_cutoff().min(delta), delta);
            let js = model.j_map(&shell)?;
            let coords = frame.transpose() * &js;
            j.view_mut((0, k), (n, n - k)).copy_from(&coords);
        }
        let out = ComplexLagrangian { delta, j };
        out.validate()?;
        Ok(out)
    }

    /// The other path component: conjugate by a reflection.
    pub fn flipped(&self) -> Self {
        let n = self.j.nrows();
        let mut r = Mat::identity(n, n);
        if n > 0 {
            r[(0, 0)] = -1.0;
        }
        ComplexLagrangian {
            delta: self.delta,
            j: &r * &self.j * &r,
        }
    }

    /// Stabilize to a larger cutoff: extend by `J = D / lambda` on the
    /// shell modes.
    pub fn stabilize(&self, model: &FredholmModel, eps: f64) -> Result<ComplexLagrangian> {
        model.check_admissible(eps)?;
        let old = model.v_plus_basis(-1.0, self.delta);
        let shell = model.v_plus_basis(self.delta, eps);
        let n_old = old.ncols();
        let n = n_old + shell.ncols();
        let mut j = Mat::zeros(n, n);
        j.view_mut((0, 0), (n_old, n_old)).copy_from(&self.j);
        if shell.ncols() > 0 {
            let js = model.j_map(&shell)?;
            let coords = shell.transpose() * &js;
            j.view_mut((n_old, n_old), (shell.ncols(), shell.ncols()))
                .copy_from(&coords);
        }
        let out = ComplexLagrangian { delta: eps, j };
        out.validate()?;
        Ok(out)
    }

    /// The Lagrangian subspace `{(v, -J v)}` in the doubled boundary
    /// coordinates `W = E0 + E0`.
    pub fn subspace(&self, model: &FredholmModel) -> Subspace {
        let frame = model.v_plus_basis(-1.0, self.delta);
        let n0 = frame.nrows();
        let cols = frame.ncols();
        let imgs = &frame * &self.j;
        let mut basis = Mat::zeros(2 * n0, cols);
        for jx in 0..cols {
            let mut col = nalgebra::DVector::zeros(2 * n0);
            for i in 0..n0 {
                col[i] = frame[(i, jx)] / 2.0_f64.sqrt();
                col[n0 + i] = -imgs[(i, jx)] / 2.0_f64.sqrt();
            }
            basis.set_column(jx, &col);
        }
        Subspace::from_columns(basis)
    }

    /// Orientation chart image: `L(J) -> (-1)^{dim_C V} R_{>0} omega(J)`,
    /// as a Pfaffian-line point of the skew operator at the same cutoff.
    pub fn orientation(&self, model: &FredholmModel) -> Result<PfElement> {
        let frame = model.v_plus_basis(-1.0, self.delta);
        let frame_rat = rationalize(&frame);
        // ambient J: frame * j * frame^T
        let j_amb = &frame * &self.j * frame.transpose();
        let omega = crate::signs::lines::omega_of_j_with_tol(
            &rationalize(&j_amb),
            &frame_rat,
            1e-8,
        )?;
        let dim_c = frame.ncols() / 2;
        let sign = if dim_c % 2 == 0 { 1 } else { -1 };
        Ok(PfElement {
            delta: self.delta,
            word: omega.factors[0].vectors.clone(),
            coeff: &omega.coeff * &rat(sign),
        })
    }
}

/// Intersection dimension `dim L(J1) ∩ L(J2) = dim Eig_{-1}(J1 J2)`,
/// cross-checked against the direct intersection in the doubled space.
pub fn complex_intersection_dim(
    model: &FredholmModel,
    l1: &ComplexLagrangian,
    l2: &ComplexLagrangian,
    cfg: &ToleranceConfig,
) -> Result<usize> {
    let m = &l1.j * &l2.j;
    let by_eig = if m.nrows() == 0 {
        0
    } else {
        let (vals, _) = crate::linalg::jacobi_eigen(&((&m + &m.transpose()) * 0.5));
        vals.iter().filter(|&&l| (l + 1.0).abs() < 1e-7).count()
    };
    let s1 = l1.subspace(model);
    let s2 = l2.subspace(model);
    let direct = subspace_meet(&s1, &s2, cfg)?.dim();
    if by_eig != direct {
        return Err(Error::Verification(format!(
            "complex Lagrangian intersection mismatch: {by_eig} vs {direct}"
        )));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ToleranceConfig;

    #[test]
    fn split_space_of_zero_map_on_r() {
        // D = 0 on R: W = R^2, form diag(1, -1), inertia 0
        let cfg = ToleranceConfig::default();
        let model = FredholmModel::new(Mat::zeros(1, 1), &cfg).unwrap();
        let sigma = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let w = SplitQuadraticSpace::from_model(&model, &sigma, 1.0).unwrap();
        assert_eq!((w.dim_plus(), w.dim_minus()), (1, 1));
        assert_eq!(w.inertia_index().unwrap(), 0);
        let g = w.gram();
        assert!((g - Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).amax() < 1e-12);

        // invertible D, delta below the spectrum: zero space
        let model = FredholmModel::new(Mat::identity(2, 2) * 3.0, &cfg).unwrap();
        let sigma = Mat::identity(4, 4);
        let w = SplitQuadraticSpace::from_model(&model, &sigma, 1.0).unwrap();
        assert_eq!((w.dim_plus(), w.dim_minus()), (0, 0));
    }

    #[test]
    fn every_lagrangian_is_a_graph_and_intersections_match() {
        let cfg = ToleranceConfig::default();
        // D with a 2-dim kernel and one low mode on each side
        let d = Mat::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let model = FredholmModel::new(d, &cfg).unwrap();
        let mut sigma = Mat::identity(6, 6);
        for i in 3..6 {
            sigma[(i, i)] = -1.0;
        }
        let w = SplitQuadraticSpace::from_model(&model, &sigma, 1.0).unwrap();
        assert_eq!(w.dim_plus(), 3);
        let l1 = GraphLagrangian::identity_graph(&w).unwrap();
        let l2 = l1.flipped();
        // graph subspaces are isotropic
        for l in [&l1, &l2] {
            let s = l.subspace(&w);
            let m = s.basis.transpose() * &sigma * &s.basis;
            assert!(m.amax() < 1e-10);
            // and the graph extraction inverts the construction
            let back = GraphLagrangian::from_subspace(&w, &s, &cfg).unwrap();
            assert!((back.f - l.f.clone()).amax() < 1e-9);
        }
        let d12 = graph_intersection_dim(&w, &l1, &l2, &cfg).unwrap();
        assert_eq!(d12, 2);
        // sign rule: (-1)^{dim Gamma(f) ∩ L} = det(g) (-1)^{dim Gamma(fg) ∩ L}
        let d11 = graph_intersection_dim(&w, &l1, &l1, &cfg).unwrap();
        let det_g = -1.0; // the flip has determinant -1
        let lhs = if d11 % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = det_g * if d12 % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn complex_lagrangian_structure() {
        let cfg = ToleranceConfig::default();
        // skew with 2-dim kernel and a low pair
        let d = Mat::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -0.5, //
                0.0, 0.0, 0.5, 0.0,
            ],
        );
        let model = FredholmModel::new(d, &cfg).unwrap();
        let l = ComplexLagrangian::canonical(&model, 1.0).unwrap();
        let lf = l.flipped();
        lf.validate().unwrap();
        let dim = complex_intersection_dim(&model, &l, &lf, &cfg).unwrap();
        // flipping by a reflection changes the component; intersections stay
        // even-dimensional complex subspaces
        assert!(dim % 2 == 0);
        let d_self = complex_intersection_dim(&model, &l, &l, &cfg).unwrap();
        assert_eq!(d_self, 4);
    }
}
