//! Finite matrix models of adapted operator classes mod 8: the defining
//! (skew-)adjointness patterns, indices valued in the coefficient groups,
//! cylinder boundary normal forms, reflection, twisting by potentials, and
//! sums.
//!
//! Everything is a real matrix; the base field acts through explicit
//! structure maps. In realified terms the class conditions become:
//!
//! | class | condition on the real matrix `D` |
//! |-------|----------------------------------|
//! | 0     | none (any real matrix)           |
//! | 1     | `D^T = -D`                       |
//! | 2     | `D^T = -D`, anti-commutes with `I` |
//! | 3     | `D^T = D`, commutes with `I`, `J` |
//! | 4     | commutes with `I`, `J` (rectangular allowed) |
//! | 5     | `D^T = D`, commutes with `I`, anti-commutes with `J` |
//! | 6     | `D^T = D`, anti-commutes with `I` |
//! | 7     | `D^T = D`                        |

use crate::linalg::{
    eig_selfadjoint, CoeffGroup, KStructure, Mat, ScalarField, StructuredMatrix, Subspace,
};
use crate::signs::torsors::GroupVal;
use crate::{Error, Result, ToleranceConfig};

/// A finite model of an adapted operator of class `ell` mod 8.
#[derive(Debug, Clone)]
pub struct AdaptedOperator {
    pub ell: u8,
    /// `D` as a map from the domain model to the codomain model.
    pub op: StructuredMatrix,
}

/// Boundary normal form of a cylinder operator: `sigma (d/dt + A)` on the
/// boundary model `W`, where `A` is symmetric as a real matrix and `sigma`
/// is orthogonal (possibly conjugate-linear, recorded in its flag).
#[derive(Debug, Clone)]
pub struct CylinderData {
    /// Class of the cylinder operator (source class + 1).
    pub ell_cyl: u8,
    pub sigma: StructuredMatrix,
    pub a: StructuredMatrix,
    /// Real dimensions of the two summands of `W` when the normal form has
    /// block shape (domain model, codomain model); otherwise `(dim, 0)`.
    pub block_dims: (usize, usize),
}

/// An isomorphism of adapted operators: a pair of orthogonal structure
/// compatible maps with `D' Phi_0 = Phi_1 D`.
#[derive(Debug, Clone)]
pub struct GaugeIso {
    pub phi0: Mat,
    pub phi1: Mat,
}

impl AdaptedOperator {
    pub fn new(ell: u8, op: StructuredMatrix) -> Self {
        AdaptedOperator { ell: ell % 8, op }
    }

    /// The zero operator on a zero-dimensional model: the monoidal unit.
    pub fn empty(ell: u8) -> Self {
        let field = ScalarField::from_ell(ell);
        let space = match field {
            ScalarField::R => KStructure::real(0),
            ScalarField::C => KStructure::complex_std(0),
            ScalarField::H => KStructure::quaternion_std(0),
        };
        AdaptedOperator::new(
            ell,
            StructuredMatrix::new(Mat::zeros(0, 0), space.clone(), space),
        )
    }

    pub fn dim_in(&self) -> usize {
        self.op.dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.op.dim_out()
    }

    pub fn field(&self) -> ScalarField {
        ScalarField::from_ell(self.ell)
    }
}

/// Diagnostic result of an adaptedness check.
#[derive(Debug, Clone)]
pub struct AdaptedDiagnostics {
    pub ok: bool,
    pub issues: Vec<String>,
}

/// Check the class condition, structure maps, and field tag of `(D, ell)`.
pub fn check_adapted(d: &StructuredMatrix, ell: u8, cfg: &ToleranceConfig) -> AdaptedDiagnostics {
    let ell = ell % 8;
    let mut issues = Vec::new();
    let tol = cfg.eig_tol.max(1e-12) * d.entries.amax().max(1.0) * 100.0;
    let field = ScalarField::from_ell(ell);
    for (space, name) in [(&d.domain, "domain"), (&d.codomain, "codomain")] {
        if space.field != field {
            issues.push(format!("{name} field is {:?}, class needs {:?}", space.field, field));
        }
        if let Err(e) = space.validate(1e-9) {
            issues.push(format!("{name}: {e}"));
        }
    }
    let m = &d.entries;
    let square = m.nrows() == m.ncols();
    let sym = if square {
        (m - m.transpose()).amax()
    } else {
        f64::INFINITY
    };
    let skew = if square {
        (m + m.transpose()).amax()
    } else {
        f64::INFINITY
    };
    let commute_i = |sign: f64| -> Option<f64> {
        match (&d.domain.i_map, &d.codomain.i_map) {
            (Some(a), Some(b)) => Some((m * a - b * m * sign).amax()),
            _ => None,
        }
    };
    let commute_j = |sign: f64| -> Option<f64> {
        match (&d.domain.j_map, &d.codomain.j_map) {
            (Some(a), Some(b)) => Some((m * a - b * m * sign).amax()),
            _ => None,
        }
    };
    let mut need = |cond: bool, what: &str| {
        if !cond {
            issues.push(what.to_string());
        }
    };
    match ell {
        0 => {}
        1 => need(skew <= tol, "class 1 requires a skew real matrix"),
        2 => {
            need(skew <= tol, "class 2 requires a skew real matrix");
            need(
                commute_i(-1.0).map(|r| r <= tol).unwrap_or(false),
                "class 2 requires anti-commutation with I",
            );
        }
        3 => {
            need(sym <= tol, "class 3 requires a symmetric real matrix");
            need(
                commute_i(1.0).map(|r| r <= tol).unwrap_or(false),
                "class 3 requires commutation with I",
            );
            need(
                commute_j(1.0).map(|r| r <= tol).unwrap_or(false),
                "class 3 requires commutation with J",
            );
        }
        4 => {
            need(
                commute_i(1.0).map(|r| r <= tol).unwrap_or(false),
                "class 4 requires commutation with I",
            );
            need(
                commute_j(1.0).map(|r| r <= tol).unwrap_or(false),
                "class 4 requires commutation with J",
            );
        }
        5 => {
            need(sym <= tol, "class 5 requires a symmetric real matrix");
            need(
                commute_i(1.0).map(|r| r <= tol).unwrap_or(false),
                "class 5 requires commutation with I",
            );
            need(
                commute_j(-1.0).map(|r| r <= tol).unwrap_or(false),
                "class 5 requires anti-commutation with J",
            );
        }
        6 => {
            need(sym <= tol, "class 6 requires a symmetric real matrix");
            need(
                commute_i(-1.0).map(|r| r <= tol).unwrap_or(false),
                "class 6 requires anti-commutation with I",
            );
        }
        7 => need(sym <= tol, "class 7 requires a symmetric real matrix"),
        _ => unreachable!(),
    }
    AdaptedDiagnostics {
        ok: issues.is_empty(),
        issues,
    }
}

fn rank_of(m: &Mat, rank_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .filter(|&&s| s > rank_tol * smax.max(1.0))
        .count()
}

/// Kernel dimension over the base field.
pub fn kernel_dim_k(d: &AdaptedOperator, cfg: &ToleranceConfig) -> usize {
    let r = rank_of(&d.op.entries, cfg.rank_tol);
    (d.dim_in() - r) / d.field().dim_r()
}

/// Cokernel dimension over the base field.
pub fn cokernel_dim_k(d: &AdaptedOperator, cfg: &ToleranceConfig) -> usize {
    let r = rank_of(&d.op.entries, cfg.rank_tol);
    (d.dim_out() - r) / d.field().dim_r()
}

/// The index in the coefficient group of the class.
pub fn index_ell(d: &AdaptedOperator, cfg: &ToleranceConfig) -> GroupVal {
    match CoeffGroup::from_ell(d.ell) {
        CoeffGroup::Z => GroupVal::Z(kernel_dim_k(d, cfg) as i64 - cokernel_dim_k(d, cfg) as i64),
        CoeffGroup::Z2 => GroupVal::Z2((kernel_dim_k(d, cfg) % 2) as u8),
        CoeffGroup::Trivial => GroupVal::Zero,
    }
}

/// Require adaptedness, with diagnostics in the error.
pub fn require_adapted(d: &StructuredMatrix, ell: u8, cfg: &ToleranceConfig) -> Result<()> {
    let diag = check_adapted(d, ell, cfg);
    if !diag.ok {
        return Err(Error::NotAdapted {
            ell,
            reason: diag.issues.join("; "),
        });
    }
    Ok(())
}

/// Block matrix `[[a, b], [c, d]]` over real matrices.
fn block2(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rd, cd) = (d.nrows(), d.ncols());
    let mut m = Mat::zeros(ra + rd, ca + cd);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((0, ca), (ra, cd)).copy_from(b);
    m.view_mut((ra, 0), (rd, ca)).copy_from(c);
    m.view_mut((ra, ca), (rd, cd)).copy_from(d);
    m
}

/// The boundary normal form of the cylinder over `(D, ell)`.
///
/// The pair `(sigma, A)` is assembled per class so that `sigma (d/dt + A)`
/// is the cylinder operator; `A` is genuinely symmetric as a real matrix in
/// every case, and `sigma` is orthogonal.
pub fn make_cylinder(d: &AdaptedOperator, cfg: &ToleranceConfig) -> Result<CylinderData> {
    require_adapted(&d.op, d.ell, cfg)?;
    let ell = d.ell;
    let m = &d.op.entries;
    let (n_in, n_out) = (d.dim_in(), d.dim_out());
    let zero_in = Mat::zeros(n_in, n_in);
    let zero_out = Mat::zeros(n_out, n_out);
    let id_in = Mat::identity(n_in, n_in);
    let id_out = Mat::identity(n_out, n_out);

    let data = match ell {
        // W = E0 + E1, sigma = diag(1, -1), A = [[0, D^T], [D, 0]]
        0 => {
            let sigma = block2(&id_in, &Mat::zeros(n_in, n_out), &Mat::zeros(n_out, n_in), &(-&id_out));
            let a = block2(&zero_in, &m.transpose(), m, &zero_out);
            let w = KStructure::real(n_in + n_out);
            CylinderData {
                ell_cyl: 1,
                sigma: StructuredMatrix::endo(sigma, w.clone()),
                a: StructuredMatrix::endo(a, w),
                block_dims: (n_in, n_out),
            }
        }
        // complexify: W = E0 + E0 with I block-off-diagonal; sigma is the
        // conjugation, A = i D_C = [[0, D^T], [D, 0]] = [[0, -D], [D, 0]]
        1 => {
            let n = n_in;
            let sigma = block2(&id_in, &zero_in, &zero_in, &(-&id_in));
            let a = block2(&zero_in, &m.transpose(), m, &zero_in);
            let i_map = block2(&zero_in, &(-&id_in), &id_in, &zero_in);
            let w = KStructure::with_maps(ScalarField::C, 2 * n, Some(i_map), None);
            CylinderData {
                ell_cyl: 2,
                sigma: StructuredMatrix::endo(sigma, w.clone()).anti(),
                a: StructuredMatrix::endo(a, w),
                block_dims: (n, n),
            }
        }
        // quaternionify: W = E0 + conj(E0); A = [[0, i conj(D)], [i D, 0]],
        // sigma = diag(-i, i) (realified: -I on both summands)
        2 => {
            let i0 = d.op.domain.i_map.clone().expect("class 2 carries I");
            let n = n_in;
            let a = block2(&zero_in, &(&i0 * m), &(-&i0 * m), &zero_in);
            let sigma = block2(&(-&i0), &zero_in, &zero_in, &(-&i0));
            let i_f = block2(&i0, &zero_in, &zero_in, &(-&i0));
            let j_f = block2(&zero_in, &(-&id_in), &id_in, &zero_in);
            let w = KStructure::with_maps(ScalarField::H, 2 * n, Some(i_f), Some(j_f));
            CylinderData {
                ell_cyl: 3,
                sigma: StructuredMatrix::endo(sigma, w.clone()),
                a: StructuredMatrix::endo(a, w),
                block_dims: (n, n),
            }
        }
        // product form: sigma = id, A = D
        3 | 7 => {
            let w = d.op.domain.clone();
            CylinderData {
                ell_cyl: (ell + 1) % 8,
                sigma: StructuredMatrix::endo(id_in.clone(), w.clone()),
                a: StructuredMatrix::endo(m.clone(), w),
                block_dims: (n_in, 0),
            }
        }
        // W = E0 + E1^diamond; sigma = diag(i, -i),
        // A = [[0, (iD)^*], [iD, 0]] = [[0, -i D^T], [i D, 0]]
        4 => {
            let i0 = d.op.domain.i_map.clone().expect("class 4 carries I");
            let i1 = d.op.codomain.i_map.clone().expect("class 4 carries I");
            let j0 = d.op.domain.j_map.clone().expect("class 4 carries J");
            let j1 = d.op.codomain.j_map.clone().expect("class 4 carries J");
            let sigma = block2(&i0, &Mat::zeros(n_in, n_out), &Mat::zeros(n_out, n_in), &(-&i1));
            let a = block2(
                &zero_in,
                &(-&i0 * m.transpose()),
                &(&i1 * m),
                &zero_out,
            );
            let i_f = block2(&i0, &Mat::zeros(n_in, n_out), &Mat::zeros(n_out, n_in), &i1);
            let j_f = block2(&j0, &Mat::zeros(n_in, n_out), &Mat::zeros(n_out, n_in), &(-&j1));
            let w = KStructure::with_maps(ScalarField::H, n_in + n_out, Some(i_f), Some(j_f));
            CylinderData {
                ell_cyl: 5,
                sigma: StructuredMatrix::endo(sigma, w.clone()),
                a: StructuredMatrix::endo(a, w),
                block_dims: (n_in, n_out),
            }
        }
        // sigma = J, A = D
        5 => {
            let j = d.op.domain.j_map.clone().expect("class 5 carries J");
            let w = d.op.domain.clone();
            CylinderData {
                ell_cyl: 6,
                sigma: StructuredMatrix::endo(j, w.clone()).anti(),
                a: StructuredMatrix::endo(m.clone(), w),
                block_dims: (n_in, 0),
            }
        }
        // sigma = I, A = -I D (so that sigma (d/dt + A) = I d/dt + D)
        6 => {
            let i = d.op.domain.i_map.clone().expect("class 6 carries I");
            let w = d.op.domain.clone();
            let a = -&i * m;
            CylinderData {
                ell_cyl: 7,
                sigma: StructuredMatrix::endo(i, w.clone()).anti(),
                a: StructuredMatrix::endo(a, w),
                block_dims: (n_in, 0),
            }
        }
        _ => unreachable!(),
    };
    check_cylinder(&data, cfg)?;
    Ok(data)
}

/// Verify the assembled first-order operator `sigma (d/dt + A)` is adapted
/// of class `ell + 1`: the formal adjoint/linearity conditions on the
/// coefficient pair, plus orthogonality of `sigma` and symmetry of `A`.
pub fn check_cylinder(c: &CylinderData, cfg: &ToleranceConfig) -> Result<()> {
    let tol = cfg.eig_tol.max(1e-12)
        * c.a.entries.amax().max(c.sigma.entries.amax()).max(1.0)
        * 100.0;
    let sigma = &c.sigma.entries;
    let a = &c.a.entries;
    let n = sigma.nrows();
    let id = Mat::identity(n, n);
    if (sigma * sigma.transpose() - &id).amax() > tol {
        return Err(Error::NotAdapted {
            ell: c.ell_cyl,
            reason: "sigma is not orthogonal".into(),
        });
    }
    if (a - a.transpose()).amax() > tol {
        return Err(Error::NotAdapted {
            ell: c.ell_cyl,
            reason: "A is not symmetric".into(),
        });
    }
    // formal operator P = sigma dt + sigma A; P* = -sigma^T dt + (sigma A)^T
    let m0 = sigma * a;
    let adjoint_dt = -sigma.transpose();
    let adjoint_m0 = m0.transpose();
    let (want_skew, want_i_anti) = match c.ell_cyl {
        1 => (true, None),
        2 => (true, Some(true)),
        3 => (false, Some(false)),
        4 => return check_linearity_only(c, tol),
        5 => (false, Some(false)),
        6 => (false, Some(true)),
        7 => (false, None),
        0 => return Ok(()),
        _ => unreachable!(),
    };
    let (dt_res, m0_res) = if want_skew {
        ((&adjoint_dt + sigma).amax(), (&adjoint_m0 + &m0).amax())
    } else {
        ((&adjoint_dt - sigma).amax(), (&adjoint_m0 - &m0).amax())
    };
    if dt_res > tol || m0_res > tol {
        return Err(Error::NotAdapted {
            ell: c.ell_cyl,
            reason: format!(
                "formal adjoint defect: dt {dt_res:.3e}, zeroth order {m0_res:.3e}"
            ),
        });
    }
    if let Some(anti) = want_i_anti {
        let i = c
            .a
            .domain
            .i_map
            .as_ref()
            .ok_or_else(|| Error::StructureViolation("cylinder space lacks I".into()))?;
        let check = |mat: &Mat| -> f64 {
            if anti {
                (mat * i + i * mat).amax()
            } else {
                (mat * i - i * mat).amax()
            }
        };
        if check(sigma) > tol || check(&m0) > tol {
            return Err(Error::NotAdapted {
                ell: c.ell_cyl,
                reason: "coefficient I-linearity pattern fails".into(),
            });
        }
    }
    // classes 3, 5 additionally need quaternionic data checks
    if c.ell_cyl == 3 {
        let j = c
            .a
            .domain
            .j_map
            .as_ref()
            .ok_or_else(|| Error::StructureViolation("cylinder space lacks J".into()))?;
        for mat in [sigma, &m0] {
            if (mat * j - j * mat).amax() > tol {
                return Err(Error::NotAdapted {
                    ell: 3,
                    reason: "coefficients must commute with J".into(),
                });
            }
        }
    }
    if c.ell_cyl == 5 {
        let j = c
            .a
            .domain
            .j_map
            .as_ref()
            .ok_or_else(|| Error::StructureViolation("cylinder space lacks J".into()))?;
        for mat in [sigma, &m0] {
            if (mat * j + j * mat).amax() > tol {
                return Err(Error::NotAdapted {
                    ell: 5,
                    reason: "coefficients must anti-commute with J".into(),
                });
            }
        }
    }
    Ok(())
}

fn check_linearity_only(c: &CylinderData, tol: f64) -> Result<()> {
    // class 4 (quaternionic, no adjointness constraint): coefficients must
    // commute with I and J
    let i = c
        .a
        .domain
        .i_map
        .as_ref()
        .ok_or_else(|| Error::StructureViolation("cylinder space lacks I".into()))?;
    let j = c
        .a
        .domain
        .j_map
        .as_ref()
        .ok_or_else(|| Error::StructureViolation("cylinder space lacks J".into()))?;
    let m0 = &c.sigma.entries * &c.a.entries;
    for mat in [&c.sigma.entries, &m0] {
        if (mat * i - i * mat).amax() > tol || (mat * j - j * mat).amax() > tol {
            return Err(Error::NotAdapted {
                ell: 4,
                reason: "coefficients must be quaternion-linear".into(),
            });
        }
    }
    Ok(())
}

/// Eigen-model of the boundary operator `A`.
pub fn boundary_model(c: &CylinderData, cfg: &ToleranceConfig) -> Result<crate::linalg::SelfAdjointModel> {
    eig_selfadjoint(&c.a, cfg)
}

/// The reflection isomorphism: pulling the cylinder back along `t -> -t`
/// yields the cylinder of `-D^*`, witnessed by an explicit conjugator pair
/// verified on the coefficient matrices.
pub fn reflect_iso(d: &AdaptedOperator, cfg: &ToleranceConfig) -> Result<GaugeIso> {
    let cyl = make_cylinder(d, cfg)?;
    let neg_adj = adjoint_negative(d);
    require_adapted(&neg_adj.op, neg_adj.ell, cfg)?;
    let cyl_ref = make_cylinder(&neg_adj, cfg)?;

    // reflected operator: coefficients (-sigma, sigma A)
    let refl_dt = -&cyl.sigma.entries;
    let refl_m0 = &cyl.sigma.entries * &cyl.a.entries;
    let target_dt = &cyl_ref.sigma.entries;
    let target_m0 = &cyl_ref.sigma.entries * &cyl_ref.a.entries;

    let (n_in, n_out) = (d.dim_in(), d.dim_out());
    let id_in = Mat::identity(n_in, n_in);
    let id_out = Mat::identity(n_out, n_out);
    let swap = |sign_lower: f64| -> Mat {
        let mut s = Mat::zeros(n_out + n_in, n_in + n_out);
        s.view_mut((0, n_in), (n_out, n_out)).copy_from(&id_out);
        s.view_mut((n_out, 0), (n_in, n_in))
            .copy_from(&(&id_in * sign_lower));
        s
    };
    // conjugator per class
    let (phi0, phi1) = match d.ell {
        // swap the summands of W = E0 + E1
        0 => {
            let s = swap(1.0);
            (s.clone(), s)
        }
        // i sigma, realified: the plain block swap of Re and Im
        1 => {
            let s = block2(&Mat::zeros(n_in, n_in), &id_in, &id_in, &Mat::zeros(n_in, n_in));
            (s.clone(), s)
        }
        // with the conjugate relabeling the coefficients already agree
        2 | 5 => {
            let n = n_in + if matches!(d.ell, 2) { n_in } else { 0 };
            let id = Mat::identity(n, n);
            (id.clone(), id)
        }
        3 | 7 => (id_in.clone(), -&id_in),
        // signed swap of the summands E0 + E1^dia -> E1 + E0^dia
        4 => {
            let s = swap(-1.0);
            (s.clone(), s)
        }
        // multiply by i
        6 => {
            let i = d.op.domain.i_map.clone().expect("class 6 carries I");
            (i.clone(), i)
        }
        _ => unreachable!(),
    };

    // verify: target * phi0 = phi1 * reflected, coefficientwise
    let tol = 1e-10 * (1.0 + refl_m0.amax().max(target_m0.amax()));
    let r_dt = (target_dt * &phi0 - &phi1 * &refl_dt).amax();
    let r_m0 = (&target_m0 * &phi0 - &phi1 * &refl_m0).amax();
    if r_dt > tol || r_m0 > tol {
        return Err(Error::Verification(format!(
            "reflection conjugator fails at class {}: dt {r_dt:.3e}, zeroth {r_m0:.3e}",
            d.ell
        )));
    }
    Ok(GaugeIso { phi0, phi1 })
}

/// The dual operator `-D^*` with the structure bookkeeping of its class:
/// domain and codomain swap, and the conjugate-pattern classes (2, 6)
/// relabel `i -> -i` while the diamond class (5) relabels `j -> -j`.
pub fn adjoint_negative(d: &AdaptedOperator) -> AdaptedOperator {
    let m = -d.op.entries.transpose();
    let (mut dom, mut cod) = (d.op.codomain.clone(), d.op.domain.clone());
    match d.ell {
        2 | 6 => {
            dom = dom.conjugate();
            cod = cod.conjugate();
        }
        5 => {
            dom = dom.diamond();
            cod = cod.diamond();
        }
        _ => {}
    }
    AdaptedOperator::new(d.ell, StructuredMatrix::new(m, dom, cod))
}

/// Twist by a trivialized rank-`k` coefficient module, then add a
/// zeroth-order potential satisfying the same class constraints.
pub fn twist(
    d: &AdaptedOperator,
    rank: usize,
    potential: Option<&Mat>,
    cfg: &ToleranceConfig,
) -> Result<AdaptedOperator> {
    require_adapted(&d.op, d.ell, cfg)?;
    let kron = |space: &KStructure| -> KStructure {
        let blow = |m: &Mat| -> Mat {
            let n = m.nrows();
            let mut out = Mat::zeros(n * rank, n * rank);
            for b in 0..rank {
                out.view_mut((b * n, b * n), (n, n)).copy_from(m);
            }
            out
        };
        KStructure {
            dim: space.dim * rank,
            field: space.field,
            i_map: space.i_map.as_ref().map(blow),
            j_map: space.j_map.as_ref().map(blow),
        }
    };
    let n_in = d.dim_in();
    let n_out = d.dim_out();
    let mut entries = Mat::zeros(n_out * rank, n_in * rank);
    for b in 0..rank {
        entries
            .view_mut((b * n_out, b * n_in), (n_out, n_in))
            .copy_from(&d.op.entries);
    }
    if let Some(p) = potential {
        if p.nrows() != n_out * rank || p.ncols() != n_in * rank {
            return Err(Error::BadPotential("potential shape mismatch".into()));
        }
        entries += p;
    }
    let out = AdaptedOperator::new(
        d.ell,
        StructuredMatrix::new(entries, kron(&d.op.domain), kron(&d.op.codomain)),
    );
    let diag = check_adapted(&out.op, out.ell, cfg);
    if !diag.ok {
        return Err(Error::BadPotential(diag.issues.join("; ")));
    }
    Ok(out)
}

/// Project an arbitrary matrix onto the affine constraint set of admissible
/// potentials for the class (used by scenario generators and tests).
pub fn project_potential(d: &AdaptedOperator, raw: &Mat) -> Mat {
    let ell = d.ell;
    let mut p = raw.clone();
    // symmetrize or skew per class
    match ell {
        1 | 2 => p = (&p - &p.transpose()) * 0.5,
        3 | 5 | 6 | 7 => p = (&p + &p.transpose()) * 0.5,
        _ => {}
    }
    // average over the structure-map conditions
    let avg = |p: &Mat, s0: &Mat, s1: &Mat, sign: f64| -> Mat {
        (p + &(s1.transpose() * p * s0) * sign) * 0.5
    };
    if let (Some(i0), Some(i1)) = (&d.op.domain.i_map, &d.op.codomain.i_map) {
        let sign = match ell {
            2 | 6 => -1.0,
            _ => 1.0,
        };
        p = avg(&p, i0, i1, sign);
    }
    if let (Some(j0), Some(j1)) = (&d.op.domain.j_map, &d.op.codomain.j_map) {
        let sign = match ell {
            5 => -1.0,
            _ => 1.0,
        };
        p = avg(&p, j0, j1, sign);
    }
    // re-impose the adjointness after the averaging
    match ell {
        1 | 2 => (&p - &p.transpose()) * 0.5,
        3 | 5 | 6 | 7 => (&p + &p.transpose()) * 0.5,
        _ => p,
    }
}

/// Combination mode for two operators of the same class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineMode {
    DirectSum,
    DisjointUnion,
}

/// Block-diagonal combination; for disjoint unions the two boundary
/// components are remembered through `block_dims` downstream.
pub fn combine(
    mode: CombineMode,
    d1: &AdaptedOperator,
    d2: &AdaptedOperator,
    cfg: &ToleranceConfig,
) -> Result<AdaptedOperator> {
    if d1.ell != d2.ell {
        return Err(Error::Scenario(format!(
            "combining classes {} and {}",
            d1.ell, d2.ell
        )));
    }
    require_adapted(&d1.op, d1.ell, cfg)?;
    require_adapted(&d2.op, d2.ell, cfg)?;
    let dom = d1.op.domain.direct_sum(&d2.op.domain)?;
    let cod = d1.op.codomain.direct_sum(&d2.op.codomain)?;
    let mut entries = Mat::zeros(cod.dim, dom.dim);
    entries
        .view_mut((0, 0), (d1.dim_out(), d1.dim_in()))
        .copy_from(&d1.op.entries);
    entries
        .view_mut((d1.dim_out(), d1.dim_in()), (d2.dim_out(), d2.dim_in()))
        .copy_from(&d2.op.entries);
    let out = AdaptedOperator::new(d1.ell, StructuredMatrix::new(entries, dom, cod));
    let _ = mode;
    require_adapted(&out.op, out.ell, cfg)?;
    Ok(out)
}

/// Apply a gauge pair to an operator: `D -> phi1 D phi0^{-1}` (orthogonal
/// conjugation).
pub fn apply_gauge(d: &AdaptedOperator, g: &GaugeIso, cfg: &ToleranceConfig) -> Result<AdaptedOperator> {
    let m = &g.phi1 * &d.op.entries * g.phi0.transpose();
    let conj = |s: &KStructure, phi: &Mat| KStructure {
        dim: s.dim,
        field: s.field,
        i_map: s.i_map.as_ref().map(|i| phi * i * phi.transpose()),
        j_map: s.j_map.as_ref().map(|j| phi * j * phi.transpose()),
    };
    let out = AdaptedOperator::new(
        d.ell,
        StructuredMatrix::new(m, conj(&d.op.domain, &g.phi0), conj(&d.op.codomain, &g.phi1)),
    );
    require_adapted(&out.op, out.ell, cfg)?;
    Ok(out)
}

/// Subspace wrapper for boundary spaces (re-export convenience).
pub fn full_boundary_space(c: &CylinderData) -> Subspace {
    Subspace::full(c.a.entries.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn random_adapted(ell: u8, dim_k: usize, rng: &mut StdRng) -> AdaptedOperator {
        let field = ScalarField::from_ell(ell);
        let dr = field.dim_r();
        let space = |m: usize| match field {
            ScalarField::R => KStructure::real(m),
            ScalarField::C => KStructure::complex_std(m / 2),
            ScalarField::H => KStructure::quaternion_std(m / 4),
        };
        let n = dim_k * dr;
        let raw = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let stub = AdaptedOperator::new(
            ell,
            StructuredMatrix::new(Mat::zeros(n, n), space(n), space(n)),
        );
        let p = project_potential(&stub, &raw);
        AdaptedOperator::new(ell, StructuredMatrix::new(p, space(n), space(n)))
    }

    #[test]
    fn check_adapted_class_one() {
        let c = cfg();
        let skew = StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert!(check_adapted(&skew, 1, &c).ok);
        let sym = StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!(!check_adapted(&sym, 1, &c).ok);
        // quaternionic zero map is 3-adapted
        let z = StructuredMatrix::new(
            Mat::zeros(4, 4),
            KStructure::quaternion_std(1),
            KStructure::quaternion_std(1),
        );
        assert!(check_adapted(&z, 3, &c).ok);
    }

    #[test]
    fn index_examples() {
        let c = cfg();
        // zero map R^3 -> R^1: index 2 at class 0
        let d = AdaptedOperator::new(
            0,
            StructuredMatrix::new(Mat::zeros(1, 3), KStructure::real(3), KStructure::real(1)),
        );
        assert_eq!(index_ell(&d, &c), GroupVal::Z(2));
        // invertible skew at class 1: kernel 0 mod 2
        let d = AdaptedOperator::new(
            1,
            StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])),
        );
        assert_eq!(index_ell(&d, &c), GroupVal::Z2(0));
        // class 5: trivial group
        let mut rng = StdRng::seed_from_u64(7);
        let d = random_adapted(5, 2, &mut rng);
        assert_eq!(index_ell(&d, &c), GroupVal::Zero);
    }

    #[test]
    fn cylinders_are_adapted_at_every_class() {
        let c = cfg();
        let mut rng = StdRng::seed_from_u64(42);
        for ell in 0..8u8 {
            for _ in 0..5 {
                let d = random_adapted(ell, 2, &mut rng);
                let cyl = make_cylinder(&d, &c).expect("cylinder must assemble");
                assert_eq!(cyl.ell_cyl, (ell + 1) % 8, "class {ell}");
                // anti-commutation pattern for block classes
                if matches!(ell, 0 | 1 | 4) {
                    let s = &cyl.sigma.entries;
                    let a = &cyl.a.entries;
                    assert!((s * a + a * s).amax() < 1e-10, "class {ell}");
                }
            }
        }
    }

    #[test]
    fn cylinder_class_zero_of_zero_map() {
        let c = cfg();
        let d = AdaptedOperator::new(
            0,
            StructuredMatrix::new(Mat::zeros(1, 1), KStructure::real(1), KStructure::real(1)),
        );
        let cyl = make_cylinder(&d, &c).unwrap();
        assert_eq!(cyl.a.entries, Mat::zeros(2, 2));
        assert_eq!(
            cyl.sigma.entries,
            Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
        );
    }

    #[test]
    fn reflection_verified_everywhere() {
        let c = cfg();
        let mut rng = StdRng::seed_from_u64(3);
        for ell in 0..8u8 {
            let d = random_adapted(ell, 2, &mut rng);
            reflect_iso(&d, &c).expect("reflection conjugator");
        }
        // double reflection: -(-D^*)^* = D
        let d = random_adapted(0, 2, &mut rng);
        let dd = adjoint_negative(&adjoint_negative(&d));
        assert!((dd.op.entries - d.op.entries).amax() < 1e-14);
    }

    #[test]
    fn twist_and_combine_indices_add() {
        let c = cfg();
        // rank-2 flat twist doubles the class-0 index
        let d = AdaptedOperator::new(
            0,
            StructuredMatrix::new(Mat::zeros(1, 3), KStructure::real(3), KStructure::real(1)),
        );
        let t = twist(&d, 2, None, &c).unwrap();
        assert_eq!(index_ell(&t, &c), GroupVal::Z(4));

        // trivial twist with zero potential is the operator itself
        let t1 = twist(&d, 1, None, &c).unwrap();
        assert_eq!(t1.op.entries, d.op.entries);

        // skew-compatible potential at class 1 stays adapted
        let mut rng = StdRng::seed_from_u64(11);
        let d1 = random_adapted(1, 3, &mut rng);
        let raw = Mat::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let p = project_potential(&d1, &raw);
        let t = twist(&d1, 1, Some(&p), &c).unwrap();
        assert!(check_adapted(&t.op, 1, &c).ok);

        // indices add over direct sums (rank oracle)
        for _ in 0..5 {
            let a = {
                let rows = rng.gen_range(1..4);
                let cols = rng.gen_range(1..4);
                AdaptedOperator::new(
                    0,
                    StructuredMatrix::new(
                        Mat::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0)),
                        KStructure::real(cols),
                        KStructure::real(rows),
                    ),
                )
            };
            let b = {
                let rows = rng.gen_range(1..4);
                let cols = rng.gen_range(1..4);
                AdaptedOperator::new(
                    0,
                    StructuredMatrix::new(
                        Mat::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0)),
                        KStructure::real(cols),
                        KStructure::real(rows),
                    ),
                )
            };
            let s = combine(CombineMode::DirectSum, &a, &b, &c).unwrap();
            let (GroupVal::Z(ia), GroupVal::Z(ib), GroupVal::Z(is)) =
                (index_ell(&a, &c), index_ell(&b, &c), index_ell(&s, &c))
            else {
                panic!("class 0 index must be an integer");
            };
            assert_eq!(is, ia + ib);
        }

        // the empty operator is a unit for combination
        let e = AdaptedOperator::empty(0);
        let d0 = random_adapted(0, 2, &mut rng);
        let s = combine(CombineMode::DisjointUnion, &e, &d0, &c).unwrap();
        assert_eq!(s.op.entries, d0.op.entries);
    }

    #[test]
    fn make_cylinder_commutes_with_combine() {
        let c = cfg();
        let mut rng = StdRng::seed_from_u64(5);
        for ell in [0u8, 1, 3, 7] {
            let a = random_adapted(ell, 2, &mut rng);
            let b = random_adapted(ell, 1, &mut rng);
            let both = combine(CombineMode::DirectSum, &a, &b, &c).unwrap();
            let cyl_both = make_cylinder(&both, &c).unwrap();
            let ca = make_cylinder(&a, &c).unwrap();
            let cb = make_cylinder(&b, &c).unwrap();
            // the boundary operator of the sum is conjugate (by the block
            // shuffle) to the sum of boundary operators: compare spectra
            let m1 = boundary_model(&cyl_both, &c).unwrap();
            let mut spec1 = m1.eigenvalues.clone();
            let m2a = boundary_model(&ca, &c).unwrap();
            let m2b = boundary_model(&cb, &c).unwrap();
            let mut spec2: Vec<f64> = m2a
                .eigenvalues
                .iter()
                .chain(m2b.eigenvalues.iter())
                .copied()
                .collect();
            spec1.sort_by(|x, y| x.partial_cmp(y).unwrap());
            spec2.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in spec1.iter().zip(spec2.iter()) {
                assert!((x - y).abs() < 1e-9, "class {ell}");
            }
        }
    }
}
