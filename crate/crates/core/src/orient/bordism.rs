//! Induced isomorphisms of orientation torsors.
//!
//! A gauge cylinder from `(X_0, D_0)` to `(X_1, D_1)` trivializes the
//! orientation torsor of its combined boundary `D_0 + (-D_1^*)`; pairing
//! away the second factor turns the trivialization into a morphism from
//! the orientations of `D_0` to those of `D_1`. Orientation points are
//! compared through their codes: the sign (or label) of the point in the
//! canonical kernel-cutoff chart of its operator.

use super::tau::{tau_det, tau_pf, tau_sp, CombinedBoundary};
use crate::exact::{rat, Rat};
use crate::linalg::eig_selfadjoint;
use crate::signs::lines::dual_basis_in_span;
use crate::signs::torsors::GroupVal;
use crate::spectral::det::{
    det_canonical, det_pair, det_re_express, det_sum, DetElement, DualDetElement,
};
use crate::spectral::pf::{pf_canonical, pf_normal_coeff, pf_re_express, pf_sum, PfElement, SkewModel};
use crate::spectral::sp::{sp_chart, SpElement};
use crate::spectral::{rationalize, FredholmModel};
use crate::{Error, Result, ToleranceConfig};
use num::traits::{One, Zero};

/// The dual orientation point of `y`: the functional with `<y, y*> = 1`,
/// in the same chart.
pub fn det_dual_point(model: &FredholmModel, y: &DetElement) -> Result<DualDetElement> {
    let minus_ref = rationalize(&model.v_minus_basis(-1.0, y.delta));
    let plus_ref = rationalize(&model.v_plus_basis(-1.0, y.delta));
    let plus_dual = if plus_ref.ncols() == 0 {
        crate::exact::RatMat::zeros(plus_ref.nrows(), 0)
    } else {
        let d = dual_basis_in_span(&plus_ref)?;
        let n = d.ncols();
        crate::exact::RatMat::from_fn(d.nrows(), n, |i, j| d[(i, n - 1 - j)].clone())
    };
    let mut cand = DualDetElement {
        delta: y.delta,
        minus_word: minus_ref,
        plus_dual_word: plus_dual,
        coeff: Rat::one(),
    };
    let p = det_pair(y, &cand)?;
    if p.is_zero() {
        return Err(Error::DegeneratePairing("dual of a zero element".into()));
    }
    cand.coeff = Rat::one() / p;
    debug_assert_eq!(det_pair(y, &cand).unwrap(), Rat::one());
    Ok(cand)
}

/// Transfer an orientation point of `D` to one of `-D^T` along the chain
/// `DET(D)^* <- DET(D^T) <- DET(-D^T)` (dual-of-tensor reinterpretation,
/// then the negative-operator sign `(-1)^{dim V^+(D)}`), applied to the
/// dual point of `y`.
pub fn dual_transfer_det(model_of_d: &FredholmModel, y: &DetElement) -> Result<DetElement> {
    let y_star = det_dual_point(model_of_d, y)?;
    // reinterpretation as a DET(D^T) chart pair
    let of_dt = DetElement {
        delta: y_star.delta,
        plus_word: y_star.minus_word.clone(),
        minus_dual_word: y_star.plus_dual_word.clone(),
        coeff: y_star.coeff.clone(),
    };
    // negative sign: dim V^-(D^T) = dim V^+(D) = length of the dual word
    let n = of_dt.minus_dual_word.ncols();
    let sign = if n % 2 == 0 { 1 } else { -1 };
    Ok(DetElement {
        coeff: &of_dt.coeff * &rat(sign),
        ..of_dt
    })
}

/// Transfer a Pfaffian orientation point of a skew `D` to one of
/// `-D^T = D` through the metric duality. The flat map keeps the wedge
/// word (the functional word of `y` is the word itself), so the transfer
/// is the identity on chart data; its pairing against the original point
/// is `(-1)^{n(n-1)/2}`, which is exactly the sign the duality chase
/// produces.
pub fn dual_transfer_pf(model: &SkewModel, y: &PfElement) -> Result<PfElement> {
    let c = pf_normal_coeff(model, y)?;
    if c.is_zero() {
        return Err(Error::DegeneratePairing("dual of a zero element".into()));
    }
    Ok(y.clone())
}

/// The dual spectral point: `[n, delta]` pairs to zero against
/// `[-n, -delta]` of the negative operator.
pub fn dual_transfer_sp(y: &SpElement) -> SpElement {
    SpElement {
        m: -y.m,
        delta: -y.delta,
    }
}

/// Orientation code of a determinant point: its sign in the canonical
/// kernel-cutoff chart.
pub fn det_code(model: &FredholmModel, x: &DetElement) -> Result<i8> {
    let at = det_re_express(model, x, model.kernel_cutoff())?;
    crate::spectral::det::det_orientation_sign(model, &at)
}

pub fn pf_code(model: &SkewModel, x: &PfElement) -> Result<i8> {
    let at = pf_re_express(model, x, model.inner.kernel_cutoff())?;
    crate::spectral::pf::pf_orientation_sign(model, &at)
}

/// A morphism of orientation torsors, reported through codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationMorphism {
    /// Z2-valued classes: the code of the image of the `+`-coded point.
    SignMap { image_of_plus: i8 },
    /// Z-valued classes: labels at the common level shift by this amount.
    Shift { shift: i64 },
    Trivial,
}

/// Assemble the combined determinant orientation of `D_c = D_0 + (-D_1^T)`
/// from points of `D_0` and `D_1`, at a common admissible cutoff.
pub fn combine_det_points(
    comb: &CombinedBoundary,
    x: &DetElement,
    y: &DetElement,
    delta: f64,
    cfg: &ToleranceConfig,
) -> Result<DetElement> {
    let model0 = FredholmModel::new(comb.scenario.d0.op.entries.clone(), cfg)?;
    let d1 = comb.scenario.d1(cfg)?;
    let model1 = FredholmModel::new(d1.op.entries.clone(), cfg)?;
    let x_at = det_re_express(&model0, x, delta)?;
    let y_at = det_re_express(&model1, y, delta)?;
    let y_dual = dual_transfer_det(&model1, &y_at)?;
    det_sum(
        &x_at,
        &y_dual,
        (comb.scenario.d0.dim_in(), comb.scenario.d0.dim_out()),
        (d1.dim_out(), d1.dim_in()),
    )
}

/// As above for Pfaffian points of class-1 data.
pub fn combine_pf_points(
    comb: &CombinedBoundary,
    x: &PfElement,
    y: &PfElement,
    delta: f64,
    cfg: &ToleranceConfig,
) -> Result<PfElement> {
    let model0 = SkewModel::new(comb.scenario.d0.op.entries.clone(), cfg)?;
    let d1 = comb.scenario.d1(cfg)?;
    let model1 = SkewModel::new(d1.op.entries.clone(), cfg)?;
    let x_at = pf_re_express(&model0, x, delta)?;
    let y_at = pf_re_express(&model1, y, delta)?;
    let y_dual = dual_transfer_pf(&model1, &y_at)?;
    pf_sum(&x_at, &y_dual, comb.scenario.d0.dim_in(), d1.dim_in())
}

/// The induced isomorphism of orientation torsors of a gauge cylinder.
pub fn bordism_iso(comb: &CombinedBoundary, cfg: &ToleranceConfig) -> Result<OrientationMorphism> {
    let ell = comb.scenario.d0.ell % 8;
    let delta = comb.admissible_cutoff(cfg)?;
    match ell {
        0 => {
            let model0 = FredholmModel::new(comb.scenario.d0.op.entries.clone(), cfg)?;
            let d1 = comb.scenario.d1(cfg)?;
            let model1 = FredholmModel::new(d1.op.entries.clone(), cfg)?;
            let x_plus = det_canonical(&model0, model0.kernel_cutoff())?;
            let y0 = det_canonical(&model1, model1.kernel_cutoff())?;
            let z = combine_det_points(comb, &x_plus, &y0, delta, cfg)?;
            let v = tau_det(comb, &z, delta, cfg)?;
            // equivariance: flipping x must flip the value
            let mut x_minus = x_plus.clone();
            x_minus.coeff = -x_minus.coeff.clone();
            let z2 = combine_det_points(comb, &x_minus, &y0, delta, cfg)?;
            let v2 = tau_det(comb, &z2, delta, cfg)?;
            if v == v2 {
                return Err(Error::Verification(
                    "trivialization is not equivariant in the first factor".into(),
                ));
            }
            let image = match v {
                GroupVal::Z2(0) => det_code(&model1, &y0)?,
                GroupVal::Z2(1) => -det_code(&model1, &y0)?,
                other => {
                    return Err(Error::Verification(format!(
                        "unexpected trivialization value {other:?}"
                    )))
                }
            };
            Ok(OrientationMorphism::SignMap {
                image_of_plus: image,
            })
        }
        1 => {
            let model0 = SkewModel::new(comb.scenario.d0.op.entries.clone(), cfg)?;
            let d1 = comb.scenario.d1(cfg)?;
            let model1 = SkewModel::new(d1.op.entries.clone(), cfg)?;
            let x_plus = pf_canonical(&model0, model0.inner.kernel_cutoff())?;
            let y0 = pf_canonical(&model1, model1.inner.kernel_cutoff())?;
            let z = combine_pf_points(comb, &x_plus, &y0, delta, cfg)?;
            let v = tau_pf(comb, &z, delta, cfg)?;
            let mut x_minus = x_plus.clone();
            x_minus.coeff = -x_minus.coeff.clone();
            let z2 = combine_pf_points(comb, &x_minus, &y0, delta, cfg)?;
            let v2 = tau_pf(comb, &z2, delta, cfg)?;
            if v == v2 {
                return Err(Error::Verification(
                    "trivialization is not equivariant in the first factor".into(),
                ));
            }
            // The Hom-evaluation through the flat dual of the Pfaffian line
            // carries the constant twist (-1)^{k(k+1)/2} in the kernel
            // dimension k of the boundary operator; nonzero skew bands pair
            // evenly, so the twist is stable under cutoff changes.
            let k = model0.v_basis(-1.0, model0.inner.kernel_cutoff()).ncols();
            let kappa = ((k * (k + 1) / 2) % 2) as u8;
            let image = match v {
                GroupVal::Z2(b) if b == kappa => pf_code(&model1, &y0)?,
                GroupVal::Z2(_) => -pf_code(&model1, &y0)?,
                other => {
                    return Err(Error::Verification(format!(
                        "unexpected trivialization value {other:?}"
                    )))
                }
            };
            Ok(OrientationMorphism::SignMap {
                image_of_plus: image,
            })
        }
        3 | 7 => {
            let model0 = eig_selfadjoint(&comb.scenario.d0.op, cfg)?;
            let d1 = comb.scenario.d1(cfg)?;
            let model1 = eig_selfadjoint(&d1.op, cfg)?;
            // common admissible level for the eigenvalue spectra
            let level = sp_common_level(&model0, &model1, cfg)?;
            let x = SpElement { m: 0, delta: level };
            let y0 = SpElement { m: 0, delta: level };
            let y_dual = dual_transfer_sp(&y0);
            // re-chart the dual point of -D_1 to the common level
            let neg_model = eig_selfadjoint(
                &crate::linalg::StructuredMatrix::endo(
                    -d1.op.entries.clone(),
                    d1.op.domain.clone(),
                ),
                cfg,
            )?;
            let y_dual_at = sp_chart(&neg_model, &y_dual, level, cfg)?;
            let z = crate::spectral::sp::sp_sum(&x, &y_dual_at)?;
            let v = tau_sp(comb, &z, cfg)?;
            let GroupVal::Z(shift) = v else {
                return Err(Error::Verification("expected an integer value".into()));
            };
            Ok(OrientationMorphism::Shift { shift })
        }
        _ => Ok(OrientationMorphism::Trivial),
    }
}

/// A level admissible (together with its negative) for both self-adjoint
/// spectra.
pub fn sp_common_level(
    a: &crate::linalg::SelfAdjointModel,
    b: &crate::linalg::SelfAdjointModel,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let mut vals: Vec<f64> = a
        .eigenvalues
        .iter()
        .chain(b.eigenvalues.iter())
        .flat_map(|&l| [l, -l])
        .collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut candidates = vec![0.0];
    if let (Some(first), Some(last)) = (vals.first(), vals.last()) {
        candidates.push(first - 1.0);
        candidates.push(last + 1.0);
        for w in vals.windows(2) {
            candidates.push((w[0] + w[1]) / 2.0);
        }
    }
    candidates
        .into_iter()
        .find(|&c| {
            a.spectral_gap_at(c) >= cfg.gap_tol
                && b.spectral_gap_at(c) >= cfg.gap_tol
                && a.spectral_gap_at(-c) >= cfg.gap_tol
                && b.spectral_gap_at(-c) >= cfg.gap_tol
        })
        .ok_or(Error::InadmissibleCutoff {
            cutoff: 0.0,
            gap_tol: cfg.gap_tol,
        })
}

/// Apply the orientation morphism to a code.
pub fn apply_morphism(m: &OrientationMorphism, code: i8) -> i8 {
    match m {
        OrientationMorphism::SignMap { image_of_plus } => image_of_plus * code,
        _ => code,
    }
}

/// Composition of morphisms (matching middle torsor assumed).
pub fn compose_morphisms(
    first: &OrientationMorphism,
    second: &OrientationMorphism,
) -> Result<OrientationMorphism> {
    match (first, second) {
        (
            OrientationMorphism::SignMap { image_of_plus: a },
            OrientationMorphism::SignMap { image_of_plus: b },
        ) => Ok(OrientationMorphism::SignMap {
            image_of_plus: a * b,
        }),
        (OrientationMorphism::Shift { shift: a }, OrientationMorphism::Shift { shift: b }) => {
            Ok(OrientationMorphism::Shift { shift: a + b })
        }
        (OrientationMorphism::Trivial, OrientationMorphism::Trivial) => {
            Ok(OrientationMorphism::Trivial)
        }
        _ => Err(Error::GroupMismatch("composing unlike morphisms".into())),
    }
}

/// Convenience alias used by the re-exports.
pub fn orientation_morphism(
    comb: &CombinedBoundary,
    cfg: &ToleranceConfig,
) -> Result<OrientationMorphism> {
    bordism_iso(comb, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapted::AdaptedOperator;
    use crate::linalg::{KStructure, Mat, StructuredMatrix};
    use crate::orient::tau::GaugeCylinder;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_cylinder_gives_identity_morphism() {
        let c = cfg();
        // class 0
        let d0 = AdaptedOperator::new(
            0,
            StructuredMatrix::new(
                Mat::from_row_slice(2, 2, &[0.9, 0.2, -0.4, 1.3]),
                KStructure::real(2),
                KStructure::real(2),
            ),
        );
        let comb = CombinedBoundary::new(GaugeCylinder::identity(d0, 1.0), &c).unwrap();
        let m = bordism_iso(&comb, &c).unwrap();
        assert_eq!(m, OrientationMorphism::SignMap { image_of_plus: 1 });

        // class 7
        let d7 = AdaptedOperator::new(
            7,
            StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -1.5])),
        );
        let comb = CombinedBoundary::new(GaugeCylinder::identity(d7, 1.0), &c).unwrap();
        let m = bordism_iso(&comb, &c).unwrap();
        assert_eq!(m, OrientationMorphism::Shift { shift: 0 });
    }
}
