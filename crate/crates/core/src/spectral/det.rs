//! Determinant-line points with cutoff charts and their structure
//! isomorphisms: chart change, adjoint, negative, and direct sum.

use super::{rationalize, FredholmModel};
use crate::exact::{rat, Rat, RatMat};
use crate::signs::lines::{dual_basis_in_span, eval_pairing, GradedLineElement, WedgeFactor};
use crate::{Error, Result};
use num::traits::{One, Signed, Zero};

/// A point of the determinant line of `D` in the chart at `delta`:
/// `coeff * (∧ plus_word) (x) (∧ minus_dual_word)` inside
/// `det V+_{[0,delta]} (x) det V-_{[0,delta]}^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetElement {
    pub delta: f64,
    pub plus_word: RatMat,
    /// Dual wedge word, stored in wedge order (functionals as vectors).
    pub minus_dual_word: RatMat,
    pub coeff: Rat,
}

/// A point of the dual line `DET(D)^*`, in chart normal form: a primal word
/// in `V-` and a dual word in `V+`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualDetElement {
    pub delta: f64,
    pub minus_word: RatMat,
    pub plus_dual_word: RatMat,
    pub coeff: Rat,
}

/// Reversed-column copy.
fn reversed(m: &RatMat) -> RatMat {
    let n = m.ncols();
    RatMat::from_fn(m.nrows(), n, |i, j| m[(i, n - 1 - j)].clone())
}

/// Exact dual basis of a wedge word, in the dual-volume order (reversed).
fn dual_word_of(basis: &RatMat) -> Result<RatMat> {
    Ok(reversed(&dual_basis_in_span(basis)?))
}

/// The canonical chart element at `delta`: reference frames wedged in
/// ascending eigenvalue order, coefficient one.
pub fn det_canonical(model: &FredholmModel, delta: f64) -> Result<DetElement> {
    model.check_admissible(delta)?;
    let plus = rationalize(&model.v_plus_basis(-1.0, delta));
    let minus = rationalize(&model.v_minus_basis(-1.0, delta));
    let minus_dual = if minus.ncols() == 0 {
        RatMat::zeros(model.dim_out(), 0)
    } else {
        dual_word_of(&minus)?
    };
    Ok(DetElement {
        delta,
        plus_word: plus,
        minus_dual_word: minus_dual,
        coeff: Rat::one(),
    })
}

/// Chart change into a larger cutoff: wedge the shell frame onto the plus
/// word and prepend the reversed dual images under `J` to the dual word.
pub fn det_chart_change(model: &FredholmModel, x: &DetElement, eps: f64) -> Result<DetElement> {
    model.check_admissible(eps)?;
    if eps < x.delta {
        return Err(Error::InadmissibleCutoff {
            cutoff: eps,
            gap_tol: model.cfg.gap_tol,
        });
    }
    let w = model.v_plus_basis(x.delta, eps);
    if w.ncols() == 0 {
        return Ok(DetElement {
            delta: eps,
            ..x.clone()
        });
    }
    let jw = model.j_map(&w)?;
    let w_rat = rationalize(&w);
    let jw_rat = rationalize(&jw);
    let plus_word = x.plus_word.hcat(&w_rat);
    let dual_prefix = dual_word_of(&jw_rat)?;
    let minus_dual_word = dual_prefix.hcat(&x.minus_dual_word);
    Ok(DetElement {
        delta: eps,
        plus_word,
        minus_dual_word,
        coeff: x.coeff.clone(),
    })
}

/// Coefficient of `x` against the canonical chart element at `x.delta`.
pub fn det_normal_coeff(model: &FredholmModel, x: &DetElement) -> Result<Rat> {
    let ref_plus = rationalize(&model.v_plus_basis(-1.0, x.delta));
    let ref_minus = rationalize(&model.v_minus_basis(-1.0, x.delta));
    if ref_plus.ncols() != x.plus_word.ncols() || ref_minus.ncols() != x.minus_dual_word.ncols() {
        return Err(Error::DimensionMismatch(
            "element words disagree with the chart dimensions".into(),
        ));
    }
    let c_plus = if ref_plus.ncols() == 0 {
        Rat::one()
    } else {
        let duals = dual_basis_in_span(&ref_plus)?;
        (&duals.transpose() * &x.plus_word).det()
    };
    let c_minus = if ref_minus.ncols() == 0 {
        Rat::one()
    } else {
        let vol = GradedLineElement::volume(ref_minus);
        let dual = GradedLineElement::single(Rat::one(), WedgeFactor::dual(x.minus_dual_word.clone()));
        eval_pairing(&vol, &dual)?
    };
    Ok(&(&x.coeff * &c_plus) * &c_minus)
}

/// Orientation of the point: the sign of its canonical-chart coefficient.
pub fn det_orientation_sign(model: &FredholmModel, x: &DetElement) -> Result<i8> {
    let c = det_normal_coeff(model, x)?;
    if c.is_zero() {
        return Err(Error::DegeneratePairing("zero determinant element".into()));
    }
    Ok(if c.is_positive() { 1 } else { -1 })
}

/// Move a point to an arbitrary admissible chart (up through the direct
/// system, or down by re-expressing against transported canonicals).
pub fn det_re_express(model: &FredholmModel, x: &DetElement, delta: f64) -> Result<DetElement> {
    if delta == x.delta {
        return Ok(x.clone());
    }
    if delta > x.delta {
        return det_chart_change(model, x, delta);
    }
    // downward: divide out the chart image of the lower canonical element
    let c_here = det_normal_coeff(model, x)?;
    let lower = det_canonical(model, delta)?;
    let lifted = det_chart_change(model, &lower, x.delta)?;
    let c_lift = det_normal_coeff(model, &lifted)?;
    if c_lift.is_zero() {
        return Err(Error::DegeneratePairing("degenerate chart transition".into()));
    }
    Ok(DetElement {
        coeff: &lower.coeff * &(&c_here / &c_lift),
        ..lower
    })
}

/// The negative-operator isomorphism `DET(-D) -> DET(D)`: identity on the
/// chart words, sign `(-1)^{dim V^-_{[0,delta]}}`.
pub fn det_negative(x: &DetElement) -> DetElement {
    let n_minus = x.minus_dual_word.ncols();
    let sign = if n_minus % 2 == 0 { 1 } else { -1 };
    DetElement {
        delta: x.delta,
        plus_word: x.plus_word.clone(),
        minus_dual_word: x.minus_dual_word.clone(),
        coeff: &x.coeff * &rat(sign),
    }
}

/// The adjoint isomorphism `DET(D^*) -> DET(D)^*`: reinterpretation of the
/// chart pair (the dual-of-tensor convention carries no extra sign).
pub fn det_adjoint(x_of_dstar: &DetElement) -> DualDetElement {
    DualDetElement {
        delta: x_of_dstar.delta,
        minus_word: x_of_dstar.plus_word.clone(),
        plus_dual_word: x_of_dstar.minus_dual_word.clone(),
        coeff: x_of_dstar.coeff.clone(),
    }
}

/// Pairing `DET(D) (x) DET(D)^* -> R` in a common chart.
pub fn det_pair(x: &DetElement, phi: &DualDetElement) -> Result<Rat> {
    if (x.delta - phi.delta).abs() > 0.0 {
        return Err(Error::Scenario(
            "pairing requires a common chart cutoff".into(),
        ));
    }
    let p1 = eval_pairing(
        &GradedLineElement::volume(phi.minus_word.clone()),
        &GradedLineElement::single(Rat::one(), WedgeFactor::dual(x.minus_dual_word.clone())),
    )?;
    let p2 = eval_pairing(
        &GradedLineElement::volume(x.plus_word.clone()),
        &GradedLineElement::single(Rat::one(), WedgeFactor::dual(phi.plus_dual_word.clone())),
    )?;
    Ok(&(&(&x.coeff * &phi.coeff) * &p1) * &p2)
}

/// Embed word columns of an `n`-dimensional space into an `n + m` ambient
/// space at a row offset.
pub fn embed_rows(word: &RatMat, total: usize, offset: usize) -> RatMat {
    RatMat::from_fn(total, word.ncols(), |i, j| {
        if i >= offset && i < offset + word.nrows() {
            word[(i - offset, j)].clone()
        } else {
            Rat::zero()
        }
    })
}

/// Direct-sum isomorphism `DET D (x) DET D~ -> DET(D ⊕ D~)` at a common
/// cutoff. The braid past the inner factors contributes
/// `(-1)^{dim V^-(D) (dim V^+(D~) + dim V^-(D~))}`, and the combined dual
/// word lists the second summand first.
pub fn det_sum(
    x: &DetElement,
    y: &DetElement,
    dims: (usize, usize),
    dims_tilde: (usize, usize),
) -> Result<DetElement> {
    if x.delta != y.delta {
        return Err(Error::Scenario("direct sum requires a common cutoff".into()));
    }
    let (n_in, n_out) = dims;
    let (m_in, m_out) = dims_tilde;
    let plus = embed_rows(&x.plus_word, n_in + m_in, 0).hcat(&embed_rows(&y.plus_word, n_in + m_in, n_in));
    let dual = embed_rows(&y.minus_dual_word, n_out + m_out, n_out)
        .hcat(&embed_rows(&x.minus_dual_word, n_out + m_out, 0));
    let n_minus = x.minus_dual_word.ncols();
    let m_plus = y.plus_word.ncols();
    let m_minus = y.minus_dual_word.ncols();
    let sign = if (n_minus * (m_plus + m_minus)) % 2 == 0 {
        1
    } else {
        -1
    };
    Ok(DetElement {
        delta: x.delta,
        plus_word: plus,
        minus_dual_word: dual,
        coeff: &(&x.coeff * &y.coeff) * &rat(sign),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::ToleranceConfig;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn chart_change_direct_system() {
        // singular values {1, 1, 3}: sigma_{d,e'} = sigma_{e,e'} o sigma_{d,e}
        let d = Mat::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 3.0]);
        let c = cfg();
        let m = FredholmModel::new(d, &c).unwrap();
        let deltas = [0.5, 2.0, 4.0];
        let x = det_canonical(&m, deltas[0]).unwrap();
        let one_hop = det_chart_change(&m, &x, deltas[2]).unwrap();
        let mid = det_chart_change(&m, &x, deltas[1]).unwrap();
        let two_hop = det_chart_change(&m, &mid, deltas[2]).unwrap();
        let c1 = det_normal_coeff(&m, &one_hop).unwrap();
        let c2 = det_normal_coeff(&m, &two_hop).unwrap();
        let diff = crate::exact::rat_to_f64(&(&c1 - &c2));
        assert!(diff.abs() < 1e-9, "direct system composition defect {diff}");
    }

    #[test]
    fn empty_shell_is_identity() {
        let d = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let c = cfg();
        let m = FredholmModel::new(d, &c).unwrap();
        let x = det_canonical(&m, 0.5).unwrap();
        let y = det_chart_change(&m, &x, 0.6).unwrap();
        assert_eq!(x.plus_word, y.plus_word);
        assert_eq!(x.coeff, y.coeff);
    }

    #[test]
    fn negative_sign_and_adjoint_roundtrip() {
        // D with a one-dimensional V^- at the chosen cutoff
        let d = Mat::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 3.0]);
        let c = cfg();
        let m = FredholmModel::new(d.clone(), &c).unwrap();
        let x = det_canonical(&m, 1.0).unwrap();
        assert_eq!(x.minus_dual_word.ncols(), 1);
        let nx = det_negative(&x);
        assert_eq!(nx.coeff, rat(-1));

        // adjoint pairing: <canonical(D), A.10(canonical(D^T))> = 1
        let mt = FredholmModel::new(d.transpose(), &c).unwrap();
        let y = det_canonical(&mt, 1.0).unwrap();
        let phi = det_adjoint(&y);
        let p = det_pair(&x, &phi).unwrap();
        assert_eq!(p, Rat::one());
    }

    #[test]
    fn re_express_roundtrip() {
        let d = Mat::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 3.0]);
        let c = cfg();
        let m = FredholmModel::new(d, &c).unwrap();
        let hi = m.top_cutoff();
        let lo = m.kernel_cutoff();
        let x = det_canonical(&m, hi).unwrap();
        let down = det_re_express(&m, &x, lo).unwrap();
        let back = det_re_express(&m, &down, hi).unwrap();
        let c0 = det_normal_coeff(&m, &x).unwrap();
        let c1 = det_normal_coeff(&m, &back).unwrap();
        let diff = crate::exact::rat_to_f64(&(&c0 - &c1));
        assert!(diff.abs() < 1e-9);
    }
}
