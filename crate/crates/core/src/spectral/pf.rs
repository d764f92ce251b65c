//! Pfaffian-line points of skew-adjoint real operators: cutoff charts via
//! the canonical volume of the small-eigenvalue complex structure, the
//! metric duality, and direct sums.

use super::{rationalize, FredholmModel};
use crate::exact::{Rat, RatMat};
use crate::linalg::Mat;
use crate::signs::lines::{
    dual_basis_in_span, eval_pairing, omega_of_j_with_tol, volume_ratio, GradedLineElement,
    WedgeFactor,
};
use crate::{Error, Result, ToleranceConfig};
use num::traits::{One, Signed, Zero};

/// Spectral model of a skew-adjoint real matrix.
#[derive(Debug, Clone)]
pub struct SkewModel {
    pub inner: FredholmModel,
}

impl SkewModel {
    pub fn new(d: Mat, cfg: &ToleranceConfig) -> Result<Self> {
        let skew = (&d + d.transpose()).amax();
        if skew > cfg.eig_tol * d.amax().max(1.0) * 10.0 {
            return Err(Error::NotSkewAdjoint(format!(
                "skewness residual {skew:.3e}"
            )));
        }
        Ok(SkewModel {
            inner: FredholmModel::new(d, cfg)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim_in()
    }

    /// Frame of `V_{(lo, hi)}`; for a skew operator `V^+ = V^-` as spaces.
    pub fn v_basis(&self, lo: f64, hi: f64) -> Mat {
        self.inner.v_plus_basis(lo, hi)
    }

    /// The canonical volume form of the shell `(delta, eps]`, built from
    /// the complex structure `J = D / lambda`.
    pub fn shell_volume(&self, delta: f64, eps: f64) -> Result<GradedLineElement> {
        let w = self.v_basis(delta, eps);
        if w.ncols() == 0 {
            return Ok(GradedLineElement::volume(RatMat::zeros(self.dim(), 0)));
        }
        // ambient matrix representing J on the shell: sum (D w_i / l_i) w_i^T
        let mut j_ambient = Mat::zeros(self.dim(), self.dim());
        let jw = self.inner.j_map(&w)?;
        for i in 0..w.ncols() {
            j_ambient += jw.column(i) * w.column(i).transpose();
        }
        omega_of_j_with_tol(&rationalize(&j_ambient), &rationalize(&w), 1e-9)
    }
}

/// A point of the Pfaffian line in the chart at `delta`:
/// `coeff * (∧ word)` inside `det V_{[0,delta]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfElement {
    pub delta: f64,
    pub word: RatMat,
    pub coeff: Rat,
}

/// A point of `PF(D)^*`: a functional wedge word stored in its given order
/// (the metric flat of an orthonormal word keeps the order).
#[derive(Debug, Clone, PartialEq)]
pub struct DualPfElement {
    pub delta: f64,
    pub word: RatMat,
    pub coeff: Rat,
}

pub fn pf_canonical(model: &SkewModel, delta: f64) -> Result<PfElement> {
    model.inner.check_admissible(delta)?;
    Ok(PfElement {
        delta,
        word: rationalize(&model.v_basis(-1.0, delta)),
        coeff: Rat::one(),
    })
}

/// Chart change `v -> v ∧ omega(J_{(delta, eps]})`.
pub fn pf_chart_change(model: &SkewModel, x: &PfElement, eps: f64) -> Result<PfElement> {
    model.inner.check_admissible(eps)?;
    if eps < x.delta {
        return Err(Error::InadmissibleCutoff {
            cutoff: eps,
            gap_tol: model.inner.cfg.gap_tol,
        });
    }
    let omega = model.shell_volume(x.delta, eps)?;
    let shell_word = &omega.factors[0].vectors;
    Ok(PfElement {
        delta: eps,
        word: x.word.hcat(shell_word),
        coeff: &x.coeff * &omega.coeff,
    })
}

pub fn pf_normal_coeff(model: &SkewModel, x: &PfElement) -> Result<Rat> {
    let reference = rationalize(&model.v_basis(-1.0, x.delta));
    if reference.ncols() != x.word.ncols() {
        return Err(Error::DimensionMismatch(
            "element word disagrees with the chart dimension".into(),
        ));
    }
    if reference.ncols() == 0 {
        return Ok(x.coeff.clone());
    }
    let r = volume_ratio(
        &GradedLineElement::volume(x.word.clone()),
        &GradedLineElement::volume(reference),
    )?;
    Ok(&x.coeff * &r)
}

pub fn pf_orientation_sign(model: &SkewModel, x: &PfElement) -> Result<i8> {
    let c = pf_normal_coeff(model, x)?;
    if c.is_zero() {
        return Err(Error::DegeneratePairing("zero Pfaffian element".into()));
    }
    Ok(if c.is_positive() { 1 } else { -1 })
}

/// Move to an arbitrary admissible chart.
pub fn pf_re_express(model: &SkewModel, x: &PfElement, delta: f64) -> Result<PfElement> {
    if delta == x.delta {
        return Ok(x.clone());
    }
    if delta > x.delta {
        return pf_chart_change(model, x, delta);
    }
    let c_here = pf_normal_coeff(model, x)?;
    let lower = pf_canonical(model, delta)?;
    let lifted = pf_chart_change(model, &lower, x.delta)?;
    let c_lift = pf_normal_coeff(model, &lifted)?;
    if c_lift.is_zero() {
        return Err(Error::DegeneratePairing("degenerate chart transition".into()));
    }
    Ok(PfElement {
        coeff: &(&c_here / &c_lift) * &lower.coeff,
        ..lower
    })
}

/// The metric duality `PF(D^*) -> PF(D)^*`: orthonormal words map to their
/// flat words in unchanged order. For skew `D` the space data of `D^* = -D`
/// agrees with that of `D`.
pub fn pf_dual(x_of_dstar: &PfElement) -> DualPfElement {
    DualPfElement {
        delta: x_of_dstar.delta,
        word: x_of_dstar.word.clone(),
        coeff: x_of_dstar.coeff.clone(),
    }
}

/// Pairing `PF(D) (x) PF(D)^* -> R` in a common chart. The flat word keeps
/// its order, so for an orthonormal word of length `n` the pairing against
/// its own flat is `(-1)^{n(n-1)/2}`.
pub fn pf_pair(x: &PfElement, phi: &DualPfElement) -> Result<Rat> {
    if x.delta != phi.delta {
        return Err(Error::Scenario(
            "pairing requires a common chart cutoff".into(),
        ));
    }
    eval_pairing(
        &GradedLineElement::volume(x.word.clone()).scale(&x.coeff),
        &GradedLineElement::single(phi.coeff.clone(), WedgeFactor::dual(phi.word.clone())),
    )
}

/// Direct-sum isomorphism `PF D (x) PF D~ -> PF(D ⊕ D~)`: ordered
/// concatenation of the words, no sign.
pub fn pf_sum(x: &PfElement, y: &PfElement, dim: usize, dim_tilde: usize) -> Result<PfElement> {
    if x.delta != y.delta {
        return Err(Error::Scenario("direct sum requires a common cutoff".into()));
    }
    let total = dim + dim_tilde;
    let word = super::det::embed_rows(&x.word, total, 0)
        .hcat(&super::det::embed_rows(&y.word, total, dim));
    Ok(PfElement {
        delta: x.delta,
        word,
        coeff: &x.coeff * &y.coeff,
    })
}

/// Dual functional of a one-word Pf element against a primal word, used by
/// gluing checks: `<word, flat(word)> = (-1)^{n(n-1)/2}` on orthonormal
/// words.
pub fn pf_flat_pairing_sign(n: usize) -> i64 {
    if (n * (n.saturating_sub(1)) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exact dual word (reversed dual basis) of a rational word; exposed for
/// the orientation-transport layer.
pub fn reversed_dual_word(word: &RatMat) -> Result<RatMat> {
    let duals = dual_basis_in_span(word)?;
    let n = duals.ncols();
    Ok(RatMat::from_fn(duals.nrows(), n, |i, j| {
        duals[(i, n - 1 - j)].clone()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn skew_block(l1: f64, l2: f64) -> Mat {
        // blocks [[0, -l],[l, 0]] have singular value l
        Mat::from_row_slice(
            4,
            4,
            &[
                0.0, -l1, 0.0, 0.0, //
                l1, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -l2, //
                0.0, 0.0, l2, 0.0,
            ],
        )
    }

    #[test]
    fn chart_change_composition_and_gap() {
        let cfg = ToleranceConfig::default();
        let m = SkewModel::new(skew_block(1.0, 2.0), &cfg).unwrap();
        let x = pf_canonical(&m, 0.5).unwrap();
        // no spectrum in (0.5, 0.9]: unchanged
        let y = pf_chart_change(&m, &x, 0.9).unwrap();
        assert_eq!(y.word, x.word);
        assert_eq!(y.coeff, x.coeff);
        // composition through 1.5 equals the direct jump to 2.5
        let via = pf_chart_change(&m, &pf_chart_change(&m, &x, 1.5).unwrap(), 2.5).unwrap();
        let direct = pf_chart_change(&m, &x, 2.5).unwrap();
        let c1 = pf_normal_coeff(&m, &via).unwrap();
        let c2 = pf_normal_coeff(&m, &direct).unwrap();
        let diff = crate::exact::rat_to_f64(&(&c1 - &c2));
        assert!(diff.abs() < 1e-9, "composition defect {diff}");
    }

    #[test]
    fn dual_on_kernel_and_flat_sign() {
        // 2x2 zero skew matrix: the chart space is the kernel
        let cfg = ToleranceConfig::default();
        let m = SkewModel::new(Mat::zeros(2, 2), &cfg).unwrap();
        let x = pf_canonical(&m, 0.5).unwrap();
        let phi = pf_dual(&x);
        // <e1 ∧ e2, e1* ∧ e2*> = -1 = (-1)^{2*1/2}
        assert_eq!(pf_pair(&x, &phi).unwrap(), rat(pf_flat_pairing_sign(2)));
    }
}
