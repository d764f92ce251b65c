//! Spectral Z-torsor points of self-adjoint operators: cutoff charts,
//! direct sums, the negative/dual pairing, mod-k reduction, and the
//! canonical comparison with determinant-line orientations.

use super::det::{det_canonical, det_orientation_sign};
use super::path::{transport_det, OperatorPath};
use super::FredholmModel;
use crate::linalg::SelfAdjointModel;
use crate::signs::torsors::{GroupVal, TorsorElement};
use crate::{Error, Result, ToleranceConfig};

/// A point `[m, delta]` of the spectral Z-torsor of a self-adjoint model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpElement {
    pub m: i64,
    pub delta: f64,
}

pub fn sp_make(model: &SelfAdjointModel, m: i64, delta: f64, cfg: &ToleranceConfig) -> Result<SpElement> {
    model.check_admissible(delta, cfg)?;
    Ok(SpElement { m, delta })
}

/// Move to another admissible cutoff: `[m, d] = [m + dim_K Eig_[d,e], e]`.
pub fn sp_chart(
    model: &SelfAdjointModel,
    x: &SpElement,
    eps: f64,
    cfg: &ToleranceConfig,
) -> Result<SpElement> {
    model.check_admissible(eps, cfg)?;
    let m = if eps >= x.delta {
        x.m + model.count_in_interval(x.delta, eps) as i64
    } else {
        x.m - model.count_in_interval(eps, x.delta) as i64
    };
    Ok(SpElement { m, delta: eps })
}

/// Direct sum at a common cutoff: `[m, d] (x) [m~, d] -> [m + m~, d]`.
pub fn sp_sum(x: &SpElement, y: &SpElement) -> Result<SpElement> {
    if x.delta != y.delta {
        return Err(Error::Scenario("spectral sum requires a common cutoff".into()));
    }
    Ok(SpElement {
        m: x.m + y.m,
        delta: x.delta,
    })
}

/// The negative/dual pairing: `[m, d]` of `D` applied to `[n, -d]` of `-D`
/// gives `m + n`.
pub fn sp_negative_dual(x_of_d: &SpElement, y_of_neg_d: &SpElement) -> Result<i64> {
    if (x_of_d.delta + y_of_neg_d.delta).abs() > 0.0 {
        return Err(Error::Scenario(
            "dual pairing requires opposite cutoffs".into(),
        ));
    }
    Ok(x_of_d.m + y_of_neg_d.m)
}

/// Reduce to a mod-k symmetric orientation, as a based torsor point.
pub fn sp_mod_k(x: &SpElement, k: i64) -> TorsorElement {
    TorsorElement::new(
        GroupVal::Zero,
        GroupVal::Z(x.m.rem_euclid(k)),
        format!("sp mod {k} at {}", x.delta),
    )
}

/// The canonical mod-2 comparison with determinant orientations: transport
/// the canonical orientation of `DET(D - lambda)` along `t -> D - t lambda`
/// and multiply by `(-1)^m`. Returns the orientation sign relative to the
/// canonical kernel chart of `D`. Independent of the representative
/// `[m, lambda]`.
pub fn sp_mod2_orientation(
    model: &SelfAdjointModel,
    x: &SpElement,
    cfg: &ToleranceConfig,
) -> Result<i8> {
    model.check_admissible(x.delta, cfg)?;
    let d = &model.operator.entries;
    let n = d.nrows();
    let lambda = x.delta;
    let id = crate::linalg::Mat::identity(n, n);
    let start_op = d - id * lambda;
    let path = OperatorPath {
        samples: vec![start_op.clone(), d.clone()],
    };
    let start_model = FredholmModel::new(start_op, cfg)?;
    let start = det_canonical(&start_model, start_model.kernel_cutoff())?;
    let end = transport_det(&path, &start, cfg)?;
    let end_model = FredholmModel::new(d.clone(), cfg)?;
    let sign = det_orientation_sign(&end_model, &end)?;
    Ok(if x.m.rem_euclid(2) == 0 { sign } else { -sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_selfadjoint, Mat, StructuredMatrix};

    fn model_of(diag: &[f64]) -> SelfAdjointModel {
        let n = diag.len();
        let mut m = Mat::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        eig_selfadjoint(&StructuredMatrix::real_endo(m), &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn chart_shift_and_sum() {
        let cfg = ToleranceConfig::default();
        let m = model_of(&[1.0, 2.0]);
        let x = sp_make(&m, 0, 0.5, &cfg).unwrap();
        let y = sp_chart(&m, &x, 1.5, &cfg).unwrap();
        assert_eq!(y.m, 1);
        let back = sp_chart(&m, &y, 0.5, &cfg).unwrap();
        assert_eq!(back.m, 0);

        let a = SpElement { m: 2, delta: 0.5 };
        let b = SpElement { m: 3, delta: 0.5 };
        assert_eq!(sp_sum(&a, &b).unwrap().m, 5);

        let dual = SpElement { m: 4, delta: -0.5 };
        assert_eq!(sp_negative_dual(&a, &dual).unwrap(), 6);
    }

    #[test]
    fn mod2_orientation_lambda_independent() {
        let cfg = ToleranceConfig::default();
        let m = model_of(&[-1.0, 1.0]);
        // the same abstract point expressed at three cutoffs
        let x = sp_make(&m, 0, 0.5, &cfg).unwrap();
        let s0 = sp_mod2_orientation(&m, &x, &cfg).unwrap();
        for lam in [2.0, -2.0] {
            let y = sp_chart(&m, &x, lam, &cfg).unwrap();
            let s = sp_mod2_orientation(&m, &y, &cfg).unwrap();
            assert_eq!(s, s0, "lambda = {lam}");
        }
        // shifting m by one flips the orientation
        let shifted = SpElement { m: x.m + 1, delta: x.delta };
        assert_eq!(sp_mod2_orientation(&m, &shifted, &cfg).unwrap(), -s0);
    }
}
