//! Transport of torsor points along operator paths.
//!
//! A path is a list of matrix samples, understood as piecewise-linear in
//! between. Transport works chartwise: between two nearby operators a
//! common admissible cutoff is chosen, the point is re-expressed in that
//! chart, and the deterministic chart frames of the two operators are
//! aligned through the sign of their overlap determinant. Segments without
//! a usable common chart are bisected adaptively.

use super::det::{det_canonical, det_normal_coeff, det_re_express, DetElement};
use super::pf::{pf_canonical, pf_normal_coeff, pf_re_express, PfElement, SkewModel};
use super::sp::{sp_chart, SpElement};
use super::FredholmModel;
use crate::linalg::{eig_selfadjoint, Mat, SelfAdjointModel, StructuredMatrix};
use crate::{Error, Result, ToleranceConfig};
use num::traits::Signed;

/// Piecewise-linear operator path.
#[derive(Debug, Clone)]
pub struct OperatorPath {
    pub samples: Vec<Mat>,
}

impl OperatorPath {
    pub fn two_point(a: Mat, b: Mat) -> Self {
        OperatorPath {
            samples: vec![a, b],
        }
    }

    pub fn closed(mut samples: Vec<Mat>) -> Self {
        if let Some(first) = samples.first().cloned() {
            samples.push(first);
        }
        OperatorPath { samples }
    }
}

const MAX_DEPTH: u32 = 40;

/// Common admissible determinant cutoff for two models with matching chart
/// dimensions; prefers the largest spectral gap.
fn common_det_cutoff(a: &FredholmModel, b: &FredholmModel, cfg: &ToleranceConfig) -> Option<f64> {
    let mut vals: Vec<f64> = a
        .singular_values()
        .iter()
        .chain(b.singular_values())
        .map(|(s, _)| *s)
        .collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut candidates = Vec::new();
    if let Some(first) = vals.first() {
        if *first > 2.0 * cfg.gap_tol {
            candidates.push(first / 2.0);
        }
        let last = vals.last().unwrap();
        candidates.push(last + 1.0);
        for w in vals.windows(2) {
            if w[1] - w[0] > 2.0 * cfg.gap_tol {
                candidates.push((w[0] + w[1]) / 2.0);
            }
        }
    } else {
        candidates.push(1.0);
    }
    let mut best: Option<(f64, f64)> = None;
    for c in candidates {
        let gap = a.gap_at(c).min(b.gap_at(c));
        if gap < cfg.gap_tol {
            continue;
        }
        if a.chart_dims(c) != b.chart_dims(c) {
            continue;
        }
        if best.map(|(g, _)| gap > g).unwrap_or(true) {
            best = Some((gap, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Sign of the frame-overlap determinant; `None` when too ill-conditioned.
fn overlap_sign(frame_a: &Mat, frame_b: &Mat) -> Option<i8> {
    if frame_a.ncols() != frame_b.ncols() {
        return None;
    }
    if frame_a.ncols() == 0 {
        return Some(1);
    }
    let g = frame_a.transpose() * frame_b;
    let det = g.determinant();
    if det.abs() < 0.5 {
        return None;
    }
    Some(if det > 0.0 { 1 } else { -1 })
}

fn det_segment(
    a_op: &Mat,
    b_op: &Mat,
    elem: &DetElement,
    cfg: &ToleranceConfig,
    depth: u32,
) -> Result<DetElement> {
    if depth > MAX_DEPTH {
        return Err(Error::Transport(
            "no common chart found after maximal refinement".into(),
        ));
    }
    let a = FredholmModel::new(a_op.clone(), cfg)?;
    let b = FredholmModel::new(b_op.clone(), cfg)?;
    let step = || -> Option<DetElement> {
        let delta = common_det_cutoff(&a, &b, cfg)?;
        let x = det_re_express(&a, elem, delta).ok()?;
        let c = det_normal_coeff(&a, &x).ok()?;
        let s_plus = overlap_sign(&a.v_plus_basis(-1.0, delta), &b.v_plus_basis(-1.0, delta))?;
        let s_minus = overlap_sign(&a.v_minus_basis(-1.0, delta), &b.v_minus_basis(-1.0, delta))?;
        let mut out = det_canonical(&b, delta).ok()?;
        let sign = (s_plus * s_minus) as i64;
        out.coeff = &c * &crate::exact::rat(sign);
        Some(out)
    };
    if let Some(out) = step() {
        return Ok(out);
    }
    let mid = (a_op + b_op) * 0.5;
    let half = det_segment(a_op, &mid, elem, cfg, depth + 1)?;
    det_segment(&mid, b_op, &half, cfg, depth + 1)
}

/// Transport a determinant-line point along the whole path.
pub fn transport_det(
    path: &OperatorPath,
    start: &DetElement,
    cfg: &ToleranceConfig,
) -> Result<DetElement> {
    if path.samples.len() < 2 {
        return Ok(start.clone());
    }
    let mut elem = start.clone();
    for w in path.samples.windows(2) {
        elem = det_segment(&w[0], &w[1], &elem, cfg, 0)?;
    }
    Ok(elem)
}

fn pf_segment(
    a_op: &Mat,
    b_op: &Mat,
    elem: &PfElement,
    cfg: &ToleranceConfig,
    depth: u32,
) -> Result<PfElement> {
    if depth > MAX_DEPTH {
        return Err(Error::Transport(
            "no common chart found after maximal refinement".into(),
        ));
    }
    let a = SkewModel::new(a_op.clone(), cfg)?;
    let b = SkewModel::new(b_op.clone(), cfg)?;
    let step = || -> Option<PfElement> {
        let delta = common_det_cutoff(&a.inner, &b.inner, cfg)?;
        let x = pf_re_express(&a, elem, delta).ok()?;
        let c = pf_normal_coeff(&a, &x).ok()?;
        let s = overlap_sign(&a.v_basis(-1.0, delta), &b.v_basis(-1.0, delta))?;
        let mut out = pf_canonical(&b, delta).ok()?;
        out.coeff = &c * &crate::exact::rat(s as i64);
        Some(out)
    };
    if let Some(out) = step() {
        return Ok(out);
    }
    let mid = (a_op + b_op) * 0.5;
    let half = pf_segment(a_op, &mid, elem, cfg, depth + 1)?;
    pf_segment(&mid, b_op, &half, cfg, depth + 1)
}

/// Transport a Pfaffian-line point along the whole path (skew samples).
pub fn transport_pf(
    path: &OperatorPath,
    start: &PfElement,
    cfg: &ToleranceConfig,
) -> Result<PfElement> {
    if path.samples.len() < 2 {
        return Ok(start.clone());
    }
    let mut elem = start.clone();
    for w in path.samples.windows(2) {
        elem = pf_segment(&w[0], &w[1], &elem, cfg, 0)?;
    }
    Ok(elem)
}

fn sa_model(op: &Mat, cfg: &ToleranceConfig) -> Result<SelfAdjointModel> {
    eig_selfadjoint(&StructuredMatrix::real_endo(op.clone()), cfg)
}

/// Common admissible cutoff for two self-adjoint models (in eigenvalue
/// scale, anywhere on the real line).
fn common_sp_cutoff(a: &SelfAdjointModel, b: &SelfAdjointModel, cfg: &ToleranceConfig) -> Option<f64> {
    let mut vals: Vec<f64> = a
        .clusters
        .iter()
        .chain(b.clusters.iter())
        .map(|c| c.value)
        .collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut candidates = vec![vals.first()? - 1.0, vals.last()? + 1.0];
    for w in vals.windows(2) {
        if w[1] - w[0] > 2.0 * cfg.gap_tol {
            candidates.push((w[0] + w[1]) / 2.0);
        }
    }
    let mut best: Option<(f64, f64)> = None;
    for c in candidates {
        let gap = a.spectral_gap_at(c).min(b.spectral_gap_at(c));
        if gap < cfg.gap_tol {
            continue;
        }
        if best.map(|(g, _)| gap > g).unwrap_or(true) {
            best = Some((gap, c));
        }
    }
    best.map(|(_, c)| c)
}

fn sp_segment(
    a_op: &Mat,
    b_op: &Mat,
    elem: &SpElement,
    cfg: &ToleranceConfig,
    depth: u32,
) -> Result<SpElement> {
    if depth > MAX_DEPTH {
        return Err(Error::Transport(
            "no common chart found after maximal refinement".into(),
        ));
    }
    let a = sa_model(a_op, cfg)?;
    let b = sa_model(b_op, cfg)?;
    // keep the current cutoff when both spectra avoid it
    if a.spectral_gap_at(elem.delta) >= cfg.gap_tol && b.spectral_gap_at(elem.delta) >= cfg.gap_tol
    {
        return Ok(*elem);
    }
    if let Some(delta) = common_sp_cutoff(&a, &b, cfg) {
        return sp_chart(&a, elem, delta, cfg);
    }
    let mid = (a_op + b_op) * 0.5;
    let half = sp_segment(a_op, &mid, elem, cfg, depth + 1)?;
    sp_segment(&mid, b_op, &half, cfg, depth + 1)
}

/// Transport a spectral-torsor point along a path of self-adjoint samples.
pub fn transport_sp(
    path: &OperatorPath,
    start: &SpElement,
    cfg: &ToleranceConfig,
) -> Result<SpElement> {
    if path.samples.len() < 2 {
        return Ok(*start);
    }
    let mut elem = *start;
    for w in path.samples.windows(2) {
        elem = sp_segment(&w[0], &w[1], &elem, cfg, 0)?;
    }
    Ok(elem)
}

/// Independent crossing-counting oracle: the signed change of the
/// enumeration label at the level `delta` along a path of self-adjoint
/// samples. An eigenvalue crossing the level downward (a new eigenvalue
/// entering below the cutoff) counts `+1`; upward counts `-1`. This is the
/// amount by which the chart label of a fixed spectral-torsor point moves,
/// computed by brute-force recounting on a fine subdivision.
pub fn crossing_count_oracle(
    path: &OperatorPath,
    delta: f64,
    cfg: &ToleranceConfig,
    substeps: usize,
) -> Result<i64> {
    let mut total = 0i64;
    for w in path.samples.windows(2) {
        let mut prev: Option<i64> = None;
        for k in 0..=substeps {
            let t = k as f64 / substeps as f64;
            let op = &w[0] * (1.0 - t) + &w[1] * t;
            let m = sa_model(&op, cfg)?;
            let below = m
                .clusters
                .iter()
                .filter(|c| c.value < delta)
                .map(|c| c.len)
                .sum::<usize>() as i64
                / m.multiplicity_field.dim_r() as i64;
            if let Some(p) = prev {
                total += below - p;
            }
            prev = Some(below);
        }
    }
    Ok(total)
}

/// Convenience: does a rational coefficient carry a positive sign?
pub fn coeff_sign(c: &crate::exact::Rat) -> i8 {
    if c.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_to_f64;

    #[test]
    fn constant_path_is_identity() {
        let cfg = ToleranceConfig::default();
        let d = Mat::from_row_slice(2, 2, &[1.0, 0.2, 0.2, -1.0]);
        let m = FredholmModel::new(d.clone(), &cfg).unwrap();
        let start = det_canonical(&m, m.kernel_cutoff()).unwrap();
        let path = OperatorPath::two_point(d.clone(), d);
        let end = transport_det(&path, &start, &cfg).unwrap();
        let back = det_re_express(&m, &end, start.delta).unwrap();
        let c0 = det_normal_coeff(&m, &start).unwrap();
        let c1 = det_normal_coeff(&m, &back).unwrap();
        assert!((rat_to_f64(&c0) - rat_to_f64(&c1)).abs() < 1e-9);
    }

    #[test]
    fn refinement_stability_on_a_rotation_loop() {
        // rotate an invertible symmetric operator by conjugation; a full
        // loop with no eigenvalue crossing the cutoff transports trivially
        let cfg = ToleranceConfig::default();
        let base = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let rot = |t: f64| {
            let (c, s) = ((std::f64::consts::PI * t).cos(), (std::f64::consts::PI * t).sin());
            let g = Mat::from_row_slice(2, 2, &[c, -s, s, c]);
            &g * &base * g.transpose()
        };
        for steps in [6usize, 12] {
            let samples: Vec<Mat> = (0..=steps).map(|k| rot(k as f64 / steps as f64)).collect();
            let path = OperatorPath { samples };
            let m0 = FredholmModel::new(path.samples[0].clone(), &cfg).unwrap();
            // cutoff 1.5 captures the rotating eigenline of singular value 1
            let start = det_canonical(&m0, 1.5).unwrap();
            let end = transport_det(&path, &start, &cfg).unwrap();
            let c = det_normal_coeff(&m0, &det_re_express(&m0, &end, 1.5).unwrap()).unwrap();
            // loop with no crossing: the plus and minus line both rotate by
            // pi, their orientation flips cancel in the determinant line
            assert!(
                (rat_to_f64(&c) - 1.0).abs() < 1e-6,
                "steps={steps}, coeff={}",
                rat_to_f64(&c)
            );
        }
    }

    #[test]
    fn spectral_flow_matches_crossing_oracle() {
        // D(t) = diag(t - 0.5, 2): one eigenvalue crosses 0 upward
        let cfg = ToleranceConfig::default();
        let op = |t: f64| Mat::from_row_slice(2, 2, &[t - 0.5, 0.0, 0.0, 2.0]);
        let samples: Vec<Mat> = (0..=10).map(|k| op(k as f64 / 10.0)).collect();
        let path = OperatorPath { samples };
        let m0 = sa_model(&path.samples[0], &cfg).unwrap();
        let x = SpElement { m: 0, delta: 0.0 };
        m0.check_admissible(0.0, &cfg).unwrap();
        let end = transport_sp(&path, &x, &cfg).unwrap();
        let m_end = sa_model(path.samples.last().unwrap(), &cfg).unwrap();
        let back = sp_chart(&m_end, &end, 0.0, &cfg).unwrap();
        // the torsor point is constant; its label at level 0 moves by the
        // signed crossing count
        let flow = crossing_count_oracle(&path, 0.0, &cfg, 20).unwrap();
        assert_eq!(flow, -1); // one eigenvalue left the region below the level
        assert_eq!(back.m - x.m, flow);
    }
}
