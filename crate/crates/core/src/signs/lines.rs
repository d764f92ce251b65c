//! Graded determinant lines: exact wedge words, duality pairings, braids,
//! and the canonical volume form of a complex structure.
//!
//! Conventions (supersymmetric):
//! * a line carries the parity `(-1)^k` of its wedge length;
//! * moving two odd factors past one another costs a sign;
//! * functionals evaluate on the left, and the pairing of a wedge word with
//!   a dual wedge word reverses the dual list before taking the Gram
//!   determinant, so `<v_1 ∧ ... ∧ v_n, v_n^* ∧ ... ∧ v_1^*> = 1`;
//! * the dual volume form is the reversed dual basis.
//!
//! Functionals are represented by ambient vectors through the standard
//! inner product. All arithmetic is exact.

use crate::exact::{Rat, RatMat};
use crate::{Error, Result};
use num::traits::{One, Zero};

/// One tensor factor: a wedge word over `R^ambient`, primal or dual.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeFactor {
    /// Columns are the wedge-word vectors, in wedge order.
    pub vectors: RatMat,
    pub dual: bool,
}

impl WedgeFactor {
    pub fn primal(vectors: RatMat) -> Self {
        WedgeFactor {
            vectors,
            dual: false,
        }
    }

    pub fn dual(vectors: RatMat) -> Self {
        WedgeFactor {
            vectors,
            dual: true,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ambient(&self) -> usize {
        self.vectors.nrows()
    }

    /// `(-1)^k`.
    pub fn parity(&self) -> i64 {
        if self.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// A scalar multiple of a tensor word of wedge factors.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedLineElement {
    pub coeff: Rat,
    pub factors: Vec<WedgeFactor>,
}

impl GradedLineElement {
    pub fn scalar(coeff: Rat) -> Self {
        GradedLineElement {
            coeff,
            factors: Vec::new(),
        }
    }

    pub fn single(coeff: Rat, factor: WedgeFactor) -> Self {
        GradedLineElement {
            coeff,
            factors: vec![factor],
        }
    }

    pub fn volume(vectors: RatMat) -> Self {
        GradedLineElement::single(Rat::one(), WedgeFactor::primal(vectors))
    }

    /// Total parity `(-1)^{sum of wedge lengths}`.
    pub fn parity(&self) -> i64 {
        self.factors.iter().map(WedgeFactor::parity).product()
    }

    pub fn scale(&self, s: &Rat) -> Self {
        GradedLineElement {
            coeff: &self.coeff * s,
            factors: self.factors.clone(),
        }
    }

    /// Swap adjacent factors `i`, `i+1` with the braid sign
    /// `(-1)^{n_i n_{i+1}}`.
    pub fn braid_adjacent(&self, i: usize) -> Result<GradedLineElement> {
        if i + 1 >= self.factors.len() {
            return Err(Error::OutOfRange("braid position out of range".into()));
        }
        let mut factors = self.factors.clone();
        factors.swap(i, i + 1);
        let n1 = self.factors[i].len();
        let n2 = self.factors[i + 1].len();
        let sign = if (n1 * n2) % 2 == 0 { 1 } else { -1 };
        Ok(GradedLineElement {
            coeff: &self.coeff * &crate::exact::rat(sign),
            factors,
        })
    }
}

/// Concatenate the wedge words of two single-factor primal elements over the
/// same ambient space (the ordered direct-sum isomorphism).
pub fn wedge_concat(a: &GradedLineElement, b: &GradedLineElement) -> Result<GradedLineElement> {
    let (fa, fb) = match (a.factors.as_slice(), b.factors.as_slice()) {
        ([fa], [fb]) if !fa.dual && !fb.dual => (fa, fb),
        _ => {
            return Err(Error::Scenario(
                "wedge_concat expects two single primal factors".into(),
            ))
        }
    };
    if fa.ambient() != fb.ambient() {
        return Err(Error::DimensionMismatch(
            "wedge_concat ambient spaces differ".into(),
        ));
    }
    let joined = fa.vectors.hcat(&fb.vectors);
    if joined.rank() != joined.ncols() {
        return Err(Error::DegeneratePairing(
            "wedge_concat spans are not independent".into(),
        ));
    }
    Ok(GradedLineElement::single(
        &a.coeff * &b.coeff,
        WedgeFactor::primal(joined),
    ))
}

/// Braid two single-factor elements: returns `(b', a')` together with the
/// sign `(-1)^{n_1 n_2}` folded into the coefficient of the first output.
pub fn braid(
    a: &GradedLineElement,
    b: &GradedLineElement,
) -> Result<(GradedLineElement, GradedLineElement)> {
    let n1: usize = a.factors.iter().map(WedgeFactor::len).sum();
    let n2: usize = b.factors.iter().map(WedgeFactor::len).sum();
    let sign = if (n1 * n2) % 2 == 0 { 1 } else { -1 };
    Ok((b.scale(&crate::exact::rat(sign)), a.clone()))
}

/// Dual basis of the columns of `v` inside their own span: `w` with
/// `w^T v = id`.
pub fn dual_basis_in_span(v: &RatMat) -> Result<RatMat> {
    let gram = &v.transpose() * v;
    let inv = gram.inverse().ok_or_else(|| {
        Error::DegeneratePairing("wedge word is linearly dependent".into())
    })?;
    Ok(v * &inv)
}

/// The dual volume form `omega^* = v_n^* ∧ ... ∧ v_1^*` of a primal wedge
/// word (reversed dual basis), satisfying `<omega, omega^*> = 1`.
pub fn dual_volume(omega: &GradedLineElement) -> Result<GradedLineElement> {
    let f = match omega.factors.as_slice() {
        [f] if !f.dual => f,
        _ => {
            return Err(Error::Scenario(
                "dual_volume expects a single primal factor".into(),
            ))
        }
    };
    let w = dual_basis_in_span(&f.vectors)?;
    let n = w.ncols();
    let reversed = RatMat::from_fn(w.nrows(), n, |i, j| w[(i, n - 1 - j)].clone());
    if omega.coeff.is_zero() {
        return Err(Error::DegeneratePairing("zero volume form".into()));
    }
    Ok(GradedLineElement::single(
        Rat::one() / omega.coeff.clone(),
        WedgeFactor::dual(reversed),
    ))
}

/// Pair a primal wedge word against a dual wedge word over the same ambient
/// space: reverse the dual list, then take the Gram determinant.
pub fn eval_pairing(omega: &GradedLineElement, eta: &GradedLineElement) -> Result<Rat> {
    let (fo, fe) = match (omega.factors.as_slice(), eta.factors.as_slice()) {
        ([fo], [fe]) if !fo.dual && fe.dual => (fo, fe),
        _ => {
            return Err(Error::Scenario(
                "eval_pairing expects one primal and one dual factor".into(),
            ))
        }
    };
    if fo.ambient() != fe.ambient() {
        return Err(Error::DimensionMismatch("pairing ambient spaces differ".into()));
    }
    if fo.len() != fe.len() {
        return Err(Error::DegeneratePairing(
            "pairing of wedge words of different lengths".into(),
        ));
    }
    let n = fo.len();
    if n == 0 {
        return Ok(&omega.coeff * &eta.coeff);
    }
    // alpha_i := reversed dual list; G_{ij} = <v_j, alpha_i>
    let g = RatMat::from_fn(n, n, |i, j| {
        let alpha = fe.vectors.column(n - 1 - i);
        let v = fo.vectors.column(j);
        RatMat::dot_columns(&alpha, &v)
    });
    Ok(&(&omega.coeff * &eta.coeff) * &g.det())
}

/// Pair per the dual-of-tensor convention: an element of `L1^* (x) L2^*`
/// acts on `L2 (x) L1` by `<x_2 (x) x_1, a_1 (x) a_2> = <x_1,a_1><x_2,a_2>`.
pub fn pair_dual_tensor(
    x2: &GradedLineElement,
    x1: &GradedLineElement,
    a1: &GradedLineElement,
    a2: &GradedLineElement,
) -> Result<Rat> {
    Ok(&eval_pairing(x1, a1)? * &eval_pairing(x2, a2)?)
}

/// The determinant element of an isomorphism `f: V -> W` on the span of
/// `basis`: `v_1 ∧ ... ∧ v_n (x) f(v_n)^* ∧ ... ∧ f(v_1)^*`.
pub fn det_of_iso(f: &RatMat, basis: &RatMat) -> Result<GradedLineElement> {
    let fv = f * basis;
    if fv.rank() != fv.ncols() {
        return Err(Error::SingularMap("det of a singular map".into()));
    }
    let duals = dual_basis_in_span(&fv)?;
    let n = duals.ncols();
    let reversed = RatMat::from_fn(duals.nrows(), n, |i, j| duals[(i, n - 1 - j)].clone());
    Ok(GradedLineElement {
        coeff: Rat::one(),
        factors: vec![
            WedgeFactor::primal(basis.clone()),
            WedgeFactor::dual(reversed),
        ],
    })
}

/// Coefficient of a two-factor element `(primal, dual)` against reference
/// words: `elem = c * (ref_primal (x) ref_dual)`.
pub fn coeff_against_refs(
    elem: &GradedLineElement,
    ref_primal: &RatMat,
    ref_dual_primal_word: &RatMat,
) -> Result<Rat> {
    let (fp, fd) = match elem.factors.as_slice() {
        [fp, fd] if !fp.dual && fd.dual => (fp, fd),
        _ => {
            return Err(Error::Scenario(
                "expected a (primal, dual) two-factor element".into(),
            ))
        }
    };
    // primal coordinates against the reference wedge
    let ref_duals = dual_basis_in_span(ref_primal)?;
    let coords = &ref_duals.transpose() * &fp.vectors;
    let c_plus = coords.det();
    // dual coordinates: pair the stored dual word against the reference primal
    let ref_vol = GradedLineElement::volume(ref_dual_primal_word.clone());
    let dual_elem = GradedLineElement::single(Rat::one(), fd.clone());
    let c_minus = eval_pairing(&ref_vol, &dual_elem)?;
    Ok(&(&elem.coeff * &c_plus) * &c_minus)
}

/// Greedily choose a K-basis `v_1, ..., v_m` of the span of `basis` such
/// that `(v_i, J v_i)` spans, then form the canonical volume
/// `v_1 ∧ ... ∧ v_m ∧ J(v_m) ∧ ... ∧ J(v_1)`.
///
/// The structure checks (`J` preserves the span, squares to `-1`, skew) are
/// exact; use [`omega_of_j_with_tol`] for data carrying float rounding.
pub fn omega_of_j(j: &RatMat, basis: &RatMat) -> Result<GradedLineElement> {
    omega_of_j_impl(j, basis, None)
}

/// As [`omega_of_j`], but the structure checks are verified to a residual
/// bound instead of exactly.
pub fn omega_of_j_with_tol(j: &RatMat, basis: &RatMat, tol: f64) -> Result<GradedLineElement> {
    omega_of_j_impl(j, basis, Some(tol))
}

fn omega_of_j_impl(j: &RatMat, basis: &RatMat, tol: Option<f64>) -> Result<GradedLineElement> {
    let ambient = basis.nrows();
    let total = basis.ncols();
    if total % 2 != 0 {
        return Err(Error::StructureViolation(
            "complex structure on an odd-dimensional space".into(),
        ));
    }
    // J must preserve the span, square to -1 on it, and be skew.
    let jb = j * basis;
    let jjb = j * &jb;
    let gram = &basis.transpose() * basis;
    let square_defect = &(&basis.transpose() * &jjb) + &gram;
    let skew = &(&basis.transpose() * &jb) + &(&jb.transpose() * basis);
    match tol {
        None => {
            let joined = basis.hcat(&jb);
            if joined.rank() != total {
                return Err(Error::StructureViolation(
                    "J does not preserve the subspace".into(),
                ));
            }
            if !square_defect.is_zero() {
                return Err(Error::StructureViolation("J^2 != -1 on the subspace".into()));
            }
            if !skew.is_zero() {
                return Err(Error::StructureViolation("J is not skew on the subspace".into()));
            }
        }
        Some(t) => {
            if square_defect.max_abs_f64() > t || skew.max_abs_f64() > t {
                return Err(Error::StructureViolation(format!(
                    "J structure residual exceeds {t:.3e} on the subspace"
                )));
            }
        }
    }

    let m = total / 2;
    let mut chosen: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut span = RatMat::zeros(ambient, 0);
    // Exact data: candidates accepted by exact rank growth. Float-derived
    // data: machine noise makes everything exactly independent, so require
    // genuine numerical rank growth through Gram-Schmidt residual norms.
    let numeric_floor = tol.map(|_| 1e-5);
    let mut unit_span: Vec<Vec<f64>> = Vec::new();
    let mut accepts = |span: &RatMat, v: &RatMat, jv: &RatMat| -> bool {
        match numeric_floor {
            None => {
                let cand = span.hcat(v).hcat(jv);
                cand.rank() == span.ncols() + 2
            }
            Some(floor) => {
                let to_f = |m: &RatMat, col: usize| -> Vec<f64> {
                    (0..m.nrows())
                        .map(|i| crate::exact::rat_to_f64(&m[(i, col)]))
                        .collect()
                };
                let gs = |w: &mut Vec<f64>, basis: &[Vec<f64>]| {
                    for b in basis {
                        let c: f64 = b.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
                        for (wi, bi) in w.iter_mut().zip(b.iter()) {
                            *wi -= c * bi;
                        }
                    }
                };
                let norm = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>().sqrt();
                let mut w1 = to_f(v, 0);
                let n1 = norm(&w1);
                if n1 <= floor {
                    return false;
                }
                gs(&mut w1, &unit_span);
                let r1 = norm(&w1);
                if r1 <= floor * n1.max(1.0) {
                    return false;
                }
                for x in w1.iter_mut() {
                    *x /= r1;
                }
                let mut w2 = to_f(jv, 0);
                let n2 = norm(&w2);
                gs(&mut w2, &unit_span);
                let c: f64 = w1.iter().zip(w2.iter()).map(|(x, y)| x * y).sum();
                for (wi, bi) in w2.iter_mut().zip(w1.iter()) {
                    *wi -= c * bi;
                }
                let r2 = norm(&w2);
                if r2 <= floor * n2.max(1.0) {
                    return false;
                }
                for x in w2.iter_mut() {
                    *x /= r2;
                }
                unit_span.push(w1);
                unit_span.push(w2);
                true
            }
        }
    };
    for c in 0..total {
        if chosen.len() == m {
            break;
        }
        let v = basis.submatrix(0, c, ambient, 1);
        let jv = j * &v;
        if accepts(&span, &v, &jv) {
            span = span.hcat(&v).hcat(&jv);
            chosen.push(v.column(0));
        }
    }
    if chosen.len() != m {
        return Err(Error::StructureViolation(
            "could not complete a J-adapted basis".into(),
        ));
    }
    let mut cols: Vec<Vec<Rat>> = chosen.clone();
    for v in chosen.iter().rev() {
        let vm = RatMat::from_columns(ambient, std::slice::from_ref(v));
        cols.push((j * &vm).column(0));
    }
    Ok(GradedLineElement::volume(RatMat::from_columns(ambient, &cols)))
}

/// Compare two volume forms of the same subspace: returns `c` with
/// `a = c * b`.
pub fn volume_ratio(a: &GradedLineElement, b: &GradedLineElement) -> Result<Rat> {
    let bd = dual_volume(b)?;
    eval_pairing(a, &bd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_frac};

    fn e(ambient: usize, i: usize) -> RatMat {
        RatMat::from_fn(ambient, 1, |r, _| if r == i { rat(1) } else { rat(0) })
    }

    #[test]
    fn concat_and_parity() {
        let a = GradedLineElement::volume(e(3, 0));
        let b = GradedLineElement::volume(e(3, 1));
        let ab = wedge_concat(&a, &b).unwrap();
        assert_eq!(ab.factors[0].len(), 2);
        assert_eq!(a.parity() * b.parity(), ab.parity());
        assert_eq!(ab.parity(), 1); // odd * odd = even

        // associativity of concatenation
        let c = GradedLineElement::volume(e(3, 2));
        let left = wedge_concat(&wedge_concat(&a, &b).unwrap(), &c).unwrap();
        let right = wedge_concat(&a, &wedge_concat(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);

        assert!(wedge_concat(&a, &a).is_err());
    }

    #[test]
    fn braid_signs() {
        let odd = GradedLineElement::volume(e(3, 0));
        let even = GradedLineElement::volume(e(3, 0).hcat(&e(3, 1)));
        let (b1, _) = braid(&odd, &odd.clone()).unwrap();
        assert_eq!(b1.coeff, rat(-1));
        let (b2, _) = braid(&even, &odd).unwrap();
        assert_eq!(b2.coeff, rat(1));
        // double swap is the identity
        let (x, y) = braid(&odd, &odd).unwrap();
        let (x2, y2) = braid(&y, &x).unwrap();
        assert_eq!(&x2.coeff * &y2.coeff, rat(-1) * rat(-1));
    }

    #[test]
    fn pairing_conventions() {
        // n = 1
        let v = GradedLineElement::volume(e(2, 0).scale(&rat(3)));
        let vd = dual_volume(&v).unwrap();
        assert_eq!(eval_pairing(&v, &vd).unwrap(), rat(1));

        // n = 2: <v1 ∧ v2, v2* ∧ v1*> = 1
        let basis = e(2, 0).hcat(&e(2, 1));
        let omega = GradedLineElement::volume(basis.clone());
        let omega_star = dual_volume(&omega).unwrap();
        assert_eq!(eval_pairing(&omega, &omega_star).unwrap(), rat(1));
        // naive order: <v1 ∧ v2, v1* ∧ v2*> = -1
        let naive = GradedLineElement::single(rat(1), WedgeFactor::dual(basis));
        assert_eq!(eval_pairing(&omega, &naive).unwrap(), rat(-1));
    }

    #[test]
    fn det_of_iso_basis_independence() {
        // id on R^1
        let id = RatMat::identity(1);
        let d = det_of_iso(&id, &RatMat::identity(1)).unwrap();
        let c = coeff_against_refs(&d, &RatMat::identity(1), &RatMat::identity(1)).unwrap();
        assert_eq!(c, rat(1));
        // -id on R^1: dual word of -v is -v^*
        let neg = RatMat::identity(1).scale(&rat(-1));
        let d = det_of_iso(&neg, &RatMat::identity(1)).unwrap();
        let c = coeff_against_refs(&d, &RatMat::identity(1), &RatMat::identity(1)).unwrap();
        assert_eq!(c, rat(-1));

        // rotation-like rational map on R^2: same element in two bases
        let f = RatMat::from_i64_rows(&[&[3, -4], &[4, 3]]).scale(&rat_frac(1, 5));
        let b1 = RatMat::identity(2);
        let mut b2 = RatMat::identity(2);
        // a different (non-orthogonal) basis
        b2[(0, 1)] = rat(1);
        let d1 = det_of_iso(&f, &b1).unwrap();
        let d2 = det_of_iso(&f, &b2).unwrap();
        let refp = RatMat::identity(2);
        let refd = RatMat::identity(2);
        let c1 = coeff_against_refs(&d1, &refp, &refd).unwrap();
        let c2 = coeff_against_refs(&d2, &refp, &refd).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn omega_of_j_on_the_plane() {
        // J = rotation by 90 degrees; omega(J) = e1 ∧ e2 regardless of seed
        let j = RatMat::from_i64_rows(&[&[0, -1], &[1, 0]]);
        let b_e1_first = RatMat::identity(2);
        let w1 = omega_of_j(&j, &b_e1_first).unwrap();
        let reference = GradedLineElement::volume(RatMat::identity(2));
        assert_eq!(volume_ratio(&w1, &reference).unwrap(), rat(1));

        // seed with e2: e2 ∧ J(e2) = e2 ∧ (-e1) = e1 ∧ e2
        let b_e2_first = e(2, 1).hcat(&e(2, 0));
        let w2 = omega_of_j(&j, &b_e2_first).unwrap();
        assert_eq!(volume_ratio(&w2, &reference).unwrap(), rat(1));

        // omega(-J) = -omega(J) in dimension rank 1 over C
        let wneg = omega_of_j(&j.scale(&rat(-1)), &b_e1_first).unwrap();
        assert_eq!(volume_ratio(&wneg, &reference).unwrap(), rat(-1));
    }
}
