//! Intertwiners between spinor representations in adjacent ranks.
//!
//! The isomorphism for each residue case is found by solving the linear
//! intertwiner equations (group averaging over the finite blade group,
//! then symmetrizing against the extra structure identities), never read
//! off the induction. The result is an integer matrix `q` with
//! `q^T q = c * id`; all identities it must satisfy are homogeneous in the
//! intertwiner, so no square root is ever taken.

use super::rep::{build_delta, DeltaReps, IrreducibleRep};
use crate::exact::IMat;
use crate::{Error, Result};

/// Intertwiner data for the passage from rank `n` to `n + 1`.
#[derive(Debug, Clone)]
pub struct AdjacentIso {
    pub n: u8,
    /// Primary intertwiner (for `n = 3, 7` mod 8 this is the block map
    /// `Psi` on the doubled space).
    pub q: IMat,
    /// `q^T q = c * id`.
    pub c: i64,
    /// For `n = 3, 7` mod 8: the derived maps onto the half-spinor
    /// summands, `phi^+` and `phi^-`, each with `phi^T phi = 2c/2 ... = c_pair * id`.
    pub pair: Option<(IMat, IMat)>,
    /// `pair_c` such that `(phi^±)^T phi^± = pair_c * id`.
    pub pair_c: Option<i64>,
}

fn vcat(a: &IMat, b: &IMat) -> IMat {
    assert_eq!(a.ncols(), b.ncols());
    IMat::from_fn(a.nrows() + b.nrows(), a.ncols(), |i, j| {
        if i < a.nrows() {
            a[(i, j)]
        } else {
            b[(i - a.nrows(), j)]
        }
    })
}

/// `[[0, -m], [m, 0]]`, the realified tensor with `i`.
fn tensor_i(m: &IMat) -> IMat {
    let d = m.nrows();
    let z = IMat::zeros(d, d);
    IMat::block2(&z, &(-m), m, &z)
}

/// Ascending blade products: `prods[mask] = G_{i1} G_{i2} ...` for the set
/// bits `i1 < i2 < ...` of `mask`.
fn blade_products_asc(gens: &[IMat], dim: usize) -> Vec<IMat> {
    let m = gens.len();
    let mut prods = Vec::with_capacity(1 << m);
    prods.push(IMat::identity(dim));
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        prods.push(&gens[low] * &prods[rest]);
    }
    prods
}

/// Descending blade products: `prods[mask] = ... G_{i2} G_{i1}`.
fn blade_products_desc(gens: &[IMat], dim: usize) -> Vec<IMat> {
    let m = gens.len();
    let mut prods = Vec::with_capacity(1 << m);
    prods.push(IMat::identity(dim));
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        prods.push(&prods[rest] * &gens[low]);
    }
    prods
}

/// Projection of `x` onto the space of intertwiners `L_k P = P R_k`.
fn project_intertwiner(asc_left: &[IMat], desc_right: &[IMat], x: &IMat) -> IMat {
    let mut acc = IMat::zeros(x.nrows(), x.ncols());
    for mask in 0..asc_left.len() {
        let term = &(&asc_left[mask] * x) * &desc_right[mask];
        if (mask as u32).count_ones() % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Solve `left[k] * phi = phi * right[k]` for all `k`, plus the extra
/// identities `l * phi = phi * r`. Both generator lists must satisfy the
/// Clifford relations. `units` are domain commutant candidates used to
/// escape a vanishing symmetrization.
fn solve_intertwiner(
    left: &[IMat],
    right: &[IMat],
    extras: &[(IMat, IMat)],
    units: &[IMat],
    dim_out: usize,
    dim_in: usize,
) -> Result<IMat> {
    assert_eq!(left.len(), right.len());
    let asc = blade_products_asc(left, dim_out);
    let desc = blade_products_desc(right, dim_in);

    let mut phi = IMat::zeros(dim_out, dim_in);
    'outer: for i in 0..dim_out {
        for j in 0..dim_in {
            let mut x = IMat::zeros(dim_out, dim_in);
            x[(i, j)] = 1;
            let p = project_intertwiner(&asc, &desc, &x);
            if !p.is_zero() {
                phi = p;
                break 'outer;
            }
        }
    }
    if phi.is_zero() {
        return Err(Error::Intertwiner(
            "averaging produced no nonzero intertwiner; representations inequivalent".into(),
        ));
    }

    for (l, r) in extras {
        // fixed points of theta: phi -> l^T phi r  (l orthogonal)
        let theta = |p: &IMat| -> IMat { &(&l.transpose() * p) * r };
        let mut fixed = None;
        let mut candidates: Vec<IMat> = vec![phi.clone()];
        for u in units {
            candidates.push(&phi * u);
        }
        for cand in candidates {
            let s = &cand + &theta(&cand);
            if !s.is_zero() {
                fixed = Some(s);
                break;
            }
        }
        phi = fixed.ok_or_else(|| {
            Error::Intertwiner("symmetrization against a structure identity vanished".into())
        })?;
    }

    phi = phi.primitive_normalized();

    // verify everything exactly
    for (k, (l, r)) in left.iter().zip(right.iter()).enumerate() {
        if &(l * &phi) != &(&phi * r) {
            return Err(Error::Intertwiner(format!(
                "solved map fails generator identity {}",
                k + 1
            )));
        }
    }
    for (l, r) in extras {
        if &(l * &phi) != &(&phi * r) {
            return Err(Error::Intertwiner(
                "solved map fails a structure identity".into(),
            ));
        }
    }
    Ok(phi)
}

/// `q^T q` must be a positive multiple of the identity; returns the scale.
fn orthogonality_scale(q: &IMat) -> Result<i64> {
    let g = &q.transpose() * q;
    let c = g[(0, 0)];
    if c <= 0 || g != IMat::identity(q.ncols()).scale(c) {
        return Err(Error::Intertwiner(
            "intertwiner is not orthogonal up to scale".into(),
        ));
    }
    Ok(c)
}

/// Check that the commutant of the solved system is no larger than Schur
/// allows: any second projection must factor through `q` times a matrix
/// commuting with the domain generators.
fn check_schur_line(q: &IMat, c: i64, right: &[IMat], sample: &IMat) -> Result<()> {
    // s = q^T * sample; must satisfy q * s = c * sample and commute with right gens
    let s = &q.transpose() * sample;
    if &(q * &s) != &sample.scale(c) {
        return Err(Error::Intertwiner(
            "second solution does not lie on the Schur line".into(),
        ));
    }
    for r in right {
        if &(&s * r) != &(r * &s) {
            return Err(Error::Intertwiner(
                "Schur factor does not commute with the domain action".into(),
            ));
        }
    }
    Ok(())
}

struct CaseData {
    left: Vec<IMat>,
    right: Vec<IMat>,
    extras: Vec<(IMat, IMat)>,
    units: Vec<IMat>,
    dim_out: usize,
    dim_in: usize,
}

fn case_data(n: u8, low: &IrreducibleRep, high: &IrreducibleRep) -> CaseData {
    let d = low.dim;
    let id = IMat::identity(d);
    let z = IMat::zeros(d, d);
    let offdiag = IMat::block2(&z, &id, &(-&id), &z);
    match n % 8 {
        0 => {
            let w = low.omega();
            let mut right: Vec<IMat> = low.gens().iter().map(|g| tensor_i(&(&w * g))).collect();
            right.push(tensor_i(&w));
            let conj = IMat::block_diag2(&id, &(-&id));
            let sigma_high = high.real_structure.clone().expect("rank 1 mod 8 carries sigma");
            let i_dom = tensor_i(&id);
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras: vec![(sigma_high, conj)],
                units: vec![IMat::identity(2 * d), i_dom],
                dim_out: high.dim,
                dim_in: 2 * d,
            }
        }
        1 => {
            let sigma = low.real_structure.clone().expect("sigma at 1 mod 8");
            let i = low.i_map.clone().expect("I at 1 mod 8");
            let mut right: Vec<IMat> = low
                .gens()
                .iter()
                .map(|g| IMat::block_diag2(g, &(-g)))
                .collect();
            right.push(offdiag.clone());
            let j_dom = IMat::block2(&z, &sigma, &(-&sigma), &z);
            let i_dom = IMat::block_diag2(&i, &i);
            let j_high = high.j_map.clone().expect("J at 2 mod 8");
            let ij = &i_dom * &j_dom;
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras: vec![(j_high, j_dom.clone())],
                units: vec![IMat::identity(2 * d), i_dom, j_dom, ij],
                dim_out: high.dim,
                dim_in: 2 * d,
            }
        }
        2 => {
            let mut right = low.gens().to_vec();
            right.push(-&low.omega());
            let i_dom = low.i_map.clone().expect("I at 2 mod 8");
            let j_dom = low.j_map.clone().expect("J at 2 mod 8");
            let i_high = high.i_map.clone().expect("I at 3 mod 8");
            let j_high = high.j_map.clone().expect("J at 3 mod 8");
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras: vec![(i_high, i_dom.clone()), (j_high, j_dom.clone())],
                units: vec![IMat::identity(d), i_dom, j_dom],
                dim_out: high.dim,
                dim_in: d,
            }
        }
        3 | 7 => {
            let mut right: Vec<IMat> = low
                .gens()
                .iter()
                .map(|g| IMat::block_diag2(g, &(-g)))
                .collect();
            right.push(offdiag.clone());
            let mut extras = Vec::new();
            let mut units = vec![IMat::identity(2 * d)];
            if n % 8 == 3 {
                let i = low.i_map.clone().expect("I at 3 mod 8");
                let j = low.j_map.clone().expect("J at 3 mod 8");
                let i_dom = IMat::block_diag2(&i, &i);
                let j_dom = IMat::block_diag2(&j, &j);
                extras.push((high.i_map.clone().expect("I at 4 mod 8"), i_dom.clone()));
                extras.push((high.j_map.clone().expect("J at 4 mod 8"), j_dom.clone()));
                units.push(i_dom);
                units.push(j_dom);
            }
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras,
                units,
                dim_out: high.dim,
                dim_in: 2 * d,
            }
        }
        4 => {
            let i = low.i_map.clone().expect("I at 4 mod 8");
            let mut right = low.gens().to_vec();
            right.push(&i * &low.omega());
            let i_high = high.i_map.clone().expect("I at 5 mod 8");
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras: vec![(i_high, i.clone())],
                units: vec![IMat::identity(d), i],
                dim_out: high.dim,
                dim_in: d,
            }
        }
        5 => {
            let j = low.spin_j.clone().expect("spin J at 5 mod 8");
            let mut right: Vec<IMat> = low.gens().iter().map(|g| -&(g * &j)).collect();
            right.push(j.clone());
            let i = low.i_map.clone().expect("I at 5 mod 8");
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras: vec![],
                units: vec![IMat::identity(d), i, j],
                dim_out: high.dim,
                dim_in: d,
            }
        }
        6 => {
            let spin_i = low.spin_i.clone().expect("spin I at 6 mod 8");
            let mut right = low.gens().to_vec();
            right.push(spin_i);
            CaseData {
                left: high.gens().to_vec(),
                right,
                extras: vec![],
                units: vec![IMat::identity(d)],
                dim_out: high.dim,
                dim_in: d,
            }
        }
        _ => unreachable!(),
    }
}

/// Construct and fully verify the adjacent-rank intertwiner at `n`.
pub fn adjacent_iso_phi(n: u8) -> Result<AdjacentIso> {
    if n < 1 || n + 1 > super::rep::MAX_N {
        return Err(Error::OutOfRange(format!(
            "adjacent intertwiner needs ranks {n} and {}",
            n + 1
        )));
    }
    let low_reps = build_delta(n)?;
    let high_reps = build_delta(n + 1)?;
    let low = low_reps.primary();
    let high = high_reps.primary();
    let data = case_data(n, low, high);
    let q = solve_intertwiner(
        &data.left,
        &data.right,
        &data.extras,
        &data.units,
        data.dim_out,
        data.dim_in,
    )?;
    let c = orthogonality_scale(&q)?;

    // Schur check on an independent projection
    {
        let asc = blade_products_asc(&data.left, data.dim_out);
        let desc = blade_products_desc(&data.right, data.dim_in);
        let mut x = IMat::zeros(data.dim_out, data.dim_in);
        x[(data.dim_out / 2, data.dim_in / 2)] = 1;
        let p = project_intertwiner(&asc, &desc, &x);
        if !p.is_zero() {
            check_schur_line(&q, c, &data.right, &p)?;
        }
    }

    let (pair, pair_c) = if n % 8 == 3 || n % 8 == 7 {
        let d = low.dim;
        let id = IMat::identity(d);
        let plus = &q * &vcat(&id, &id);
        let minus = &q * &vcat(&id, &(-&id));
        let pc = orthogonality_scale(&plus)?;
        let pc2 = orthogonality_scale(&minus)?;
        if pc != pc2 {
            return Err(Error::Intertwiner("pair scales disagree".into()));
        }
        (Some((plus, minus)), Some(pc))
    } else {
        (None, None)
    };

    let iso = AdjacentIso {
        n,
        q,
        c,
        pair,
        pair_c,
    };
    verify_case_identities(&iso, low, high)?;
    Ok(iso)
}

/// Check the full printed identity list of the residue case, exactly.
pub fn verify_case_identities(
    iso: &AdjacentIso,
    low: &IrreducibleRep,
    high: &IrreducibleRep,
) -> Result<()> {
    let n = iso.n;
    let q = &iso.q;
    let d = low.dim;
    let id = IMat::identity(d);
    let fail = |m: &str| Err(Error::Verification(format!("adjacent iso at n={n}: {m}")));
    let eq = |a: &IMat, b: &IMat, m: &str| -> Result<()> {
        if a != b {
            return fail(m);
        }
        Ok(())
    };
    match n % 8 {
        0 => {
            let w = low.omega();
            for k in 1..=n {
                let rhs = q * &tensor_i(&(&w * low.gen(k)));
                eq(&(high.gen(k) * q), &rhs, "generator identity")?;
            }
            let rhs = q * &tensor_i(&w);
            eq(&(high.gen(n + 1) * q), &rhs, "last generator identity")?;
            let sigma = high.real_structure.as_ref().expect("sigma upstairs");
            let conj = IMat::block_diag2(&id, &(-&id));
            eq(&(sigma * q), &(q * &conj), "real structure correspondence")?;
        }
        1 => {
            for k in 1..=n {
                let rhs = q * &IMat::block_diag2(low.gen(k), &(-low.gen(k)));
                eq(&(high.gen(k) * q), &rhs, "generator identity")?;
            }
            let z = IMat::zeros(d, d);
            let off = IMat::block2(&z, &id, &(-&id), &z);
            eq(&(high.gen(n + 1) * q), &(q * &off), "last generator identity")?;
            let sigma = low.real_structure.as_ref().expect("sigma downstairs");
            let jd = IMat::block2(&z, sigma, &(-sigma), &z);
            let jh = high.j_map.as_ref().expect("J upstairs");
            eq(&(jh * q), &(q * &jd), "quaternionic structure identity")?;
        }
        2 => {
            for k in 1..=n {
                eq(&(high.gen(k) * q), &(q * low.gen(k)), "generator identity")?;
            }
            let rhs = -&(q * &low.omega());
            eq(&(high.gen(n + 1) * q), &rhs, "volume identity")?;
        }
        3 | 7 => {
            let (qp, qm) = iso.pair.as_ref().expect("pair at 3,7 mod 8");
            for k in 1..=n {
                eq(&(high.gen(k) * qp), &(qm * low.gen(k)), "cross identity +")?;
                eq(&(high.gen(k) * qm), &(qp * low.gen(k)), "cross identity -")?;
            }
            eq(&(high.gen(n + 1) * qp), &qm.clone(), "e_{n+1} phi+ = +phi-")?;
            eq(&(high.gen(n + 1) * qm), &(-qp), "e_{n+1} phi- = -phi+")?;
            // images land in the claimed omega-eigenspaces
            let w = high.omega();
            eq(&(&w * qp), &qp.clone(), "plus image in +1 eigenspace")?;
            eq(&(&w * qm), &(-qm), "minus image in -1 eigenspace")?;
        }
        4 => {
            for k in 1..=n {
                eq(&(high.gen(k) * q), &(q * low.gen(k)), "generator identity")?;
            }
            let i_high = high.i_map.as_ref().expect("I upstairs");
            let rhs = &(i_high * q) * &low.omega();
            eq(&(high.gen(n + 1) * q), &rhs, "I omega identity")?;
        }
        5 => {
            let j = low.spin_j.as_ref().expect("spin J downstairs");
            for k in 1..=n {
                let lhs = &(high.gen(k) * high.gen(n + 1)) * q;
                eq(&lhs, &(q * low.gen(k)), "even-part identity")?;
            }
            let i = low.i_map.as_ref().expect("I downstairs");
            eq(&(&high.omega() * q), &(q * i), "volume vs I identity")?;
            eq(&(high.gen(n + 1) * q), &(q * j), "J identity")?;
        }
        6 => {
            for k in 1..=n {
                eq(&(high.gen(k) * q), &(q * low.gen(k)), "generator identity")?;
            }
            let i = low.spin_i.as_ref().expect("spin I downstairs");
            eq(&(high.gen(n + 1) * q), &(q * i), "I identity")?;
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Convenience: the pair of reps an [`AdjacentIso`] relates.
pub fn reps_for(n: u8) -> Result<(DeltaReps, DeltaReps)> {
    Ok((build_delta(n)?, build_delta(n + 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_adjacent_isos_solve_and_verify() {
        for n in 1..=8u8 {
            let iso = adjacent_iso_phi(n).unwrap();
            assert!(iso.c > 0, "n={n}");
        }
    }

    #[test]
    fn pair_case_has_sqrt_two_normalization() {
        let iso = adjacent_iso_phi(3).unwrap();
        let (qp, _) = iso.pair.as_ref().unwrap();
        let g = &qp.transpose() * qp;
        assert_eq!(g, IMat::identity(qp.ncols()).scale(iso.pair_c.unwrap()));
    }
}
