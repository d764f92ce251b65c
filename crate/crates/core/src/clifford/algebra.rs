//! The real Clifford algebra on `n` anticommuting generators with
//! `e_k^2 = -1`, in the subset basis with exact rational coefficients.

use crate::exact::{rat, Rat};
use crate::{Error, Result};
use num::traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Product of two basis blades: returns `(sign, blade)`.
///
/// Blades are bitmasks over generators `e_1..e_n` (bit `k-1` for `e_k`),
/// always kept with ascending index order.
pub fn blade_mul(s: u32, t: u32) -> (i64, u32) {
    let mut sign = 1i64;
    let mut acc = s;
    let mut rest = t;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        // move e_{i+1} left past the elements of acc with larger index
        let higher = (acc >> (i + 1)).count_ones();
        if higher % 2 == 1 {
            sign = -sign;
        }
        if acc & (1 << i) != 0 {
            // e_i e_i = -1
            sign = -sign;
            acc &= !(1 << i);
        } else {
            acc |= 1 << i;
        }
    }
    (sign, acc)
}

/// Element of the Clifford algebra `Cl_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    pub n: u8,
    /// Nonzero coefficients per basis blade.
    coeffs: BTreeMap<u32, Rat>,
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (blade, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *blade == 0 {
                write!(f, "{c}")?;
            } else {
                let idx: Vec<String> = (0..self.n)
                    .filter(|k| blade & (1 << k) != 0)
                    .map(|k| (k + 1).to_string())
                    .collect();
                write!(f, "{c}*e{}", idx.join(""))?;
            }
        }
        Ok(())
    }
}

impl CliffordElement {
    pub fn zero(n: u8) -> Self {
        CliffordElement {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n: u8) -> Self {
        CliffordElement::basis(n, 0)
    }

    /// The single blade `e_S` with coefficient one.
    pub fn basis(n: u8, blade: u32) -> Self {
        assert!(blade < (1u32 << n));
        let mut coeffs = BTreeMap::new();
        coeffs.insert(blade, Rat::one());
        CliffordElement { n, coeffs }
    }

    /// Generator `e_k`, `1 <= k <= n`.
    pub fn generator(n: u8, k: u8) -> Self {
        assert!(k >= 1 && k <= n);
        CliffordElement::basis(n, 1 << (k - 1))
    }

    pub fn from_terms(n: u8, terms: &[(u32, Rat)]) -> Self {
        let mut out = CliffordElement::zero(n);
        for (b, c) in terms {
            out.add_term(*b, c.clone());
        }
        out
    }

    pub fn coefficient(&self, blade: u32) -> Rat {
        self.coeffs.get(&blade).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &Rat)> {
        self.coeffs.iter()
    }

    fn add_term(&mut self, blade: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(blade).or_insert_with(Rat::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.coeffs.remove(&blade);
        }
    }

    pub fn add(&self, other: &CliffordElement) -> Result<CliffordElement> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch("Clifford sum across ranks".into()));
        }
        let mut out = self.clone();
        for (b, c) in &other.coeffs {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> CliffordElement {
        let coeffs = self.coeffs.iter().map(|(b, c)| (*b, -c.clone())).collect();
        CliffordElement { n: self.n, coeffs }
    }

    pub fn scale(&self, s: &Rat) -> CliffordElement {
        if s.is_zero() {
            return CliffordElement::zero(self.n);
        }
        let coeffs = self.coeffs.iter().map(|(b, c)| (*b, c * s)).collect();
        CliffordElement { n: self.n, coeffs }
    }

    /// Exact bilinear associative product with the Clifford relations.
    pub fn mul(&self, other: &CliffordElement) -> Result<CliffordElement> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(
                "Clifford product across ranks".into(),
            ));
        }
        let mut out = CliffordElement::zero(self.n);
        for (bs, cs) in &self.coeffs {
            for (bt, ct) in &other.coeffs {
                let (sign, blade) = blade_mul(*bs, *bt);
                out.add_term(blade, cs * ct * rat(sign));
            }
        }
        Ok(out)
    }

    /// Grade involution `alpha(e_k) = -e_k`.
    pub fn alpha(&self) -> CliffordElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(b, c)| {
                let k = b.count_ones();
                let c = if k % 2 == 1 { -c.clone() } else { c.clone() };
                (*b, c)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        CliffordElement { n: self.n, coeffs }
    }

    /// Volume element `omega_n = e_1 ... e_n`.
    pub fn volume(n: u8) -> CliffordElement {
        CliffordElement::basis(n, (1u32 << n) - 1)
    }

    /// Even part (blades of even length).
    pub fn even_part(&self) -> CliffordElement {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(b, _)| b.count_ones() % 2 == 0)
            .map(|(b, c)| (*b, c.clone()))
            .collect();
        CliffordElement { n: self.n, coeffs }
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|b| b.count_ones() % 2 == 0)
    }
}

/// The algebra isomorphism `Cl_{n-1} -> Cl_n^0`, `e_k -> e_k e_n`.
pub fn even_iso(x: &CliffordElement) -> Result<CliffordElement> {
    let n = x.n + 1;
    let en = CliffordElement::generator(n, n);
    let mut out = CliffordElement::zero(n);
    for (blade, c) in x.terms() {
        // image of e_S = product over ascending k in S of (e_k e_n)
        let mut img = CliffordElement::one(n);
        for k in 0..x.n {
            if blade & (1 << k) != 0 {
                let g = CliffordElement::generator(n, k + 1).mul(&en)?;
                img = img.mul(&g)?;
            }
        }
        out = out.add(&img.scale(c))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn generator_relations() {
        for n in 1..=6u8 {
            for k in 1..=n {
                for l in 1..=n {
                    let ek = CliffordElement::generator(n, k);
                    let el = CliffordElement::generator(n, l);
                    let anti = ek.mul(&el).unwrap().add(&el.mul(&ek).unwrap()).unwrap();
                    let expect = if k == l {
                        CliffordElement::one(n).scale(&rat(-2))
                    } else {
                        CliffordElement::zero(n)
                    };
                    assert_eq!(anti, expect, "n={n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn e1_e2_products() {
        let n = 2;
        let e1 = CliffordElement::generator(n, 1);
        let e2 = CliffordElement::generator(n, 2);
        assert_eq!(e1.mul(&e1).unwrap(), CliffordElement::one(n).scale(&rat(-1)));
        let e12 = CliffordElement::basis(n, 0b11);
        assert_eq!(e1.mul(&e2).unwrap(), e12);
        assert_eq!(e2.mul(&e1).unwrap(), e12.neg());
    }

    #[test]
    fn unit_law() {
        let x = CliffordElement::from_terms(3, &[(0b101, rat(3)), (0b010, rat_frac())]);
        let one = CliffordElement::one(3);
        assert_eq!(one.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&one).unwrap(), x);

        fn rat_frac() -> Rat {
            crate::exact::rat_frac(-1, 2)
        }
    }

    #[test]
    fn volume_identities() {
        // omega^2 = (-1)^{n(n+1)/2} and omega e_k = (-1)^{n+1} e_k omega
        for n in 1..=9u8 {
            let w = CliffordElement::volume(n);
            let sq = w.mul(&w).unwrap();
            let sign = if (n as u32 * (n as u32 + 1) / 2) % 2 == 0 {
                1
            } else {
                -1
            };
            assert_eq!(sq, CliffordElement::one(n).scale(&rat(sign)), "n={n}");
            for k in 1..=n {
                let ek = CliffordElement::generator(n, k);
                let lhs = w.mul(&ek).unwrap();
                let rhs = ek.mul(&w).unwrap();
                let rhs = if n % 2 == 0 { rhs.neg() } else { rhs };
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn alpha_is_algebra_involution() {
        let n = 4;
        let x = CliffordElement::from_terms(n, &[(0b0011, rat(2)), (0b1000, rat(1))]);
        let y = CliffordElement::from_terms(n, &[(0b0101, rat(-1)), (0, rat(3))]);
        let lhs = x.mul(&y).unwrap().alpha();
        let rhs = x.alpha().mul(&y.alpha()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(x.alpha().alpha(), x);
    }

    #[test]
    fn even_iso_is_algebra_map_onto_even_part() {
        for n_prev in 1..=5u8 {
            for k in 1..=n_prev {
                for l in 1..=n_prev {
                    let ek = CliffordElement::generator(n_prev, k);
                    let el = CliffordElement::generator(n_prev, l);
                    let lhs = even_iso(&ek.mul(&el).unwrap()).unwrap();
                    let rhs = even_iso(&ek).unwrap().mul(&even_iso(&el).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                    assert!(lhs.is_even());
                }
            }
        }
    }
}
