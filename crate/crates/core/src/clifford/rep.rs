//! Irreducible representations of `Cl_n` built inductively, with exact
//! integer matrices throughout.
//!
//! The induction carries, besides the generator images, whatever commutant
//! or spinor-level structure the next step consumes: a complex structure
//! `I`, a quaternionic partner `J`, a real structure `sigma` (for `n = 1`
//! mod 8), the even-part quaternionic partner (for `n = 5` mod 8), and the
//! even-part complex structure (for `n = 6` mod 8). Every generator image
//! is a skew-adjoint orthogonal signed permutation matrix.

use crate::exact::{IMat, RatMat};
use crate::linalg::ScalarField;
use crate::{Error, Result};

/// Highest rank constructed by default.
pub const MAX_N: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// The unique irreducible representation (`n` not 3, 7 mod 8).
    Unique,
    /// Volume element acts as `+1`.
    Plus,
    /// Volume element acts as `-1`.
    Minus,
}

/// An exact irreducible representation of `Cl_n`.
#[derive(Debug, Clone)]
pub struct IrreducibleRep {
    pub n: u8,
    pub flavor: Flavor,
    pub dim: usize,
    /// Images of the generators `e_1..e_n`.
    gens: Vec<IMat>,
    /// Commutant type (Table pattern: R, C, or H).
    pub field: ScalarField,
    /// Commutant complex structure, when the field is C or H.
    pub i_map: Option<IMat>,
    /// Commutant quaternionic partner, when the field is H.
    pub j_map: Option<IMat>,
    /// Real structure `sigma` for `n = 1` mod 8 (anti-commutes with the
    /// generators, squares to `+1`).
    pub real_structure: Option<IMat>,
    /// Spinor-level quaternionic partner for `n = 5` mod 8 (anti-commutes
    /// with every generator).
    pub spin_j: Option<IMat>,
    /// Spinor-level complex structure for `n = 6` mod 8; equals
    /// `-rho(omega_n)`.
    pub spin_i: Option<IMat>,
}

impl IrreducibleRep {
    /// Image of generator `e_k`, 1-based.
    pub fn gen(&self, k: u8) -> &IMat {
        &self.gens[(k - 1) as usize]
    }

    pub fn gens(&self) -> &[IMat] {
        &self.gens
    }

    /// Image of the basis blade with the given bitmask, ascending order.
    pub fn act_blade(&self, blade: u32) -> IMat {
        let mut acc = IMat::identity(self.dim);
        for k in 0..self.n {
            if blade & (1u32 << k) != 0 {
                acc = &acc * &self.gens[k as usize];
            }
        }
        acc
    }

    /// Image of the volume element `omega_n`.
    pub fn omega(&self) -> IMat {
        self.act_blade((1u32 << self.n) - 1)
    }

    /// Grade-twisted representation `alpha^*`: generators negated.
    pub fn alpha_twist(&self) -> IrreducibleRep {
        let mut out = self.clone();
        out.gens = self.gens.iter().map(|g| -g).collect();
        out.flavor = match self.flavor {
            Flavor::Plus => Flavor::Minus,
            Flavor::Minus => Flavor::Plus,
            Flavor::Unique => Flavor::Unique,
        };
        out
    }

    /// Exhaustive exact invariant check: Clifford relations, orthogonality
    /// and skew-adjointness of generators, commutant axioms, flavor
    /// normalization, and the volume identities.
    pub fn verify(&self) -> Result<()> {
        let id = IMat::identity(self.dim);
        let fail = |msg: String| Err(Error::Verification(format!("Delta_{}: {msg}", self.n)));
        for (k, g) in self.gens.iter().enumerate() {
            if &(g * &g.transpose()) != &id {
                return fail(format!("generator {} not orthogonal", k + 1));
            }
            if g.transpose() != -g {
                return fail(format!("generator {} not skew-adjoint", k + 1));
            }
        }
        for k in 0..self.gens.len() {
            for l in 0..self.gens.len() {
                let a = &(&self.gens[k] * &self.gens[l]) + &(&self.gens[l] * &self.gens[k]);
                let expect = if k == l { id.scale(-2) } else { IMat::zeros(self.dim, self.dim) };
                if a != expect {
                    return fail(format!("Clifford relation e{} e{}", k + 1, l + 1));
                }
            }
        }
        // volume identities (mirror of the algebra-level ones)
        let w = self.omega();
        let n = self.n as u32;
        let wsq = &w * &w;
        let s = if (n * (n + 1) / 2) % 2 == 0 { 1 } else { -1 };
        if wsq != id.scale(s) {
            return fail("omega^2 sign".into());
        }
        for g in &self.gens {
            let lhs = &w * g;
            let rhs = (g * &w).scale(if n % 2 == 0 { -1 } else { 1 });
            if lhs != rhs {
                return fail("omega commutation".into());
            }
        }
        match self.flavor {
            Flavor::Plus => {
                if w != id {
                    return fail("plus flavor must have omega = +1".into());
                }
            }
            Flavor::Minus => {
                if w != id.scale(-1) {
                    return fail("minus flavor must have omega = -1".into());
                }
            }
            Flavor::Unique => {}
        }
        let check_cx = |m: &IMat, name: &str| -> Result<()> {
            if &(m * &m.transpose()) != &id || &(m * m) != &id.scale(-1) {
                return Err(Error::Verification(format!(
                    "Delta_{}: {name} is not an orthogonal complex structure",
                    self.n
                )));
            }
            Ok(())
        };
        if let Some(i) = &self.i_map {
            check_cx(i, "I")?;
            for g in &self.gens {
                if &(g * i) != &(i * g) {
                    return fail("I must commute with the generators".into());
                }
            }
        }
        if let Some(j) = &self.j_map {
            check_cx(j, "J")?;
            let i = self.i_map.as_ref().expect("H rep carries I");
            if &(i * j) != &(&(j * i)).scale(-1).clone() {
                return fail("IJ != -JI".into());
            }
            for g in &self.gens {
                if &(g * j) != &(j * g) {
                    return fail("J must commute with the generators".into());
                }
            }
        }
        if let Some(s) = &self.real_structure {
            if &(s * s) != &id || &(s * &s.transpose()) != &id {
                return fail("sigma^2 != 1".into());
            }
            for g in &self.gens {
                if &(s * g) != &(&(g * s)).scale(-1).clone() {
                    return fail("sigma must anti-commute with the generators".into());
                }
            }
        }
        if let Some(j) = &self.spin_j {
            check_cx(j, "spin J")?;
            for g in &self.gens {
                if &(g * j) != &(&(j * g)).scale(-1).clone() {
                    return fail("spin J must anti-commute with the generators".into());
                }
            }
        }
        if let Some(i) = &self.spin_i {
            check_cx(i, "spin I")?;
            if i != &(-&self.omega()) {
                return fail("spin I must equal -omega".into());
            }
        }
        // field matches the Table pattern
        let expected_field = match self.n % 8 {
            1 | 5 => ScalarField::C,
            2 | 3 | 4 => ScalarField::H,
            _ => ScalarField::R,
        };
        if self.field != expected_field {
            return fail("field tag disagrees with the rank".into());
        }
        Ok(())
    }
}

/// Result of [`build_delta`]: one representation or the inequivalent pair.
#[derive(Debug, Clone)]
pub enum DeltaReps {
    Single(IrreducibleRep),
    Pair {
        plus: IrreducibleRep,
        minus: IrreducibleRep,
    },
}

impl DeltaReps {
    /// The representation the recursion continues with (`plus` when a pair).
    pub fn primary(&self) -> &IrreducibleRep {
        match self {
            DeltaReps::Single(r) => r,
            DeltaReps::Pair { plus, .. } => plus,
        }
    }

    pub fn dim(&self) -> usize {
        self.primary().dim
    }
}

fn seed() -> IrreducibleRep {
    let rot = IMat::from_rows(&[&[0, -1], &[1, 0]]);
    IrreducibleRep {
        n: 1,
        flavor: Flavor::Unique,
        dim: 2,
        gens: vec![rot.clone()],
        field: ScalarField::C,
        i_map: Some(rot),
        j_map: None,
        real_structure: Some(IMat::from_rows(&[&[1, 0], &[0, -1]])),
        spin_j: None,
        spin_i: None,
    }
}

/// Standard off-diagonal block `[[0, id], [-id, 0]]`.
fn offdiag_block(d: usize) -> IMat {
    let id = IMat::identity(d);
    let z = IMat::zeros(d, d);
    IMat::block2(&z, &id, &(-&id), &z)
}

/// Tensoring with `i`: `[[0, -M], [M, 0]]` in Re/Im block coordinates.
fn tensor_i(m: &IMat) -> IMat {
    let d = m.nrows();
    let z = IMat::zeros(d, d);
    IMat::block2(&z, &(-m), m, &z)
}

/// One induction step: from the primary representation at rank `n` to the
/// primary representation at rank `n + 1`.
fn step(prev: &IrreducibleRep) -> IrreducibleRep {
    let n = prev.n;
    let d = prev.dim;
    match n % 8 {
        // complexification: E_k = rho(omega e_k) (x) i, E_{n+1} = rho(omega) (x) i
        0 => {
            let w = prev.omega();
            let mut gens: Vec<IMat> = prev.gens.iter().map(|g| tensor_i(&(&w * g))).collect();
            gens.push(tensor_i(&w));
            let id = IMat::identity(d);
            IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Unique,
                dim: 2 * d,
                gens,
                field: ScalarField::C,
                i_map: Some(tensor_i(&id)),
                j_map: None,
                real_structure: Some(IMat::block_diag2(&id, &(-&id))),
                spin_j: None,
                spin_i: None,
            }
        }
        // double: E_k = diag(g, -g), E_{n+1} = offdiag, J from the real structure
        1 => {
            let sigma = prev.real_structure.clone().expect("rank 1 mod 8 carries sigma");
            let i = prev.i_map.clone().expect("rank 1 mod 8 is complex");
            let mut gens: Vec<IMat> = prev
                .gens
                .iter()
                .map(|g| IMat::block_diag2(g, &(-g)))
                .collect();
            gens.push(offdiag_block(d));
            let z = IMat::zeros(d, d);
            IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Unique,
                dim: 2 * d,
                gens,
                field: ScalarField::H,
                i_map: Some(IMat::block_diag2(&i, &i)),
                j_map: Some(IMat::block2(&z, &sigma, &(-&sigma), &z)),
                real_structure: None,
                spin_j: None,
                spin_i: None,
            }
        }
        // extend by E_{n+1} = -rho(omega); lands in the plus flavor
        2 => {
            let mut gens = prev.gens.clone();
            gens.push(-&prev.omega());
            IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Plus,
                dim: d,
                gens,
                field: ScalarField::H,
                i_map: prev.i_map.clone(),
                j_map: prev.j_map.clone(),
                real_structure: None,
                spin_j: None,
                spin_i: None,
            }
        }
        // double the plus flavor
        3 | 7 => {
            let mut gens: Vec<IMat> = prev
                .gens
                .iter()
                .map(|g| IMat::block_diag2(g, &(-g)))
                .collect();
            gens.push(offdiag_block(d));
            let (field, i_map, j_map) = if n % 8 == 3 {
                let i = prev.i_map.as_ref().expect("rank 3 mod 8 is quaternionic");
                let j = prev.j_map.as_ref().expect("rank 3 mod 8 is quaternionic");
                (
                    ScalarField::H,
                    Some(IMat::block_diag2(i, i)),
                    Some(IMat::block_diag2(j, j)),
                )
            } else {
                (ScalarField::R, None, None)
            };
            IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Unique,
                dim: 2 * d,
                gens,
                field,
                i_map,
                j_map,
                real_structure: None,
                spin_j: None,
                spin_i: None,
            }
        }
        // extend by E_{n+1} = I rho(omega); J is demoted to spinor level
        4 => {
            let i = prev.i_map.clone().expect("rank 4 mod 8 is quaternionic");
            let j = prev.j_map.clone().expect("rank 4 mod 8 is quaternionic");
            let last = &i * &prev.omega();
            let mut gens = prev.gens.clone();
            gens.push(last.clone());
            // Spinor-level quaternionic partner: anti-commutes with all
            // generators of the extended representation.
            let spin_j = &j * &last;
            IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Unique,
                dim: d,
                gens,
                field: ScalarField::C,
                i_map: Some(i),
                j_map: None,
                real_structure: None,
                spin_j: Some(spin_j),
                spin_i: None,
            }
        }
        // realify through the spinor-level J: E_k = -rho(e_k) J, E_{n+1} = J
        5 => {
            let j = prev.spin_j.clone().expect("rank 5 mod 8 carries spin J");
            let mut gens: Vec<IMat> = prev.gens.iter().map(|g| -&(g * &j)).collect();
            gens.push(j);
            let mut rep = IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Unique,
                dim: d,
                gens,
                field: ScalarField::R,
                i_map: None,
                j_map: None,
                real_structure: None,
                spin_j: None,
                spin_i: None,
            };
            rep.spin_i = Some(-&rep.omega());
            rep
        }
        // extend by E_{n+1} = -rho(omega) = spin I; lands in the plus flavor
        6 => {
            let spin_i = prev.spin_i.clone().expect("rank 6 mod 8 carries spin I");
            let mut gens = prev.gens.clone();
            gens.push(spin_i);
            IrreducibleRep {
                n: n + 1,
                flavor: Flavor::Plus,
                dim: d,
                gens,
                field: ScalarField::R,
                i_map: None,
                j_map: None,
                real_structure: None,
                spin_j: None,
                spin_i: None,
            }
        }
        _ => unreachable!(),
    }
}

/// Build the irreducible representation(s) of `Cl_n` by the induction,
/// verifying every level on the way up.
pub fn build_delta(n: u8) -> Result<DeltaReps> {
    if n < 1 || n > MAX_N {
        return Err(Error::OutOfRange(format!(
            "representation rank {n} outside 1..={MAX_N}"
        )));
    }
    let mut rep = seed();
    rep.verify()?;
    while rep.n < n {
        rep = step(&rep);
        rep.verify()?;
    }
    if rep.n % 8 == 3 || rep.n % 8 == 7 {
        let minus = rep.alpha_twist();
        minus.verify()?;
        Ok(DeltaReps::Pair { plus: rep, minus })
    } else {
        Ok(DeltaReps::Single(rep))
    }
}

/// Expected real dimension of `Delta_n` (the Table values, continued by the
/// same doubling pattern at `n = 9`).
pub fn expected_dim(n: u8) -> usize {
    match n {
        1 => 2,
        2 => 4,
        3 => 4,
        4 => 8,
        5 => 8,
        6 => 8,
        7 => 8,
        8 => 16,
        9 => 32,
        _ => panic!("rank out of range"),
    }
}

/// Exact column basis of `Ker(m)` over the rationals.
fn int_kernel_basis(m: &IMat) -> RatMat {
    m.to_rat().nullspace()
}

/// Half-spinor splitting for `n = 0, 1, 2, 4` mod 8.
///
/// Returns exact (unnormalized, full-rank) column bases of the two halves.
/// * `n = 0, 4`: the `±1`-eigenspaces of `rho(omega_n)`;
/// * `n = 1`: the `±1`-eigenspaces of the real structure `sigma`;
/// * `n = 2`: the `±i`-eigenspaces of `rho(omega_n)`, i.e. kernels of
///   `rho(omega) ∓ I`.
pub fn half_spinor_split(rep: &IrreducibleRep) -> Result<(RatMat, RatMat)> {
    let id = IMat::identity(rep.dim);
    let (p, m) = match rep.n % 8 {
        0 | 4 => {
            let w = rep.omega();
            (&w - &id, &w + &id)
        }
        1 => {
            let s = rep
                .real_structure
                .as_ref()
                .ok_or_else(|| Error::StructureViolation("missing real structure".into()))?;
            (s - &id, s + &id)
        }
        2 => {
            let w = rep.omega();
            let i = rep
                .i_map
                .as_ref()
                .ok_or_else(|| Error::StructureViolation("missing complex structure".into()))?;
            (&w - i, &w + i)
        }
        r => {
            return Err(Error::OutOfRange(format!(
                "no half-spinor splitting at rank {} (residue {r})",
                rep.n
            )))
        }
    };
    let plus = int_kernel_basis(&p);
    let minus = int_kernel_basis(&m);
    if plus.ncols() + minus.ncols() != rep.dim {
        return Err(Error::Verification(
            "half-spinor halves do not span the representation".into(),
        ));
    }
    Ok((plus, minus))
}

/// Does the column span of `space` contain every column of `vecs`? Exact.
pub fn span_contains(space: &RatMat, vecs: &RatMat) -> bool {
    let base_rank = space.rank();
    let joined = space.hcat(vecs);
    joined.rank() == base_rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_dims_match_table() {
        for n in 1..=MAX_N {
            let reps = build_delta(n).unwrap();
            assert_eq!(reps.dim(), expected_dim(n), "n={n}");
        }
    }

    #[test]
    fn seed_is_rotation_by_90_degrees() {
        let reps = build_delta(1).unwrap();
        let r = reps.primary();
        assert_eq!(r.gen(1), &IMat::from_rows(&[&[0, -1], &[1, 0]]));
    }

    #[test]
    fn rank_two_matches_quaternion_model() {
        // dim 4, quaternionic commutant, and the algebra generated by
        // rho(e1), rho(e2) together with I, J acts irreducibly.
        let reps = build_delta(2).unwrap();
        let r = reps.primary();
        assert_eq!(r.dim, 4);
        assert_eq!(r.field, ScalarField::H);
        r.verify().unwrap();
        // rho(e1) rho(e2) = rho(omega_2) has square -1 (omega_2^2 = -1)
        let w = r.omega();
        assert_eq!(&w * &w, IMat::identity(4).scale(-1));
    }

    #[test]
    fn flavors_at_three_and_seven() {
        for n in [3u8, 7] {
            match build_delta(n).unwrap() {
                DeltaReps::Pair { plus, minus } => {
                    assert_eq!(plus.omega(), IMat::identity(plus.dim));
                    assert_eq!(minus.omega(), IMat::identity(minus.dim).scale(-1));
                }
                _ => panic!("expected a pair at n={n}"),
            }
        }
    }

    #[test]
    fn half_spinor_splittings() {
        for n in [1u8, 2, 4, 8, 9] {
            let reps = build_delta(n).unwrap();
            let rep = reps.primary();
            let (plus, minus) = half_spinor_split(rep).unwrap();
            assert_eq!(plus.ncols(), rep.dim / 2, "n={n}");
            assert_eq!(minus.ncols(), rep.dim / 2, "n={n}");
            // Clifford multiplication exchanges the halves.
            for k in 1..=n {
                let g = rep.gen(k).to_rat();
                assert!(span_contains(&minus, &(&g * &plus)), "n={n} k={k} +->-");
                assert!(span_contains(&plus, &(&g * &minus)), "n={n} k={k} -->+");
            }
        }
        // trace oracle: omega_4 is traceless, so the halves are equal
        let reps = build_delta(4).unwrap();
        let w = reps.primary().omega();
        let trace: i64 = (0..w.nrows()).map(|i| w[(i, i)]).sum();
        assert_eq!(trace, 0);
    }
}
