//! Floating-point structured linear algebra: scalar fields, realified
//! structure maps, subspaces, and self-adjoint eigenmodels.
//!
//! All operators in the workbench are real matrices. Complex and
//! quaternionic linearity are expressed through explicit orthogonal
//! structure maps `I`, `J` with `I² = J² = -1`, `IJ = -JI`; a map is
//! K-linear iff it commutes with the structure maps of its domain and
//! codomain. Realification conventions: a complex scalar acts as the 2x2
//! block `[[a, -b], [b, a]]` and a quaternion by its 4x4 left-multiplication
//! block.

use crate::{Error, Result, ToleranceConfig};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub type Mat = DMatrix<f64>;
pub type Vec64 = DVector<f64>;

/// Base (skew) field of a structured space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarField {
    R,
    C,
    H,
}

impl ScalarField {
    /// Real dimension of the field.
    pub fn dim_r(self) -> usize {
        match self {
            ScalarField::R => 1,
            ScalarField::C => 2,
            ScalarField::H => 4,
        }
    }

    /// Natural base field for class `ell` mod 8.
    pub fn from_ell(ell: u8) -> ScalarField {
        match ell % 8 {
            0 | 1 | 7 => ScalarField::R,
            2 | 6 => ScalarField::C,
            3 | 4 | 5 => ScalarField::H,
            _ => unreachable!(),
        }
    }
}

/// Coefficient group attached to class `ell` mod 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffGroup {
    Z,
    Z2,
    Trivial,
}

impl CoeffGroup {
    pub fn from_ell(ell: u8) -> CoeffGroup {
        match ell % 8 {
            0 | 4 => CoeffGroup::Z,
            1 | 2 => CoeffGroup::Z2,
            _ => CoeffGroup::Trivial,
        }
    }
}

/// A Euclidean space `R^dim` together with realified scalar-structure maps.
#[derive(Debug, Clone, PartialEq)]
pub struct KStructure {
    pub dim: usize,
    pub field: ScalarField,
    /// Realified multiplication by `i`; present iff field is C or H.
    pub i_map: Option<Mat>,
    /// Realified multiplication by `j`; present iff field is H.
    pub j_map: Option<Mat>,
}

impl KStructure {
    pub fn real(dim: usize) -> Self {
        KStructure {
            dim,
            field: ScalarField::R,
            i_map: None,
            j_map: None,
        }
    }

    /// Standard complex structure on `R^{2m}`: interleaved `[[0,-1],[1,0]]` blocks.
    pub fn complex_std(m: usize) -> Self {
        let mut i_map = Mat::zeros(2 * m, 2 * m);
        for b in 0..m {
            i_map[(2 * b, 2 * b + 1)] = -1.0;
            i_map[(2 * b + 1, 2 * b)] = 1.0;
        }
        KStructure {
            dim: 2 * m,
            field: ScalarField::C,
            i_map: Some(i_map),
            j_map: None,
        }
    }

    /// Standard quaternionic structure on `R^{4m}`: left-multiplication blocks.
    pub fn quaternion_std(m: usize) -> Self {
        let mut i_map = Mat::zeros(4 * m, 4 * m);
        let mut j_map = Mat::zeros(4 * m, 4 * m);
        for b in 0..m {
            let o = 4 * b;
            // i: (a,b,c,d) -> (-b, a, -d, c)
            i_map[(o, o + 1)] = -1.0;
            i_map[(o + 1, o)] = 1.0;
            i_map[(o + 2, o + 3)] = -1.0;
            i_map[(o + 3, o + 2)] = 1.0;
            // j: (a,b,c,d) -> (-c, d, a, -b)
            j_map[(o, o + 2)] = -1.0;
            j_map[(o + 1, o + 3)] = 1.0;
            j_map[(o + 2, o)] = 1.0;
            j_map[(o + 3, o + 1)] = -1.0;
        }
        KStructure {
            dim: 4 * m,
            field: ScalarField::H,
            i_map: Some(i_map),
            j_map: Some(j_map),
        }
    }

    pub fn with_maps(field: ScalarField, dim: usize, i_map: Option<Mat>, j_map: Option<Mat>) -> Self {
        KStructure {
            dim,
            field,
            i_map,
            j_map,
        }
    }

    /// Conjugate space: same underlying reals, `i` replaced by `-i`.
    pub fn conjugate(&self) -> Self {
        KStructure {
            dim: self.dim,
            field: self.field,
            i_map: self.i_map.as_ref().map(|m| -m),
            j_map: self.j_map.clone(),
        }
    }

    /// Diamond space: same complex structure, `j` replaced by `-j`.
    pub fn diamond(&self) -> Self {
        KStructure {
            dim: self.dim,
            field: self.field,
            i_map: self.i_map.clone(),
            j_map: self.j_map.as_ref().map(|m| -m),
        }
    }

    /// Real dimension divided by the field dimension.
    pub fn dim_k(&self) -> usize {
        debug_assert_eq!(self.dim % self.field.dim_r(), 0);
        self.dim / self.field.dim_r()
    }

    /// Block sum of two structured spaces over the same field.
    pub fn direct_sum(&self, other: &KStructure) -> Result<KStructure> {
        if self.field != other.field {
            return Err(Error::GroupMismatch(format!(
                "direct sum of {:?} and {:?} spaces",
                self.field, other.field
            )));
        }
        let cat = |a: &Option<Mat>, b: &Option<Mat>| -> Option<Mat> {
            match (a, b) {
                (Some(a), Some(b)) => {
                    let mut m = Mat::zeros(self.dim + other.dim, self.dim + other.dim);
                    m.view_mut((0, 0), (self.dim, self.dim)).copy_from(a);
                    m.view_mut((self.dim, self.dim), (other.dim, other.dim)).copy_from(b);
                    Some(m)
                }
                (None, None) => None,
                _ => None,
            }
        };
        Ok(KStructure {
            dim: self.dim + other.dim,
            field: self.field,
            i_map: cat(&self.i_map, &other.i_map),
            j_map: cat(&self.j_map, &other.j_map),
        })
    }

    /// Verify orthogonality, squares, and anti-commutation of the structure maps.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let id = Mat::identity(self.dim, self.dim);
        let check_struct = |m: &Mat, name: &str| -> Result<()> {
            if (m * m.transpose() - &id).amax() > tol {
                return Err(Error::StructureViolation(format!("{name} not orthogonal")));
            }
            if (m * m + &id).amax() > tol {
                return Err(Error::StructureViolation(format!("{name}^2 != -1")));
            }
            Ok(())
        };
        match self.field {
            ScalarField::R => {
                if self.i_map.is_some() || self.j_map.is_some() {
                    return Err(Error::StructureViolation(
                        "real space carries structure maps".into(),
                    ));
                }
            }
            ScalarField::C => {
                let i = self
                    .i_map
                    .as_ref()
                    .ok_or_else(|| Error::StructureViolation("complex space without I".into()))?;
                check_struct(i, "I")?;
            }
            ScalarField::H => {
                let i = self
                    .i_map
                    .as_ref()
                    .ok_or_else(|| Error::StructureViolation("quaternionic space without I".into()))?;
                let j = self
                    .j_map
                    .as_ref()
                    .ok_or_else(|| Error::StructureViolation("quaternionic space without J".into()))?;
                check_struct(i, "I")?;
                check_struct(j, "J")?;
                if (i * j + j * i).amax() > tol {
                    return Err(Error::StructureViolation("IJ != -JI".into()));
                }
            }
        }
        Ok(())
    }

    /// Does `m : self -> codomain` commute with the structure maps?
    pub fn commutes(&self, codomain: &KStructure, m: &Mat, tol: f64) -> bool {
        let ok_i = match (&self.i_map, &codomain.i_map) {
            (Some(a), Some(b)) => (m * a - b * m).amax() <= tol,
            (None, None) => true,
            _ => false,
        };
        let ok_j = match (&self.j_map, &codomain.j_map) {
            (Some(a), Some(b)) => (m * a - b * m).amax() <= tol,
            (None, None) => true,
            _ => false,
        };
        ok_i && ok_j
    }
}

/// A real matrix between two structured spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredMatrix {
    pub entries: Mat,
    pub domain: KStructure,
    pub codomain: KStructure,
    /// When set, the map is conjugate-linear: it anti-commutes with `I`.
    pub anti_linear: bool,
}

impl StructuredMatrix {
    pub fn new(entries: Mat, domain: KStructure, codomain: KStructure) -> Self {
        assert_eq!(entries.ncols(), domain.dim);
        assert_eq!(entries.nrows(), codomain.dim);
        StructuredMatrix {
            entries,
            domain,
            codomain,
            anti_linear: false,
        }
    }

    pub fn endo(entries: Mat, space: KStructure) -> Self {
        StructuredMatrix::new(entries, space.clone(), space)
    }

    pub fn real_endo(entries: Mat) -> Self {
        let n = entries.nrows();
        StructuredMatrix::endo(entries, KStructure::real(n))
    }

    pub fn anti(mut self) -> Self {
        self.anti_linear = true;
        self
    }

    pub fn dim_in(&self) -> usize {
        self.entries.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.entries.nrows()
    }

    /// Check K-linearity (or conjugate-linearity when flagged).
    pub fn check_linearity(&self, tol: f64) -> Result<()> {
        let m = &self.entries;
        match (&self.domain.i_map, &self.codomain.i_map) {
            (Some(a), Some(b)) => {
                let r = if self.anti_linear { m * a + b * m } else { m * a - b * m };
                if r.amax() > tol {
                    return Err(Error::StructureViolation(format!(
                        "I-linearity residual {:.3e}",
                        r.amax()
                    )));
                }
            }
            (None, None) => {}
            _ => {
                return Err(Error::StructureViolation(
                    "domain and codomain structure maps disagree".into(),
                ))
            }
        }
        match (&self.domain.j_map, &self.codomain.j_map) {
            (Some(a), Some(b)) => {
                let r = m * a - b * m;
                if r.amax() > tol {
                    return Err(Error::StructureViolation(format!(
                        "J-linearity residual {:.3e}",
                        r.amax()
                    )));
                }
            }
            (None, None) => {}
            _ => {
                return Err(Error::StructureViolation(
                    "domain and codomain structure maps disagree".into(),
                ))
            }
        }
        Ok(())
    }
}

/// Subspace of `R^dim` given by orthonormal basis columns.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient_dim: usize,
    /// `ambient_dim x rank`, orthonormal columns.
    pub basis: Mat,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::identity(ambient_dim, ambient_dim),
        }
    }

    /// Orthonormalize spanning columns, dropping rank-deficient directions.
    pub fn from_spanning(ambient_dim: usize, cols: &Mat, rank_tol: f64) -> Self {
        assert_eq!(cols.nrows(), ambient_dim);
        if cols.ncols() == 0 {
            return Subspace::zero(ambient_dim);
        }
        let svd = cols.clone().svd(true, false);
        let u = svd.u.as_ref().expect("svd requested u");
        let smax = svd.singular_values.max();
        let thresh = rank_tol * smax.max(1.0);
        let rank = svd.singular_values.iter().filter(|&&s| s > thresh).count();
        Subspace {
            ambient_dim,
            basis: u.columns(0, rank).into_owned(),
        }
    }

    pub fn from_columns(cols: Mat) -> Self {
        // caller promises orthonormality
        Subspace {
            ambient_dim: cols.nrows(),
            basis: cols,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> Mat {
        &self.basis * self.basis.transpose()
    }

    pub fn contains(&self, v: &Vec64, tol: f64) -> bool {
        let r = v - self.projector() * v;
        r.amax() <= tol * v.amax().max(1.0)
    }

    /// Image under an invertible-on-span map, re-orthonormalized.
    pub fn map_through(&self, m: &Mat, rank_tol: f64) -> Subspace {
        Subspace::from_spanning(m.nrows(), &(m * &self.basis), rank_tol)
    }

    /// Direct sum embedding into a larger ambient space at row offset.
    pub fn embed(&self, ambient_dim: usize, offset: usize) -> Subspace {
        let mut b = Mat::zeros(ambient_dim, self.dim());
        b.view_mut((offset, 0), (self.ambient_dim, self.dim()))
            .copy_from(&self.basis);
        Subspace {
            ambient_dim,
            basis: b,
        }
    }

    /// Largest principal angle (radians) between equal-dimensional subspaces.
    pub fn max_principal_angle(&self, other: &Subspace) -> f64 {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        if self.dim() != other.dim() {
            return std::f64::consts::FRAC_PI_2;
        }
        if self.dim() == 0 {
            return 0.0;
        }
        let m = self.basis.transpose() * &other.basis;
        let svd = m.svd(false, false);
        let smin = svd.singular_values.min().clamp(-1.0, 1.0);
        smin.acos()
    }
}

/// Decide how many of the ascending defect singular values count as zero:
/// cut at the largest multiplicative gap inside the ambiguity window
/// around the tolerance, falling back to the plain threshold.
fn gap_aware_zero_count(ascending: &[f64], tol: f64) -> usize {
    let window_top = (tol * 1e4).min(1e-3);
    let floor = 1e-14;
    let mut k = ascending.iter().take_while(|&&s| s <= tol).count();
    let last_in_window = ascending.iter().take_while(|&&s| s <= window_top).count();
    if last_in_window > 0 {
        let mut best_ratio = 0.0;
        let mut best_cut = k;
        for i in 0..last_in_window {
            let lo = ascending[i].max(floor);
            let hi = if i + 1 < ascending.len() {
                ascending[i + 1].max(floor)
            } else {
                1.0
            };
            let ratio = hi / lo;
            if ratio > best_ratio {
                best_ratio = ratio;
                best_cut = i + 1;
            }
        }
        if best_ratio > 1e3 {
            k = best_cut;
        }
    }
    k
}

/// Intersection of two subspaces (common kernel of the orthogonal complements).
pub fn subspace_meet(s1: &Subspace, s2: &Subspace, cfg: &ToleranceConfig) -> Result<Subspace> {
    if s1.ambient_dim != s2.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "meet of subspaces of R^{} and R^{}",
            s1.ambient_dim, s2.ambient_dim
        )));
    }
    let d = s1.ambient_dim;
    let id = Mat::identity(d, d);
    let q1 = &id - s1.projector();
    let q2 = &id - s2.projector();
    let mut stacked = Mat::zeros(2 * d, d);
    stacked.view_mut((0, 0), (d, d)).copy_from(&q1);
    stacked.view_mut((d, 0), (d, d)).copy_from(&q2);
    let svd = stacked.svd(false, true);
    let vt = svd.v_t.as_ref().expect("svd requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap()
    });
    let ascending: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let zeros = gap_aware_zero_count(&ascending, cfg.rank_tol);
    let mut basis = Mat::zeros(d, zeros);
    for (j, &i) in order.iter().take(zeros).enumerate() {
        basis.set_column(j, &vt.row(i).transpose());
    }
    Ok(Subspace::from_spanning(d, &basis, cfg.rank_tol))
}

/// Orthogonal complement.
pub fn subspace_perp(s: &Subspace) -> Subspace {
    let d = s.ambient_dim;
    let q = Mat::identity(d, d) - s.projector();
    let svd = q.svd(true, false);
    let u = svd.u.as_ref().expect("svd u");
    let mut cols = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > 0.5 {
            cols.push(u.column(k).into_owned());
        }
    }
    let mut basis = Mat::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        basis.set_column(j, c);
    }
    Subspace::from_columns(basis)
}

/// Sum of two subspaces.
pub fn subspace_sum(s1: &Subspace, s2: &Subspace, cfg: &ToleranceConfig) -> Subspace {
    if s1.dim() + s2.dim() == 0 {
        return Subspace::zero(s1.ambient_dim);
    }
    let mut joined = Mat::zeros(s1.ambient_dim, s1.dim() + s2.dim());
    joined.view_mut((0, 0), (s1.ambient_dim, s1.dim())).copy_from(&s1.basis);
    joined
        .view_mut((0, s1.dim()), (s1.ambient_dim, s2.dim()))
        .copy_from(&s2.basis);
    Subspace::from_spanning(s1.ambient_dim, &joined, cfg.rank_tol)
}

/// One eigenvalue cluster of a self-adjoint model.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Representative eigenvalue (mean of the cluster).
    pub value: f64,
    /// Column range into the eigenvector matrix.
    pub start: usize,
    pub len: usize,
}

/// Full spectral data of a self-adjoint structured matrix.
#[derive(Debug, Clone)]
pub struct SelfAdjointModel {
    pub operator: StructuredMatrix,
    /// Ascending eigenvalues, repeated with real multiplicity.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns, aligned with `eigenvalues`.
    pub eigenvectors: Mat,
    pub clusters: Vec<EigenCluster>,
    pub multiplicity_field: ScalarField,
}

/// Deterministic orthonormal basis of the column span of `p`, seeded by the
/// standard basis: candidate vectors `p e_1, p e_2, ...` are accepted in
/// index order by Gram-Schmidt.
fn deterministic_span_basis(p: &Mat, rank: usize) -> Mat {
    let d = p.nrows();
    let mut accepted: Vec<Vec64> = Vec::with_capacity(rank);
    for i in 0..d {
        if accepted.len() == rank {
            break;
        }
        let mut v = p.column(i).into_owned();
        for a in &accepted {
            let c = a.dot(&v);
            v -= a * c;
        }
        let n = v.norm();
        if n > 1e-6 {
            accepted.push(v / n);
        }
    }
    // Numerical safety: a second Gram-Schmidt pass.
    for k in 0..accepted.len() {
        let mut v = accepted[k].clone();
        for a in accepted.iter().take(k) {
            let c = a.dot(&v);
            v -= a * c;
        }
        accepted[k] = v.normalize();
    }
    assert_eq!(accepted.len(), rank, "projector rank disagrees with cluster size");
    Mat::from_columns(&accepted)
}

/// Cyclic Jacobi eigensolver for a symmetric matrix: a sequence of plane
/// rotations annihilating off-diagonal entries. Slower than QR but
/// unconditionally accurate, also on degenerate spectra.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = Mat::identity(n, n);
    let scale = a.amax().max(1.0);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    (vals, v)
}

/// Eigendecomposition of a symmetric structured matrix with deterministic
/// cluster bases and residual verification.
pub fn eig_selfadjoint(m: &StructuredMatrix, cfg: &ToleranceConfig) -> Result<SelfAdjointModel> {
    let a = &m.entries;
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch("eig of non-square matrix".into()));
    }
    let scale = a.amax().max(1.0);
    let asym = (a - a.transpose()).amax();
    if asym > cfg.eig_tol * scale * 10.0 {
        return Err(Error::NotSymmetric {
            asym,
            tol: cfg.eig_tol * scale * 10.0,
        });
    }
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let (raw_vals, raw_vecs) = jacobi_eigen(&sym);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| raw_vals[i].partial_cmp(&raw_vals[j]).unwrap());
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| raw_vals[i]).collect();
    let mut eigenvectors = Mat::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        eigenvectors.set_column(k, &raw_vecs.column(i));
    }

    // Cluster eigenvalues within eig_tol (relative to scale), then rebuild a
    // deterministic basis for each cluster from the spectral projector.
    let cluster_tol = cfg.eig_tol.max(1e-14) * scale.max(1.0) * 10.0;
    let mut clusters = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigenvalues[end] - eigenvalues[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        let len = end - start;
        let value = eigenvalues[start..end].iter().sum::<f64>() / len as f64;
        let cols = eigenvectors.columns(start, len).into_owned();
        let p = &cols * cols.transpose();
        let det_basis = deterministic_span_basis(&p, len);
        eigenvectors.view_mut((0, start), (n, len)).copy_from(&det_basis);
        clusters.push(EigenCluster { value, start, len });
        start = end;
    }

    // Residual verification per eigenpair.
    for (k, &lam) in eigenvalues.iter().enumerate() {
        let v = eigenvectors.column(k);
        let r = (&sym * v - v * lam).amax();
        if r > 1e-8 * scale.max(1.0) {
            return Err(Error::Verification(format!(
                "eigenpair residual {r:.3e} exceeds bound (dim {n}, eigenvalue {lam:.6}, scale {scale:.3})"
            )));
        }
    }

    Ok(SelfAdjointModel {
        operator: m.clone(),
        eigenvalues,
        eigenvectors,
        clusters,
        multiplicity_field: m.domain.field,
    })
}

impl SelfAdjointModel {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Distance from `x` to the spectrum.
    pub fn spectral_gap_at(&self, x: f64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| (l - x).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Require `x` to be at distance >= gap_tol from the spectrum.
    pub fn check_admissible(&self, x: f64, cfg: &ToleranceConfig) -> Result<()> {
        if self.spectral_gap_at(x) < cfg.gap_tol {
            return Err(Error::InadmissibleCutoff {
                cutoff: x,
                gap_tol: cfg.gap_tol,
            });
        }
        Ok(())
    }

    /// Sum of eigenspaces with eigenvalue in the interval.
    ///
    /// Finite endpoints must keep distance `gap_tol` from the spectrum, so
    /// open/closed does not matter numerically; infinite endpoints are free.
    pub fn spectral_interval(&self, lo: f64, hi: f64, cfg: &ToleranceConfig) -> Result<Subspace> {
        for e in [lo, hi] {
            if e.is_finite() {
                self.check_admissible(e, cfg)?;
            }
        }
        let n = self.dim();
        let mut cols = Vec::new();
        for cl in &self.clusters {
            if cl.value > lo && cl.value < hi {
                for k in cl.start..cl.start + cl.len {
                    cols.push(self.eigenvectors.column(k).into_owned());
                }
            }
        }
        let mut basis = Mat::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            basis.set_column(j, c);
        }
        Ok(Subspace::from_columns(basis))
    }

    /// Number of eigenvalues (with multiplicity over K) in the interval.
    pub fn count_in_interval(&self, lo: f64, hi: f64) -> usize {
        let raw: usize = self
            .clusters
            .iter()
            .filter(|c| c.value > lo && c.value < hi)
            .map(|c| c.len)
            .sum();
        raw / self.multiplicity_field.dim_r()
    }

    /// Flow `e^{-tA}` computed from the eigendecomposition.
    pub fn flow_map(&self, t: f64) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for cl in &self.clusters {
            let f = (-t * cl.value).exp();
            let cols = self.eigenvectors.columns(cl.start, cl.len);
            out += f * (cols * cols.transpose());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn eig_diag_and_offdiag() {
        let m = StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let e = eig_selfadjoint(&m, &cfg()).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);

        let z = StructuredMatrix::real_endo(Mat::zeros(2, 2));
        let e = eig_selfadjoint(&z, &cfg()).unwrap();
        assert_eq!(e.clusters.len(), 1);
        assert_eq!(e.clusters[0].len, 2);

        // Oracle for [[0,1],[1,0]]: characteristic polynomial l^2 - 1.
        let m = StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let e = eig_selfadjoint(&m, &cfg()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-12);
        let s = 0.5_f64.sqrt();
        for (k, sign) in [(0usize, -1.0f64), (1, 1.0)] {
            let v = e.eigenvectors.column(k);
            // eigenvector (1, ±1)/sqrt(2) up to sign
            let expect = Vec64::from_vec(vec![s, sign * s]);
            let d1 = (&v - &expect).amax();
            let d2 = (&v + &expect).amax();
            assert!(d1.min(d2) < 1e-10, "column {k}");
        }
    }

    #[test]
    fn non_symmetric_rejected() {
        let m = StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert!(eig_selfadjoint(&m, &cfg()).is_err());
    }

    #[test]
    fn meet_perp_interval_flow() {
        let c = cfg();
        let e1 = Subspace::from_columns(Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0]));
        let e2 = Subspace::from_columns(Mat::from_column_slice(3, 1, &[0.0, 1.0, 0.0]));
        let m = subspace_meet(&e1, &e1, &c).unwrap();
        assert_eq!(m.dim(), 1);
        let m = subspace_meet(&e1, &e2, &c).unwrap();
        assert_eq!(m.dim(), 0);

        let s12 = Subspace::from_columns(Mat::from_column_slice(
            3,
            2,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        ));
        let s23 = Subspace::from_columns(Mat::from_column_slice(
            3,
            2,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ));
        // rank oracle: dims 2+2 - dim(sum 3) = 1
        let meet = subspace_meet(&s12, &s23, &c).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.contains(&Vec64::from_vec(vec![0.0, 1.0, 0.0]), 1e-9));

        let p = subspace_perp(&e1);
        assert_eq!(p.ambient_dim, 3);
        assert_eq!(p.dim(), 2);
        assert!(p.contains(&Vec64::from_vec(vec![0.0, 0.3, -2.0]), 1e-9));

        let a = StructuredMatrix::real_endo(Mat::from_row_slice(
            3,
            3,
            &[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0],
        ));
        let e = eig_selfadjoint(&a, &c).unwrap();
        let s = e.spectral_interval(f64::NEG_INFINITY, 0.0 - 0.5, &c).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&Vec64::from_vec(vec![1.0, 0.0, 0.0]), 1e-9));

        let a = StructuredMatrix::real_endo(Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let e = eig_selfadjoint(&a, &c).unwrap();
        let f = e.flow_map(2.0_f64.ln());
        assert!((f[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((f[(1, 1)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quaternion_structure_valid() {
        let k = KStructure::quaternion_std(2);
        k.validate(1e-14).unwrap();
        let c = KStructure::complex_std(3);
        c.validate(1e-14).unwrap();
    }
}
