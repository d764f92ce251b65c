//! Determinant, Pfaffian, and spectral torsor points with explicit cutoff
//! charts, their structure isomorphisms, and transport along operator
//! paths.
//!
//! Torsor points are always stored together with a chart cutoff `delta`;
//! equality is decided after moving both points into a common admissible
//! chart. Wedge data is exact (rationalized losslessly from floats), so
//! every sign decision is an exact computation on slightly perturbed input.

pub mod det;
pub mod path;
pub mod pf;
pub mod sp;

pub use det::{DetElement, DualDetElement};
pub use path::OperatorPath;
pub use pf::{DualPfElement, PfElement, SkewModel};
pub use sp::SpElement;

use crate::exact::RatMat;
use crate::linalg::{eig_selfadjoint, Mat, SelfAdjointModel, StructuredMatrix};
use crate::{Error, Result, ToleranceConfig};

/// Spectral data of a real Fredholm model `D`: eigendecompositions of
/// `D^T D` and `D D^T`, singular values, and deterministic chart frames.
#[derive(Debug, Clone)]
pub struct FredholmModel {
    pub d: Mat,
    plus: SelfAdjointModel,
    minus: SelfAdjointModel,
    /// Ascending distinct singular values with real multiplicities.
    svals: Vec<(f64, usize)>,
    pub cfg: ToleranceConfig,
}

impl FredholmModel {
    pub fn new(d: Mat, cfg: &ToleranceConfig) -> Result<Self> {
        let dtd = d.transpose() * &d;
        let ddt = &d * d.transpose();
        let plus = eig_selfadjoint(&StructuredMatrix::real_endo(dtd), cfg)?;
        let minus = eig_selfadjoint(&StructuredMatrix::real_endo(ddt), cfg)?;
        let mut svals: Vec<(f64, usize)> = plus
            .clusters
            .iter()
            .map(|c| (c.value.max(0.0).sqrt(), c.len))
            .collect();
        // DD^T may contribute extra kernel when the shapes differ
        let ker_minus = minus
            .clusters
            .iter()
            .filter(|c| c.value.abs().sqrt() < cfg.gap_tol)
            .map(|c| c.len)
            .sum::<usize>();
        if ker_minus > 0 && !svals.iter().any(|(s, _)| *s < cfg.gap_tol) {
            svals.insert(0, (0.0, 0));
        }
        Ok(FredholmModel {
            d,
            plus,
            minus,
            svals,
            cfg: *cfg,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.d.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.d.nrows()
    }

    /// Distance of `delta` (in singular-value scale) from the singular
    /// spectrum.
    pub fn gap_at(&self, delta: f64) -> f64 {
        self.svals
            .iter()
            .map(|(s, _)| (s - delta).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// A cutoff is admissible when `delta^2` keeps `gap_tol` distance from
    /// the spectra of `D^T D` and `D D^T`.
    pub fn check_admissible(&self, delta: f64) -> Result<()> {
        if delta < 0.0 {
            return Err(Error::InadmissibleCutoff {
                cutoff: delta,
                gap_tol: self.cfg.gap_tol,
            });
        }
        let d2 = delta * delta;
        for model in [&self.plus, &self.minus] {
            if model.spectral_gap_at(d2) < self.cfg.gap_tol {
                return Err(Error::InadmissibleCutoff {
                    cutoff: delta,
                    gap_tol: self.cfg.gap_tol,
                });
            }
        }
        Ok(())
    }

    /// Smallest admissible cutoff isolating exactly the kernel.
    pub fn kernel_cutoff(&self) -> f64 {
        let smallest_nonzero = self
            .svals
            .iter()
            .map(|(s, _)| *s)
            .find(|s| *s > self.cfg.gap_tol)
            .unwrap_or(1.0);
        smallest_nonzero / 2.0
    }

    /// A cutoff above the whole singular spectrum.
    pub fn top_cutoff(&self) -> f64 {
        self.svals.last().map(|(s, _)| s + 1.0).unwrap_or(1.0)
    }

    fn basis_in(model: &SelfAdjointModel, lo: f64, hi: f64) -> Mat {
        let n = model.dim();
        let mut cols = Vec::new();
        for c in &model.clusters {
            if c.value > lo && c.value < hi {
                for k in c.start..c.start + c.len {
                    cols.push(model.eigenvectors.column(k).into_owned());
                }
            }
        }
        let mut out = Mat::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            out.set_column(j, c);
        }
        out
    }

    /// Deterministic frame of `V^+` over the singular interval `(lo, hi)`
    /// (in singular-value scale; pass negative `lo` to include the kernel).
    pub fn v_plus_basis(&self, lo: f64, hi: f64) -> Mat {
        Self::basis_in(&self.plus, square_cut(lo), square_cut(hi))
    }

    pub fn v_minus_basis(&self, lo: f64, hi: f64) -> Mat {
        Self::basis_in(&self.minus, square_cut(lo), square_cut(hi))
    }

    /// Real dimensions of the chart spaces at `delta`.
    pub fn chart_dims(&self, delta: f64) -> (usize, usize) {
        (
            self.v_plus_basis(-1.0, delta).ncols(),
            self.v_minus_basis(-1.0, delta).ncols(),
        )
    }

    /// `J` applied to columns of `w` (eigenvectors of `D^T D` with nonzero
    /// singular values): `J w = D w / lambda`.
    pub fn j_map(&self, w: &Mat) -> Result<Mat> {
        let mut out = Mat::zeros(self.dim_out(), w.ncols());
        for j in 0..w.ncols() {
            let col = w.column(j).into_owned();
            let img = &self.d * &col;
            let lambda = img.norm();
            if lambda <= self.cfg.gap_tol {
                return Err(Error::SingularMap("J is undefined on the kernel".into()));
            }
            out.set_column(j, &(img / lambda));
        }
        Ok(out)
    }

    pub fn singular_values(&self) -> &[(f64, usize)] {
        &self.svals
    }
}

fn square_cut(x: f64) -> f64 {
    if x.is_infinite() {
        f64::INFINITY
    } else if x < 0.0 {
        -1.0
    } else {
        x * x
    }
}

/// Lossless float-to-rational conversion of a matrix.
pub fn rationalize(m: &Mat) -> RatMat {
    RatMat::from_f64_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenspace_split_examples() {
        let cfg = ToleranceConfig::default();

        // invertible D, interval below the spectrum: both spaces zero
        let d = Mat::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 2.0]);
        let m = FredholmModel::new(d, &cfg).unwrap();
        assert_eq!(m.chart_dims(1.0), (0, 0));

        // D = diag(2, 0): V+ over [0,1] is the kernel span(e2)
        let d = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let m = FredholmModel::new(d, &cfg).unwrap();
        let b = m.v_plus_basis(-1.0, 1.0);
        assert_eq!(b.ncols(), 1);
        assert!((b[(1, 0)].abs() - 1.0).abs() < 1e-12);

        // skew 2x2: V over [0,2] is everything, J orthogonal
        let d = Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let m = FredholmModel::new(d, &cfg).unwrap();
        let w = m.v_plus_basis(0.5, 2.0);
        assert_eq!(w.ncols(), 2);
        let j = m.j_map(&w).unwrap();
        let g = j.transpose() * &j;
        assert!((g - Mat::identity(2, 2)).amax() < 1e-12);
    }
}
