//! Exact rational scalars, vectors, and dense matrices.
//!
//! Every sign-sensitive computation in the workbench runs through this
//! module: Clifford representation matrices, wedge-word coefficients,
//! duality pairings. Floating-point data enters only through the lossless
//! conversion [`rat_from_f64`].

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

mod imat;
pub use imat::IMat;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Lossless conversion of a finite `f64` into a rational.
pub fn rat_from_f64(x: f64) -> Rat {
    BigRational::from_float(x).expect("finite float required")
}

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = RatMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        RatMat::from_fn(r, c, |i, j| rat(rows[i][j]))
    }

    /// Lossless import of a float matrix given as row-major closure.
    pub fn from_f64_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        RatMat::from_fn(rows, cols, |i, j| rat_from_f64(f(i, j)))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Rat]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i].clone();
        }
    }

    pub fn from_columns(dim: usize, cols: &[Vec<Rat>]) -> Self {
        let mut m = RatMat::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            m.set_column(j, c);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        RatMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        RatMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    pub fn hcat(&self, other: &RatMat) -> Self {
        assert_eq!(self.rows, other.rows);
        RatMat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vcat(&self, other: &RatMat) -> Self {
        assert_eq!(self.cols, other.cols);
        RatMat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    /// Block matrix `[[a, b], [c, d]]`; dimensions must be consistent.
    pub fn block2(a: &RatMat, b: &RatMat, c: &RatMat, d: &RatMat) -> Self {
        a.hcat(b).vcat(&c.hcat(d))
    }

    pub fn block_diag(blocks: &[&RatMat]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = RatMat::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(ro + i, co + j)] = b[(i, j)].clone();
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        RatMat::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn dot_columns(a: &[Rat], b: &[Rat]) -> Rat {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Gaussian elimination to reduced row echelon form; returns pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // find a pivot in column c at row >= r
            let mut piv = None;
            for i in r..m.rows {
                if !m[(i, c)].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            if p != r {
                for j in 0..m.cols {
                    let tmp = m[(p, j)].clone();
                    m[(p, j)] = m[(r, j)].clone();
                    m[(r, j)] = tmp;
                }
            }
            let inv = m[(r, c)].clone();
            for j in 0..m.cols {
                m[(r, j)] = &m[(r, j)] / &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        m[(i, j)] = &m[(i, j)] - &(&f * &m[(r, j)]);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the kernel, as matrix columns. Empty matrix when injective.
    pub fn nullspace(&self) -> RatMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = RatMat::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis[(fc, k)] = Rat::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                basis[(pc, k)] = -r[(pr, fc)].clone();
            }
        }
        basis
    }

    /// Determinant by fraction-free-ish elimination (plain field elimination).
    pub fn det(&self) -> Rat {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let mut piv = None;
            for i in c..n {
                if !m[(i, c)].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { return Rat::zero() };
            if p != c {
                det = -det;
                for j in 0..n {
                    let tmp = m[(p, j)].clone();
                    m[(p, j)] = m[(c, j)].clone();
                    m[(c, j)] = tmp;
                }
            }
            det = &det * &m[(c, c)];
            let inv = m[(c, c)].clone();
            for i in (c + 1)..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &inv;
                    for j in c..n {
                        m[(i, j)] = &m[(i, j)] - &(&f * &m[(c, j)]);
                    }
                }
            }
        }
        det
    }

    /// Solve `self * x = rhs` for all columns of `rhs`; `None` if singular.
    pub fn solve(&self, rhs: &RatMat) -> Option<RatMat> {
        assert!(self.is_square());
        assert_eq!(self.rows, rhs.rows);
        let aug = self.hcat(rhs);
        let (r, pivots) = aug.rref();
        if pivots.len() < self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        Some(r.submatrix(0, self.cols, self.rows, rhs.cols))
    }

    pub fn inverse(&self) -> Option<RatMat> {
        self.solve(&RatMat::identity(self.rows))
    }

    /// Entrywise maximum absolute value as f64 (for diagnostics only).
    pub fn max_abs_f64(&self) -> f64 {
        self.data
            .iter()
            .map(|x| rat_to_f64(&x.abs()))
            .fold(0.0, f64::max)
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    let n = x.numer();
    let d = x.denom();
    // Convert through string only when magnitudes exceed i128.
    match (i128::try_from(n.clone()), i128::try_from(d.clone())) {
        (Ok(n), Ok(d)) => n as f64 / d as f64,
        _ => {
            let s = x.to_string();
            // fallback: split fraction
            match s.split_once('/') {
                Some((a, b)) => a.parse::<f64>().unwrap_or(f64::NAN) / b.parse::<f64>().unwrap_or(f64::NAN),
                None => s.parse::<f64>().unwrap_or(f64::NAN),
            }
        }
    }
}

impl Add for &RatMat {
    type Output = RatMat;
    fn add(self, rhs: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }
}

impl Sub for &RatMat {
    type Output = RatMat;
    fn sub(self, rhs: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }
}

impl Neg for &RatMat {
    type Output = RatMat;
    fn neg(self) -> RatMat {
        RatMat::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }
}

impl Mul for &RatMat {
    type Output = RatMat;
    fn mul(self, rhs: &RatMat) -> RatMat {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = RatMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if !b.is_zero() {
                        let t = a * b;
                        out[(i, j)] = &out[(i, j)] + &t;
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_rank_nullspace() {
        let m = RatMat::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.ncols(), 1);
        assert!((&m * &ns).is_zero());
    }

    #[test]
    fn det_and_inverse() {
        let m = RatMat::from_i64_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det(), rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMat::identity(2));
    }

    #[test]
    fn float_roundtrip_is_lossless() {
        let x = 0.1 + 0.7;
        assert_eq!(rat_to_f64(&rat_from_f64(x)), x);
    }
}
