//! Dense integer matrices for exact representation arithmetic.
//!
//! The spinor recursion only ever produces signed permutation matrices, so
//! `i64` entries are ample; conversion to [`RatMat`](super::RatMat) is
//! provided for kernel and basis extraction.

use super::{rat, RatMat};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl std::fmt::Debug for IMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut m = IMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        IMat::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        IMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: i64) -> Self {
        IMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn block2(a: &IMat, b: &IMat, c: &IMat, d: &IMat) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        IMat::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| {
            match (i < a.rows, j < a.cols) {
                (true, true) => a[(i, j)],
                (true, false) => b[(i, j - a.cols)],
                (false, true) => c[(i - a.rows, j)],
                (false, false) => d[(i - a.rows, j - a.cols)],
            }
        })
    }

    pub fn block_diag2(a: &IMat, b: &IMat) -> Self {
        IMat::block2(
            a,
            &IMat::zeros(a.rows, b.cols),
            &IMat::zeros(b.rows, a.cols),
            b,
        )
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat::from_fn(self.rows, self.cols, |i, j| rat(self[(i, j)]))
    }

    /// Largest absolute entry, for overflow monitoring.
    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Divide all entries by their gcd and make the first nonzero entry
    /// positive. Returns the zero matrix unchanged.
    pub fn primitive_normalized(&self) -> IMat {
        let mut g: i64 = 0;
        for &x in &self.data {
            g = gcd(g, x.abs());
        }
        if g == 0 {
            return self.clone();
        }
        let mut out = IMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] / g);
        if let Some(&first) = out.data.iter().find(|&&x| x != 0) {
            if first < 0 {
                out = out.scale(-1);
            }
        }
        out
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Add for &IMat {
    type Output = IMat;
    fn add(self, rhs: &IMat) -> IMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &IMat {
    type Output = IMat;
    fn sub(self, rhs: &IMat) -> IMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Neg for &IMat {
    type Output = IMat;
    fn neg(self) -> IMat {
        self.scale(-1)
    }
}

impl Mul for &IMat {
    type Output = IMat;
    fn mul(self, rhs: &IMat) -> IMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = IMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
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
    fn block_and_mul() {
        let a = IMat::from_rows(&[&[0, -1], &[1, 0]]);
        let sq = &a * &a;
        assert_eq!(sq, IMat::identity(2).scale(-1));
        let d = IMat::block_diag2(&a, &a);
        assert_eq!(&d * &d, IMat::identity(4).scale(-1));
    }

    #[test]
    fn primitive_normalization() {
        let m = IMat::from_rows(&[&[0, -4], &[8, 0]]);
        let p = m.primitive_normalized();
        assert_eq!(p, IMat::from_rows(&[&[0, 1], &[-2, 0]]));
    }
}
