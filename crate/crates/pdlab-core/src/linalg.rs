//! Dense exact linear algebra over the rationals.
//!
//! Matrices here are small (dozens of rows at most, indexed by path
//! classes or relation instances), so plain Gaussian elimination over
//! `BigRational` is both simple and fast enough.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// A dense rational matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigRational) {
        let cell = &mut self.data[r * self.cols + c];
        *cell = cell.clone() + v;
    }

    /// Rank via Gaussian elimination on a working copy.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            // Find a pivot in this column at or below `rank`.
            let pivot = (rank..rows).find(|&r| !m[r * cols + col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap_ranges(p, rank, cols);
            let inv = m[rank * cols + col].clone().recip();
            for c in col..cols {
                let v = m[rank * cols + c].clone() * &inv;
                m[rank * cols + c] = v;
            }
            for r in 0..rows {
                if r != rank && !m[r * cols + col].is_zero() {
                    let factor = m[r * cols + col].clone();
                    for c in col..cols {
                        let sub = m[rank * cols + c].clone() * &factor;
                        let cell = &mut m[r * cols + c];
                        *cell = cell.clone() - sub;
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Dimension of the right kernel.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the right kernel (vectors `v` with `self * v = 0`),
    /// one vector per free column of the reduced row-echelon form.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut rank = 0;
        for col in 0..cols {
            let pivot = (rank..rows).find(|&r| !m[r * cols + col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap_ranges(p, rank, cols);
            let inv = m[rank * cols + col].clone().recip();
            for c in col..cols {
                let v = m[rank * cols + c].clone() * &inv;
                m[rank * cols + c] = v;
            }
            for r in 0..rows {
                if r != rank && !m[r * cols + col].is_zero() {
                    let factor = m[r * cols + col].clone();
                    for c in col..cols {
                        let sub = m[rank * cols + c].clone() * &factor;
                        let cell = &mut m[r * cols + c];
                        *cell = cell.clone() - sub;
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
            if rank == rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for col in 0..cols {
                if let Some(r) = pivot_of_col[col] {
                    v[col] = -m[r * cols + free].clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant of a square matrix via Gaussian elimination.
    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut det = BigRational::one();
        for col in 0..cols {
            let pivot = (col..rows).find(|&r| !m[r * cols + col].is_zero());
            let Some(p) = pivot else {
                return BigRational::zero();
            };
            if p != col {
                m.swap_ranges(p, col, cols);
                det = -det;
            }
            let lead = m[col * cols + col].clone();
            det *= &lead;
            for r in (col + 1)..rows {
                if !m[r * cols + col].is_zero() {
                    let factor = m[r * cols + col].clone() / &lead;
                    for c in col..cols {
                        let sub = m[col * cols + c].clone() * &factor;
                        let cell = &mut m[r * cols + c];
                        *cell = cell.clone() - sub;
                    }
                }
            }
        }
        det
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if !b.is_zero() {
                        out.add_to(r, c, &(a.clone() * b));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }
}

trait SwapRanges {
    fn swap_ranges(&mut self, r1: usize, r2: usize, cols: usize);
}

impl SwapRanges for Vec<BigRational> {
    fn swap_ranges(&mut self, r1: usize, r2: usize, cols: usize) {
        if r1 == r2 {
            return;
        }
        for c in 0..cols {
            self.swap(r1 * cols + c, r2 * cols + c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_rows(rows: &[&[i64]]) -> QMatrix {
        let mut m = QMatrix::zeros(rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, rat(v));
            }
        }
        m
    }

    #[test]
    fn rank_of_identity_and_singular() {
        let id = from_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(id.rank(), 2);
        let sing = from_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.rank(), 1);
        assert_eq!(sing.kernel_dim(), 1);
    }

    #[test]
    fn product_and_zero() {
        let a = from_rows(&[&[1, 2], &[3, 4]]);
        let b = from_rows(&[&[2, 0], &[1, 2]]);
        let ab = a.mul(&b);
        assert_eq!(ab, from_rows(&[&[4, 4], &[10, 8]]));
        assert!(!ab.is_zero());
        assert!(QMatrix::zeros(2, 3).is_zero());
    }

    #[test]
    fn kernel_basis_annihilates() {
        let m = from_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let basis = m.kernel();
        assert_eq!(basis.len(), 1);
        for v in &basis {
            for r in 0..m.rows() {
                let mut acc = BigRational::zero();
                for (c, x) in v.iter().enumerate() {
                    acc += m.at(r, c).clone() * x;
                }
                assert!(acc.is_zero());
            }
        }
        assert_eq!(from_rows(&[&[1, 0], &[0, 1]]).kernel().len(), 0);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = from_rows(&[&[2, 0, 1], &[1, 3, -1], &[0, 1, 4]]);
        // Cofactor expansion along the first row: 2*(12+1) - 0 + 1*(1-0) = 27.
        assert_eq!(m.det(), rat(27));
        assert_eq!(from_rows(&[&[1, 2], &[2, 4]]).det(), rat(0));
        // A row swap flips the sign.
        assert_eq!(from_rows(&[&[0, 1], &[1, 0]]).det(), rat(-1));
    }

    #[test]
    fn rank_with_fractions() {
        let mut m = QMatrix::zeros(2, 2);
        m.set(0, 0, BigRational::new(BigInt::from(1), BigInt::from(2)));
        m.set(0, 1, rat(1));
        m.set(1, 0, rat(1));
        m.set(1, 1, rat(2));
        assert_eq!(m.rank(), 1);
    }
}
