//! Arbitrary-precision integer matrices with fraction-free determinants.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::BlockShape;
use crate::patterns::IndexSelection;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        assert_eq!(entries.len(), rows * cols);
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        IntMatrix::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::ZeroDimension);
        }
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols));
        let entries = rows.iter().flatten().map(|&v| BigInt::from(v)).collect();
        IntMatrix::new(rows.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    // Exact by the Bareiss identity.
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        Ok(if sign < 0 { -d } else { d })
    }

    pub fn is_nonsingular(&self) -> Result<bool> {
        Ok(!self.det()?.is_zero())
    }

    /// Block-wise submatrix extraction; see [`crate::field::FieldMatrix::extract`].
    pub fn extract(&self, sel: &IndexSelection, shape: BlockShape) -> Result<IntMatrix> {
        let block_rows = self.rows / shape.rows;
        let block_cols = self.cols / shape.cols;
        if block_rows * shape.rows != self.rows || block_cols * shape.cols != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix does not tile into {} blocks",
                self.rows, self.cols, shape
            )));
        }
        sel.validate(block_rows, block_cols)?;
        let k = sel.len();
        let mut out = IntMatrix::zero(shape.rows * k, shape.cols * sel.cols().len())?;
        for (bi, &i) in sel.rows().iter().enumerate() {
            for (bj, &j) in sel.cols().iter().enumerate() {
                for r in 0..shape.rows {
                    for c in 0..shape.cols {
                        let v = self.get((i - 1) * shape.rows + r, (j - 1) * shape.cols + c);
                        out.set(bi * shape.rows + r, bj * shape.cols + c, v.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rank over the rationals, by exact elimination.
    pub fn rank(&self) -> usize {
        use num_rational::BigRational;
        let mut m: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| BigRational::from(self.get(i, j).clone())).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for i in rank + 1..self.rows {
                if !m[i][c].is_zero() {
                    let factor = &m[i][c] / &m[rank][c];
                    for j in c..self.cols {
                        let v = &m[i][j] - &factor * &m[rank][j];
                        m[i][j] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// True iff every entry above the main diagonal is zero.
    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    pub fn max_abs(&self) -> BigInt {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_examples() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 0], vec![3, 5]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::from(10));
        let m = IntMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::zero());
        let m = IntMatrix::from_i64_rows(&[vec![1, 0, 0], vec![7, 2, 0], vec![-4, 9, 3]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::from(6));
        let m = IntMatrix::from_i64_rows(&[vec![1, 2, 3]]).unwrap();
        assert!(m.det().is_err());
    }

    #[test]
    fn det_needs_pivot_swap() {
        let m = IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::from(-1));
        let m = IntMatrix::from_i64_rows(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::from(-1));
    }

    // Independent oracle: cofactor expansion along the first row.
    fn det_cofactor(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let mut sub = IntMatrix::zero(n - 1, n - 1).unwrap();
            for i in 1..n {
                let mut cc = 0;
                for c in 0..n {
                    if c != j {
                        sub.set(i - 1, cc, m.get(i, c).clone());
                        cc += 1;
                    }
                }
            }
            let term = m.get(0, j) * det_cofactor(&sub);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn bareiss_matches_cofactor() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for n in 1..=5usize {
            for _ in 0..60 {
                let rows: Vec<Vec<i64>> =
                    (0..n).map(|_| (0..n).map(|_| rng.gen_range(-10..=10)).collect()).collect();
                let m = IntMatrix::from_i64_rows(&rows).unwrap();
                assert_eq!(m.det().unwrap(), det_cofactor(&m));
            }
        }
    }

    #[test]
    fn extract_scalar_blocks() {
        let m = IntMatrix::from_i64_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).unwrap();
        let sel = IndexSelection::new(vec![1, 3], vec![2, 3]).unwrap();
        let sub = m.extract(&sel, BlockShape::scalar()).unwrap();
        assert_eq!(sub, IntMatrix::from_i64_rows(&[vec![2, 3], vec![8, 9]]).unwrap());
    }
}
