//! Exact linear algebra over prime fields GF(q), q < 2^64.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::IndexSelection;

/// Rows-per-block and columns-per-block of a block matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockShape {
    pub rows: usize,
    pub cols: usize,
}

impl BlockShape {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(BlockShape { rows, cols })
    }

    pub fn scalar() -> Self {
        BlockShape { rows: 1, cols: 1 }
    }
}

impl std::fmt::Display for BlockShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Smallest prime >= lo.
pub fn next_prime(lo: u64) -> u64 {
    let mut q = lo.max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// GF(q) for prime q, with modular arithmetic on residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q { s - self.q } else { s }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.q - b }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 { 0 } else { self.q - a }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        pow_mod(a, self.q - 2, self.q)
    }
}

/// Dense matrix over a prime field; entries stored row-major as residues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FieldMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        assert_eq!(entries.len(), rows * cols);
        for &e in &entries {
            if e >= field.modulus() {
                return Err(Error::EntryOutOfField { value: e, q: field.modulus() });
            }
        }
        Ok(FieldMatrix { field, rows, cols, entries })
    }

    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Result<Self> {
        FieldMatrix::new(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: PrimeField, n: usize) -> Result<Self> {
        let mut m = FieldMatrix::zero(field, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        debug_assert!(v < self.field.modulus());
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Row-space dimension via exact Gaussian elimination mod q.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelonize().0
    }

    /// Reduces in place to reduced row echelon form; returns the rank and
    /// the pivot column of each pivot row.
    fn echelonize(&mut self) -> (usize, Vec<usize>) {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let a = self.get(r, j);
                    let b = self.get(p, j);
                    self.set(r, j, b);
                    self.set(p, j, a);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let factor = self.get(i, c);
                    for j in c..self.cols {
                        let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (r, pivots)
    }

    /// A nonzero x with self * x = 0 when one exists (cols > rank),
    /// normalized so its first nonzero coordinate is 1.
    pub fn kernel_vector(&self) -> Option<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let (rank, pivots) = m.echelonize();
        if rank == self.cols {
            return None;
        }
        let free = (0..self.cols).find(|c| !pivots.contains(c)).unwrap();
        let mut x = vec![0u64; self.cols];
        x[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            if pc < free {
                x[pc] = f.neg(m.get(r, free));
            }
        }
        // First nonzero coordinate to 1.
        let first = x.iter().position(|&v| v != 0).unwrap();
        let inv = f.inv(x[first]);
        for v in &mut x {
            *v = f.mul(*v, inv);
        }
        debug_assert!(self.mul_vec(&x).iter().all(|&v| v == 0));
        Some(x)
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, j), x[j]));
                }
                acc
            })
            .collect()
    }

    /// Selects block rows/cols under the given block shape and returns the
    /// flattened (a*k) x (b*k) submatrix. Selection indices are 1-based
    /// block indices.
    pub fn extract(&self, sel: &IndexSelection, shape: BlockShape) -> Result<FieldMatrix> {
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
        let mut out = FieldMatrix::zero(self.field, shape.rows * k, shape.cols * sel.cols().len())?;
        for (bi, &i) in sel.rows().iter().enumerate() {
            for (bj, &j) in sel.cols().iter().enumerate() {
                for r in 0..shape.rows {
                    for c in 0..shape.cols {
                        let v = self.get((i - 1) * shape.rows + r, (j - 1) * shape.cols + c);
                        out.set(bi * shape.rows + r, bj * shape.cols + c, v);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn fm(q: u64, rows: &[&[u64]]) -> FieldMatrix {
        let r = rows.len();
        let c = rows[0].len();
        FieldMatrix::new(gf(q), r, c, rows.iter().flat_map(|r| r.iter().copied()).collect()).unwrap()
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(53));
        assert!(is_prime(1009));
        assert!(!is_prime(1));
        assert!(!is_prime(4));
        assert!(!is_prime(561)); // Carmichael
        assert!(is_prime(18446744073709551557)); // largest u64 prime
        assert!(PrimeField::new(6).is_err());
        assert_eq!(next_prime(50), 53);
        assert_eq!(next_prime(2), 2);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(gf(5), 3).unwrap().rank(), 3);
        assert_eq!(FieldMatrix::zero(gf(7), 4, 2).unwrap().rank(), 0);
        assert_eq!(fm(5, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let m = fm(5, &[&[1, 2], &[2, 4]]);
        assert_eq!(m.kernel_vector().unwrap(), vec![1, 2]);
        assert!(FieldMatrix::identity(gf(5), 2).unwrap().kernel_vector().is_none());
        let z = FieldMatrix::zero(gf(3), 1, 3).unwrap();
        let x = z.kernel_vector().unwrap();
        assert!(x.iter().any(|&v| v != 0));
        assert_eq!(x[x.iter().position(|&v| v != 0).unwrap()], 1);
    }

    #[test]
    fn extract_examples() {
        let m = fm(5, &[&[1, 2], &[3, 4]]);
        let full = m.extract(&IndexSelection::full(2).unwrap(), BlockShape::scalar()).unwrap();
        assert_eq!(full, m);

        // (2,1)-blocks: 4x2 matrix has block dims 2x2.
        let m = fm(7, &[&[1, 0], &[2, 0], &[3, 5], &[4, 6]]);
        let sel = IndexSelection::new(vec![2], vec![2]).unwrap();
        let b = m.extract(&sel, BlockShape::new(2, 1).unwrap()).unwrap();
        assert_eq!((b.rows(), b.cols()), (2, 1));
        assert_eq!(b.entries(), &[5, 6]);

        let bad = IndexSelection::new(vec![3], vec![1]).unwrap();
        assert!(m.extract(&bad, BlockShape::new(2, 1).unwrap()).is_err());
    }

    // Cofactor-expansion determinant, independent of the elimination path.
    fn det_cofactor(m: &FieldMatrix) -> u64 {
        let f = m.field();
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0);
        }
        let mut acc = 0u64;
        for j in 0..n {
            if m.get(0, j) == 0 {
                continue;
            }
            let mut sub = FieldMatrix::zero(f, n - 1, n - 1).unwrap();
            for i in 1..n {
                let mut cc = 0;
                for c in 0..n {
                    if c != j {
                        sub.set(i - 1, cc, m.get(i, c));
                        cc += 1;
                    }
                }
            }
            let term = f.mul(m.get(0, j), det_cofactor(&sub));
            acc = if j % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
        }
        acc
    }

    #[test]
    fn rank_matches_cofactor_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for q in [2u64, 3, 5, 7] {
            let f = gf(q);
            for n in 1..=4usize {
                for _ in 0..50 {
                    let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..q)).collect();
                    let m = FieldMatrix::new(f, n, n, entries).unwrap();
                    assert_eq!(m.rank() == n, det_cofactor(&m) != 0);
                }
            }
        }
    }

    #[test]
    fn rank_invariant_under_row_ops() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let f = gf(11);
        for _ in 0..100 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let entries: Vec<u64> = (0..rows * cols).map(|_| rng.gen_range(0..11)).collect();
            let m = FieldMatrix::new(f, rows, cols, entries).unwrap();
            let r = m.rank();
            assert!(r <= rows.min(cols));

            let mut swapped = m.clone();
            let (a, b) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
            for j in 0..cols {
                let x = swapped.get(a, j);
                let y = swapped.get(b, j);
                swapped.set(a, j, y);
                swapped.set(b, j, x);
            }
            assert_eq!(swapped.rank(), r);

            let mut scaled = m.clone();
            let lambda = rng.gen_range(1..11);
            for j in 0..cols {
                let v = f.mul(scaled.get(a, j), lambda);
                scaled.set(a, j, v);
            }
            assert_eq!(scaled.rank(), r);
        }
    }

    #[test]
    fn kernel_vector_always_in_kernel() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = gf(13);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let entries: Vec<u64> = (0..rows * cols).map(|_| rng.gen_range(0..13)).collect();
            let m = FieldMatrix::new(f, rows, cols, entries).unwrap();
            if let Some(x) = m.kernel_vector() {
                assert!(x.iter().any(|&v| v != 0));
                assert!(m.mul_vec(&x).iter().all(|&v| v == 0));
            } else {
                assert_eq!(m.rank(), cols);
            }
        }
    }
}
