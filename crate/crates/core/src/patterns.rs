//! Left-bottom patterns and the combinatorics of admissible and
//! irreducible subpatterns of the triangular pattern.
//!
//! A pattern is a 0/* matrix; a matrix is consistent with it when it is
//! nonzero only at stars. All indices in this module are 1-based.

use crate::error::{Error, Result};

/// Dense 0/* matrix. `true` means star.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl Pattern {
    pub fn new(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        assert_eq!(cells.len(), rows * cols);
        Ok(Pattern { rows, cols, cells })
    }

    /// Builds a pattern from rows of booleans; rows must be nonempty and equal length.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::ZeroDimension);
        }
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols));
        let cells = rows.iter().flatten().copied().collect();
        Pattern::new(rows.len(), cols, cells)
    }

    /// The n x n triangular lb-pattern T_n: star at (i,j) iff i >= j.
    pub fn triangular(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut cells = vec![false; n * n];
        for i in 1..=n {
            for j in 1..=i {
                cells[(i - 1) * n + (j - 1)] = true;
            }
        }
        Pattern::new(n, n, cells)
    }

    pub fn all_star(rows: usize, cols: usize) -> Result<Self> {
        Pattern::new(rows, cols, vec![true; rows.checked_mul(cols).unwrap()])
    }

    pub fn all_zero(rows: usize, cols: usize) -> Result<Self> {
        Pattern::new(rows, cols, vec![false; rows.checked_mul(cols).unwrap()])
    }

    /// The minimal irreducible n x n pattern: zero exactly where i+1 < j.
    pub fn minimal_irreducible(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut cells = vec![false; n * n];
        for i in 1..=n {
            for j in 1..=n {
                if i + 1 >= j {
                    cells[(i - 1) * n + (j - 1)] = true;
                }
            }
        }
        Pattern::new(n, n, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 1-based star lookup.
    pub fn star(&self, i: usize, j: usize) -> bool {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols);
        self.cells[(i - 1) * self.cols + (j - 1)]
    }

    pub fn star_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Positions of all stars in row-major order.
    pub fn star_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                if self.star(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// True iff every entry before or below a star is also a star.
    pub fn is_lb(&self) -> bool {
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                if self.star(i, j) {
                    if j > 1 && !self.star(i, j - 1) {
                        return false;
                    }
                    if i < self.rows && !self.star(i + 1, j) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True iff the pattern is square with stars on the whole main diagonal.
    pub fn is_admissible(&self) -> bool {
        self.rows == self.cols && (1..=self.rows).all(|i| self.star(i, i))
    }

    /// True iff the pattern is square with stars on the whole superdiagonal.
    pub fn is_irreducible(&self) -> bool {
        self.rows == self.cols && (1..self.rows).all(|i| self.star(i, i + 1))
    }

    /// Extracts the submatrix given by the selection.
    pub fn subpattern(&self, sel: &IndexSelection) -> Result<Pattern> {
        sel.validate(self.rows, self.cols)?;
        let k = sel.len();
        let mut cells = Vec::with_capacity(k * k);
        for &i in sel.rows() {
            for &j in sel.cols() {
                cells.push(self.star(i, j));
            }
        }
        Pattern::new(k, sel.cols().len(), cells)
    }

    /// Splits a square lb-pattern with a star at (1,1) into an admissible
    /// leading part and a certified zero region, unless it is admissible.
    pub fn fact2_split(&self) -> Result<Fact2Split> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if !self.star(1, 1) {
            return Err(Error::MissingCornerStar);
        }
        if self.is_admissible() {
            return Ok(Fact2Split::Admissible);
        }
        // Largest m with a fully starred leading diagonal; the lb property
        // then forces zeros in rows 1..=m+1, columns m+1..=n.
        let m = (1..=self.rows).take_while(|&i| self.star(i, i)).count();
        let split = Fact2Split::Split {
            m,
            zero_rows: (1, m + 1),
            zero_cols: (m + 1, self.cols),
        };
        for a in 1..=m + 1 {
            for b in m + 1..=self.cols {
                debug_assert!(!self.star(a, b));
            }
        }
        Ok(split)
    }

    /// Covers the diagonal of an admissible pattern by maximal consecutive
    /// principal subpatterns that are irreducible, cutting exactly where a
    /// superdiagonal cell is zero.
    pub fn decompose_irreducible(&self) -> Result<Vec<IndexSelection>> {
        if !self.is_admissible() {
            return Err(Error::NotAdmissible);
        }
        let n = self.rows;
        let mut blocks = Vec::new();
        let mut start = 1;
        for i in 1..=n {
            if i == n || !self.star(i, i + 1) {
                blocks.push(IndexSelection::principal(start, i)?);
                start = i + 1;
            }
        }
        Ok(blocks)
    }
}

/// Outcome of [`Pattern::fact2_split`]. Region bounds are inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fact2Split {
    Admissible,
    Split {
        m: usize,
        zero_rows: (usize, usize),
        zero_cols: (usize, usize),
    },
}

/// Strictly increasing 1-based row and column indices of equal length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexSelection {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl IndexSelection {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::SelectionLengthMismatch { rows: rows.len(), cols: cols.len() });
        }
        if rows.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for list in [&rows, &cols] {
            if list[0] == 0 || !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::IndicesNotIncreasing);
            }
        }
        Ok(IndexSelection { rows, cols })
    }

    /// Principal selection lo..=hi on rows and columns.
    pub fn principal(lo: usize, hi: usize) -> Result<Self> {
        let range: Vec<usize> = (lo..=hi).collect();
        IndexSelection::new(range.clone(), range)
    }

    pub fn full(n: usize) -> Result<Self> {
        IndexSelection::principal(1, n)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn validate(&self, max_row: usize, max_col: usize) -> Result<()> {
        for &i in &self.rows {
            if i > max_row {
                return Err(Error::IndexOutOfRange { index: i, max: max_row });
            }
        }
        for &j in &self.cols {
            if j > max_col {
                return Err(Error::IndexOutOfRange { index: j, max: max_col });
            }
        }
        Ok(())
    }

    /// The selected subpattern of T_n is admissible iff i_t >= j_t for
    /// every t.
    pub fn is_admissible(&self) -> bool {
        self.rows.iter().zip(&self.cols).all(|(i, j)| i >= j)
    }

    /// The selected subpattern of T_n is irreducible iff it is admissible
    /// and additionally i_t >= j_{t+1} for every t < k.
    pub fn is_irreducible(&self) -> bool {
        self.is_admissible() && self.rows.iter().zip(self.cols.iter().skip(1)).all(|(i, j)| i >= j)
    }
}

/// Admissibility of a selection inside T_n, checked without building the
/// subpattern.
pub fn selection_is_admissible(n: usize, sel: &IndexSelection) -> Result<bool> {
    sel.validate(n, n)?;
    Ok(sel.is_admissible())
}

/// Which selections to visit when enumerating subpatterns of T_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionFilter {
    Admissible,
    Irreducible,
}

/// Visits every admissible (or irreducible) selection of T_n with size in
/// `k_range`, each exactly once, in lexicographic order on
/// (k, row_indices, col_indices).
pub fn for_each_admissible_selection<F>(
    n: usize,
    k_range: std::ops::RangeInclusive<usize>,
    filter: SelectionFilter,
    mut visit: F,
) where
    F: FnMut(&IndexSelection),
{
    let lo = (*k_range.start()).max(1);
    let hi = (*k_range.end()).min(n);
    for k in lo..=hi {
        for rows in combinations(n, k) {
            for_each_col_choice(n, &rows, filter, &mut visit);
        }
    }
}

/// Visits all column choices compatible with fixed rows, in lexicographic
/// order. Used both by the sequential driver above and by parallel
/// partitioning over row combinations.
pub fn for_each_col_choice<F>(n: usize, rows: &[usize], filter: SelectionFilter, visit: &mut F)
where
    F: FnMut(&IndexSelection),
{
    let k = rows.len();
    let mut cols = vec![0usize; k];
    fn rec<F: FnMut(&IndexSelection)>(
        n: usize,
        rows: &[usize],
        cols: &mut Vec<usize>,
        depth: usize,
        filter: SelectionFilter,
        visit: &mut F,
    ) {
        let k = rows.len();
        if depth == k {
            let sel = IndexSelection::new(rows.to_vec(), cols.clone()).unwrap();
            visit(&sel);
            return;
        }
        let min = if depth == 0 { 1 } else { cols[depth - 1] + 1 };
        // Admissibility caps j_t at i_t; irreducibility also caps j_{t+1}
        // at i_t, i.e. j_t at i_{t-1}.
        let mut max = rows[depth];
        if filter == SelectionFilter::Irreducible && depth > 0 {
            max = max.min(rows[depth - 1]);
        }
        // Leave room for the remaining strictly increasing indices.
        let max = max.min(n - (k - depth - 1));
        for j in min..=max {
            cols[depth] = j;
            rec(n, rows, cols, depth + 1, filter, visit);
        }
    }
    rec(n, rows, &mut cols, 0, filter, visit);
}

/// All k-subsets of 1..=n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut cur = vec![0usize; k];
    fn rec(n: usize, k: usize, depth: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if depth == k {
            out.push(cur.clone());
            return;
        }
        let min = if depth == 0 { 1 } else { cur[depth - 1] + 1 };
        for v in min..=n - (k - depth - 1) {
            cur[depth] = v;
            rec(n, k, depth + 1, cur, out);
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Collects the enumeration into a vector; convenience for small n.
pub fn admissible_selections(
    n: usize,
    k_range: std::ops::RangeInclusive<usize>,
    filter: SelectionFilter,
) -> Vec<IndexSelection> {
    let mut out = Vec::new();
    for_each_admissible_selection(n, k_range, filter, |sel| out.push(sel.clone()));
    out
}

/// Rows-per-length representation of a random lb-pattern: row r gets
/// `lens[r-1]` leading stars, lens nondecreasing. Exposed for tests and
/// experiment drivers that need random lb-patterns.
pub fn lb_from_row_lengths(lens: &[usize], cols: usize) -> Result<Pattern> {
    let rows = lens.len();
    if rows == 0 || cols == 0 {
        return Err(Error::ZeroDimension);
    }
    assert!(lens.windows(2).all(|w| w[0] <= w[1]) && lens.iter().all(|&l| l <= cols));
    let mut cells = Vec::with_capacity(rows * cols);
    for &l in lens {
        for j in 1..=cols {
            cells.push(j <= l);
        }
    }
    Pattern::new(rows, cols, cells)
}
