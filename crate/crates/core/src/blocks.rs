//! Block matrices consistent with lb-patterns: random and Pascal-derived
//! constructions, totally-full-rank and totally-nonsingular verification,
//! and the stronger row-selection check.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BlockShape, FieldMatrix, PrimeField};
use crate::intmat::IntMatrix;
use crate::patterns::{
    combinations, for_each_col_choice, IndexSelection, Pattern, SelectionFilter,
};
use crate::util::with_jobs;

/// Flattened payload of a block matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Field(FieldMatrix),
    Int(IntMatrix),
}

/// An (a,b)-block matrix consistent with a pattern, stored flattened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrix {
    shape: BlockShape,
    block_rows: usize,
    block_cols: usize,
    payload: Payload,
    pattern: Pattern,
}

/// Which columns of the 2n x 2n Pascal matrix count as "odd".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OddIndexing {
    /// Columns 1, 3, 5, ... counting from 0.
    ZeroBased,
    /// Columns 1, 3, 5, ... counting from 1.
    OneBased,
}

impl std::fmt::Display for OddIndexing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OddIndexing::ZeroBased => write!(f, "odd-0-based"),
            OddIndexing::OneBased => write!(f, "odd-1-based"),
        }
    }
}

impl BlockMatrix {
    pub fn from_field(flat: FieldMatrix, shape: BlockShape, pattern: Pattern) -> Result<Self> {
        let bm = BlockMatrix::dims(flat.rows(), flat.cols(), shape, &pattern)?;
        let out = BlockMatrix {
            shape,
            block_rows: bm.0,
            block_cols: bm.1,
            payload: Payload::Field(flat),
            pattern,
        };
        out.check_consistency()?;
        Ok(out)
    }

    pub fn from_int(flat: IntMatrix, shape: BlockShape, pattern: Pattern) -> Result<Self> {
        let bm = BlockMatrix::dims(flat.rows(), flat.cols(), shape, &pattern)?;
        let out = BlockMatrix {
            shape,
            block_rows: bm.0,
            block_cols: bm.1,
            payload: Payload::Int(flat),
            pattern,
        };
        out.check_consistency()?;
        Ok(out)
    }

    fn dims(rows: usize, cols: usize, shape: BlockShape, pattern: &Pattern) -> Result<(usize, usize)> {
        if rows % shape.rows != 0 || cols % shape.cols != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix does not tile into {shape} blocks"
            )));
        }
        let (br, bc) = (rows / shape.rows, cols / shape.cols);
        if pattern.rows() != br || pattern.cols() != bc {
            return Err(Error::ShapeMismatch(format!(
                "pattern is {}x{}, block dims are {br}x{bc}",
                pattern.rows(),
                pattern.cols()
            )));
        }
        Ok((br, bc))
    }

    fn check_consistency(&self) -> Result<()> {
        for i in 1..=self.block_rows {
            for j in 1..=self.block_cols {
                if !self.pattern.star(i, j) && !self.block_is_zero(i, j) {
                    return Err(Error::Inconsistent { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Fills star blocks with independent uniform residues; zero blocks
    /// stay zero. Entries are drawn in row-major order over the pattern's
    /// stars, then row-major within each block, so the result is fully
    /// determined by the seed.
    pub fn random_consistent(
        pattern: &Pattern,
        shape: BlockShape,
        field: PrimeField,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BlockMatrix::random_consistent_from_rng(pattern, shape, field, &mut rng)
    }

    /// Same as [`BlockMatrix::random_consistent`] but drawing from a
    /// caller-provided stream, for per-trial generators.
    pub fn random_consistent_from_rng(
        pattern: &Pattern,
        shape: BlockShape,
        field: PrimeField,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        let mut flat =
            FieldMatrix::zero(field, pattern.rows() * shape.rows, pattern.cols() * shape.cols)?;
        for (i, j) in pattern.star_positions() {
            for r in 0..shape.rows {
                for c in 0..shape.cols {
                    let v = rng.gen_range(0..field.modulus());
                    flat.set((i - 1) * shape.rows + r, (j - 1) * shape.cols + c, v);
                }
            }
        }
        BlockMatrix::from_field(flat, shape, pattern.clone())
    }

    /// The n x n lower-triangular Pascal matrix with entry (i,j) equal to
    /// binomial(i-1, j-1), over the integers or reduced mod q.
    pub fn pascal_triangular(n: usize, modulus: Option<PrimeField>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let pattern = Pattern::triangular(n)?;
        match modulus {
            None => {
                let mut m = IntMatrix::zero(n, n)?;
                fill_pascal(n, |i, j, v: &BigInt| m.set(i, j, v.clone()), BigInt::from(1), |a, b| a + b);
                BlockMatrix::from_int(m, BlockShape::scalar(), pattern)
            }
            Some(f) => {
                let mut m = FieldMatrix::zero(f, n, n)?;
                fill_pascal(n, |i, j, v: &u64| m.set(i, j, *v), 1u64 % f.modulus(), |a, b| f.add(*a, *b));
                BlockMatrix::from_field(m, BlockShape::scalar(), pattern)
            }
        }
    }

    /// The n designated odd columns of the 2n x 2n triangular Pascal
    /// matrix mod q, viewed as a (2,1)-block matrix consistent with T_n.
    pub fn pascal_odd_columns(n: usize, field: PrimeField, indexing: OddIndexing) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let full = BlockMatrix::pascal_triangular(2 * n, Some(field))?;
        let Payload::Field(full) = full.payload else { unreachable!() };
        let mut flat = FieldMatrix::zero(field, 2 * n, n)?;
        for c in 0..n {
            let src = match indexing {
                OddIndexing::ZeroBased => 2 * c + 1,
                OddIndexing::OneBased => 2 * c,
            };
            for r in 0..2 * n {
                flat.set(r, c, full.get(r, src));
            }
        }
        BlockMatrix::from_field(flat, BlockShape::new(2, 1)?, Pattern::triangular(n)?)
    }

    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn field_payload(&self) -> Option<&FieldMatrix> {
        match &self.payload {
            Payload::Field(m) => Some(m),
            Payload::Int(_) => None,
        }
    }

    pub fn int_payload(&self) -> Option<&IntMatrix> {
        match &self.payload {
            Payload::Int(m) => Some(m),
            Payload::Field(_) => None,
        }
    }

    /// 1-based block access: true iff the whole a x b block is zero.
    pub fn block_is_zero(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.shape.rows, self.shape.cols);
        match &self.payload {
            Payload::Field(m) => (0..a).all(|r| (0..b).all(|c| m.get((i - 1) * a + r, (j - 1) * b + c) == 0)),
            Payload::Int(m) => (0..a).all(|r| (0..b).all(|c| m.get((i - 1) * a + r, (j - 1) * b + c).is_zero())),
        }
    }
}

fn fill_pascal<T: Clone>(
    n: usize,
    mut set: impl FnMut(usize, usize, &T),
    one: T,
    add: impl Fn(&T, &T) -> T,
) {
    // Additive recurrence; no factorials.
    let mut prev: Vec<T> = Vec::new();
    for i in 0..n {
        let mut row = Vec::with_capacity(i + 1);
        for j in 0..=i {
            let v = if j == 0 || j == i {
                one.clone()
            } else {
                add(&prev[j - 1], &prev[j])
            };
            row.push(v);
        }
        for (j, v) in row.iter().enumerate() {
            set(i, j, v);
        }
        prev = row;
    }
}

/// How a verifier walks the selection space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

/// Selection at which a check failed, plus the rank observed there so the
/// report can be re-checked independently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub rank: usize,
}

/// Parameters echoed into every verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indexing: Option<String>,
}

/// Outcome of a totally-full-rank / totally-nonsingular check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verified: bool,
    pub mode: VerifyMode,
    pub checked_count: u64,
    pub failure: Option<FailureWitness>,
    pub params: ReportParams,
}

impl VerificationReport {
    fn new(mode: VerifyMode, checked: u64, failure: Option<FailureWitness>, params: ReportParams) -> Self {
        VerificationReport { verified: failure.is_none(), mode, checked_count: checked, failure, params }
    }
}

fn witness_key(w: &FailureWitness) -> (usize, Vec<usize>, Vec<usize>) {
    (w.rows.len(), w.rows.clone(), w.cols.clone())
}

fn merge_failures(a: Option<FailureWitness>, b: Option<FailureWitness>) -> Option<FailureWitness> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if witness_key(&a) <= witness_key(&b) { a } else { b }),
        (a, b) => a.or(b),
    }
}

/// Checks that every admissible block submatrix flattens to a full-column-
/// rank matrix. Exhaustive mode is a proof; sampled mode is evidence only.
pub fn verify_totally_full_rank(
    m: &BlockMatrix,
    mode: VerifyMode,
    jobs: Option<usize>,
) -> Result<VerificationReport> {
    let shape = m.shape();
    if shape.rows <= shape.cols {
        return Err(Error::ShapeMismatch(format!(
            "full-rank check needs more rows than columns per block, got {shape}"
        )));
    }
    if m.block_rows() != m.block_cols() {
        return Err(Error::NotSquare { rows: m.block_rows(), cols: m.block_cols() });
    }
    let flat = m
        .field_payload()
        .ok_or_else(|| Error::ShapeMismatch("full-rank check needs a field matrix".into()))?;
    let n = m.block_rows();
    let params = ReportParams {
        n,
        q: Some(flat.field().modulus()),
        shape: shape.to_string(),
        indexing: None,
    };
    let full_rank = |sel: &IndexSelection| -> (bool, usize) {
        let sub = flat.extract(sel, shape).expect("selection in range");
        let rank = sub.rank();
        (rank == shape.cols * sel.len(), rank)
    };
    match mode {
        VerifyMode::Exhaustive => {
            let (checked, failure) = scan_selections(n, SelectionFilter::Admissible, jobs, &full_rank);
            Ok(VerificationReport::new(mode, checked, failure, params))
        }
        VerifyMode::Sampled { seed, trials } => {
            let (checked, failure) = sample_selections(n, seed, trials, jobs, &full_rank);
            Ok(VerificationReport::new(mode, checked, failure, params))
        }
    }
}

/// Walks every admissible (or irreducible) selection, partitioned across
/// workers by row combination. Each partition stops at its first failure;
/// the merged witness is the lexicographically least one found, so both
/// the verdict and the checked count are independent of the job count.
fn scan_selections(
    n: usize,
    filter: SelectionFilter,
    jobs: Option<usize>,
    check: &(dyn Fn(&IndexSelection) -> (bool, usize) + Sync),
) -> (u64, Option<FailureWitness>) {
    let mut tasks: Vec<Vec<usize>> = Vec::new();
    for k in 1..=n {
        tasks.extend(combinations(n, k));
    }
    let scan_one = |rows: &Vec<usize>| {
        let mut checked = 0u64;
        let mut failure: Option<FailureWitness> = None;
        for_each_col_choice(n, rows, filter, &mut |sel| {
            if failure.is_some() {
                return;
            }
            checked += 1;
            let (ok, rank) = check(sel);
            if !ok {
                failure = Some(FailureWitness {
                    rows: sel.rows().to_vec(),
                    cols: sel.cols().to_vec(),
                    rank,
                });
            }
        });
        (checked, failure)
    };
    let merge = |(ca, fa): (u64, Option<FailureWitness>), (cb, fb)| (ca + cb, merge_failures(fa, fb));
    // jobs = 1 stays on the calling thread: verification then nests safely
    // inside parallel experiment trials without spawning pools.
    if jobs == Some(1) {
        return tasks.iter().map(scan_one).fold((0, None), merge);
    }
    with_jobs(jobs, || {
        tasks.par_iter().map(scan_one).reduce(|| (0, None), merge)
    })
}

fn sample_selections(
    n: usize,
    seed: u64,
    trials: u64,
    jobs: Option<usize>,
    check: &(dyn Fn(&IndexSelection) -> (bool, usize) + Sync),
) -> (u64, Option<FailureWitness>) {
    let sample_one = |trial: u64| {
        let sel = random_admissible_selection(n, seed, trial);
        let (ok, rank) = check(&sel);
        if ok {
            None
        } else {
            Some(FailureWitness {
                rows: sel.rows().to_vec(),
                cols: sel.cols().to_vec(),
                rank,
            })
        }
    };
    let failure = if jobs == Some(1) {
        (0..trials).map(sample_one).fold(None, merge_failures)
    } else {
        with_jobs(jobs, || {
            (0..trials).into_par_iter().map(sample_one).reduce(|| None, merge_failures)
        })
    };
    (trials, failure)
}

fn random_admissible_selection(n: usize, seed: u64, trial: u64) -> IndexSelection {
    let mut rng = crate::util::trial_rng(seed, trial);
    loop {
        let k = rng.gen_range(1..=n);
        let rows = sorted_sample(&mut rng, n, k);
        let cols = sorted_sample(&mut rng, n, k);
        let sel = IndexSelection::new(rows, cols).unwrap();
        if sel.is_admissible() {
            return sel;
        }
    }
}

fn sorted_sample(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::with_capacity(k);
    while picked.len() < k {
        let v = rng.gen_range(1..=n);
        if !picked.contains(&v) {
            picked.push(v);
        }
    }
    picked.sort_unstable();
    picked
}

/// Checks that every irreducible admissible submatrix of a triangular
/// matrix is nonsingular, which by the decomposition of admissible
/// patterns covers all admissible submatrices. Works for (1,1)-block
/// matrices over the integers or a prime field.
pub fn verify_totally_nonsingular(
    m: &BlockMatrix,
    mode: VerifyMode,
    jobs: Option<usize>,
) -> Result<VerificationReport> {
    if m.shape() != BlockShape::scalar() {
        return Err(Error::ShapeMismatch(format!(
            "nonsingularity check needs 1x1 blocks, got {}",
            m.shape()
        )));
    }
    if m.block_rows() != m.block_cols() {
        return Err(Error::NotSquare { rows: m.block_rows(), cols: m.block_cols() });
    }
    let n = m.block_rows();
    let q = m.field_payload().map(|f| f.field().modulus());
    let params = ReportParams { n, q, shape: "1x1".into(), indexing: None };
    let check = |sel: &IndexSelection| -> (bool, usize) {
        match m.payload() {
            Payload::Field(f) => {
                let sub = f.extract(sel, BlockShape::scalar()).expect("selection in range");
                let rank = sub.rank();
                (rank == sel.len(), rank)
            }
            Payload::Int(im) => {
                let sub = im.extract(sel, BlockShape::scalar()).expect("selection in range");
                let rank = sub.rank();
                (rank == sel.len(), rank)
            }
        }
    };
    match mode {
        VerifyMode::Exhaustive => {
            let (checked, failure) = scan_selections(n, SelectionFilter::Irreducible, jobs, &check);
            Ok(VerificationReport::new(mode, checked, failure, params))
        }
        VerifyMode::Sampled { seed, trials } => {
            let (checked, failure) = sample_selections(n, seed, trials, jobs, &check);
            Ok(VerificationReport::new(mode, checked, failure, params))
        }
    }
}

/// Default cap on the selection size for [`bcn_strong_check`]; the search
/// is over 2^k row choices.
pub const BCN_DEFAULT_LIMIT: usize = 20;

/// The stronger row-selection property: from each odd/even pair of rows of
/// the flattened admissible submatrix one can pick a single row so that
/// the resulting k x k matrix is nonsingular.
pub fn bcn_strong_check(m: &BlockMatrix, sel: &IndexSelection, limit: usize) -> Result<bool> {
    if m.shape() != (BlockShape { rows: 2, cols: 1 }) {
        return Err(Error::ShapeMismatch(format!("strong check needs 2x1 blocks, got {}", m.shape())));
    }
    let k = sel.len();
    if k > limit {
        return Err(Error::SelectionTooLarge { k, limit });
    }
    let flat = m
        .field_payload()
        .ok_or_else(|| Error::ShapeMismatch("strong check needs a field matrix".into()))?;
    let sub = flat.extract(sel, m.shape())?;
    let field = sub.field();
    for mask in 0u64..(1u64 << k) {
        let mut chosen = FieldMatrix::zero(field, k, k)?;
        for t in 0..k {
            let row = 2 * t + ((mask >> t) & 1) as usize;
            for j in 0..k {
                chosen.set(t, j, sub.get(row, j));
            }
        }
        if chosen.rank() == k {
            return Ok(true);
        }
    }
    Ok(false)
}
