//! Exact integer linear algebra: Smith normal form over arbitrary-precision
//! integers, finitely presented abelian groups, canonical images in
//! quotients and integer linear solving.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = IntMatrix::zero(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(a, j) + q * self.get(b, j);
            self.set(a, j, v);
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, a) + q * self.get(i, b);
            self.set(i, a, v);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j);
            self.set(a, j, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Quotient with rounded division, minimizing |a - q b|.
fn rounded_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, _) = a.div_rem(b);
    [q.clone(), &q + 1, &q - 1]
        .into_iter()
        .min_by_key(|cand| (a - cand * b).abs())
        .unwrap()
}

/// Smith normal form U·A·V = S with U, V unimodular, S diagonal with a
/// divisibility chain d₁ | d₂ | … and non-negative diagonal entries.
/// Pivoting picks the minimal non-zero absolute value, tie-broken by
/// (row, col), which keeps coefficient growth moderate and is
/// deterministic.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let mut s = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());
    let n = a.rows().min(a.cols());
    let mut t = 0;
    while t < n {
        // Minimal-absolute-value pivot in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows() {
            for j in t..s.cols() {
                if !s.get(i, j).is_zero()
                    && pivot
                        .map(|(pi, pj)| {
                            let cur = s.get(pi, pj).abs();
                            let new = s.get(i, j).abs();
                            new < cur
                        })
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..s.rows() {
                if !s.get(i, t).is_zero() {
                    let q = -rounded_quotient(s.get(i, t), s.get(t, t));
                    s.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !s.get(i, t).is_zero() {
                        s.swap_rows(t, i);
                        u.swap_rows(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..s.cols() {
                if !s.get(t, j).is_zero() {
                    let q = -rounded_quotient(s.get(t, j), s.get(t, t));
                    s.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !s.get(t, j).is_zero() {
                        s.swap_cols(t, j);
                        v.swap_cols(t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Row and column t are clear; enforce that the pivot divides the
            // remaining submatrix.
            let mut fixed = true;
            'scan: for i in t + 1..s.rows() {
                for j in t + 1..s.cols() {
                    if !(s.get(i, j) % s.get(t, t)).is_zero() {
                        let one = BigInt::one();
                        s.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SnfResult { u, s, v }
}

/// Invariant factors only, via unit-pivot sparse elimination before a dense
/// core. Returns the full diagonal (1s retained) plus the free rank, and
/// the accumulated column transform when requested.
fn reduce_presentation(
    n_gens: usize,
    rows_in: Vec<Vec<(usize, BigInt)>>,
    want_v: bool,
) -> (Vec<BigInt>, usize, Option<IntMatrix>) {
    // Sparse rows as sorted (col, coeff) lists.
    let mut rows: Vec<Vec<(usize, BigInt)>> = rows_in;
    let mut v = if want_v {
        Some(IntMatrix::identity(n_gens))
    } else {
        None
    };
    let mut eliminated: Vec<usize> = Vec::new();
    let mut col_alive = vec![true; n_gens];
    let mut row_alive: Vec<bool> = vec![true; rows.len()];

    fn entry(row: &[(usize, BigInt)], col: usize) -> Option<usize> {
        row.binary_search_by_key(&col, |e| e.0).ok()
    }

    loop {
        // Find a live row with a ±1 entry.
        let mut found: Option<(usize, usize)> = None;
        'outer: for (ri, row) in rows.iter().enumerate() {
            if !row_alive[ri] {
                continue;
            }
            for (col, c) in row {
                if col_alive[*col] && (c.is_one() || (-c).is_one()) {
                    found = Some((ri, *col));
                    break 'outer;
                }
            }
        }
        let Some((ri, col)) = found else { break };
        let pivot_row = rows[ri].clone();
        let eps = pivot_row[entry(&pivot_row, col).unwrap()].1.clone();
        // Clear the column in every other live row.
        for rj in 0..rows.len() {
            if rj == ri || !row_alive[rj] {
                continue;
            }
            if let Some(pos) = entry(&rows[rj], col) {
                let factor = &rows[rj][pos].1 * &eps; // b_col * eps: subtract factor * pivot_row
                let mut merged: Vec<(usize, BigInt)> = Vec::new();
                let (mut x, mut y) = (0usize, 0usize);
                let a = &rows[rj];
                while x < a.len() || y < pivot_row.len() {
                    if y >= pivot_row.len() || (x < a.len() && a[x].0 < pivot_row[y].0) {
                        merged.push(a[x].clone());
                        x += 1;
                    } else if x >= a.len() || pivot_row[y].0 < a[x].0 {
                        merged.push((pivot_row[y].0, -(&factor) * &pivot_row[y].1));
                        y += 1;
                    } else {
                        let c = &a[x].1 - &factor * &pivot_row[y].1;
                        if !c.is_zero() {
                            merged.push((a[x].0, c));
                        }
                        x += 1;
                        y += 1;
                    }
                }
                rows[rj] = merged;
            }
        }
        // Substitute the generator out: column ops clearing the pivot row,
        // which only touches V because all other rows have a zero in `col`.
        if let Some(v) = v.as_mut() {
            for (k, c) in &pivot_row {
                if *k != col {
                    let q = -(&eps) * c;
                    v.add_col(*k, col, &q);
                }
            }
        }
        row_alive[ri] = false;
        col_alive[col] = false;
        eliminated.push(col);
    }

    // Dense core on the surviving rows and columns.
    let live_cols: Vec<usize> = (0..n_gens).filter(|&c| col_alive[c]).collect();
    let col_pos: std::collections::HashMap<usize, usize> =
        live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let live_rows: Vec<usize> = (0..rows.len())
        .filter(|&r| row_alive[r] && !rows[r].is_empty())
        .collect();
    let mut core = IntMatrix::zero(live_rows.len(), live_cols.len());
    for (i, &r) in live_rows.iter().enumerate() {
        for (c, val) in &rows[r] {
            core.set(i, col_pos[c], val.clone());
        }
    }
    let snf = smith_normal_form(&core);
    let mut factors: Vec<BigInt> = vec![BigInt::one(); eliminated.len()];
    let core_diag: Vec<BigInt> = snf
        .diagonal()
        .into_iter()
        .filter(|d| !d.is_zero())
        .collect();
    factors.extend(core_diag.iter().cloned());
    let free_rank = n_gens - factors.len();

    let v_total = v.map(|v| {
        // Compose the core's V (acting on live columns) and a final column
        // permutation so that coordinates come in the order: eliminated
        // columns (factor 1), core torsion/factors, then free columns.
        let mut big_core_v = IntMatrix::identity(n_gens);
        for (a, &ca) in live_cols.iter().enumerate() {
            for (b, &cb) in live_cols.iter().enumerate() {
                big_core_v.set(ca, cb, snf.v.get(a, b).clone());
            }
        }
        let combined = v.mul(&big_core_v);
        let mut order: Vec<usize> = Vec::with_capacity(n_gens);
        order.extend(eliminated.iter().copied());
        order.extend(live_cols.iter().copied());
        let mut permuted = IntMatrix::zero(n_gens, n_gens);
        for (new_c, &old_c) in order.iter().enumerate() {
            for r in 0..n_gens {
                permuted.set(r, new_c, combined.get(r, old_c).clone());
            }
        }
        permuted
    });
    (factors, free_rank, v_total)
}

/// A finitely generated abelian group presented by generators and integer
/// relation rows, with its canonical invariant-factor decomposition.
pub struct PresentedAbelianGroup {
    pub generator_labels: Vec<String>,
    /// Deduplicated relation rows (zero rows dropped).
    pub relations: IntMatrix,
    /// Full diagonal including factors equal to 1 (suppressed in reports).
    invariant_factors: Vec<BigInt>,
    free_rank: usize,
    /// Column transform aligning generators with the canonical coordinates.
    v: IntMatrix,
    /// Lazily computed full transforms for the stored relation matrix.
    basis_change: OnceLock<(IntMatrix, IntMatrix)>,
}

impl PresentedAbelianGroup {
    pub fn quotient(generator_labels: Vec<String>, relations: &IntMatrix) -> Self {
        let n_gens = generator_labels.len();
        assert_eq!(relations.cols(), n_gens, "relation width mismatch");
        // Deduplicate rows and drop zero rows before any reduction.
        let mut seen: BTreeRowSet = BTreeRowSet::new();
        let mut rows: Vec<Vec<(usize, BigInt)>> = Vec::new();
        let mut kept_rows: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..relations.rows() {
            let dense: Vec<BigInt> = relations.row(i).to_vec();
            if dense.iter().all(|x| x.is_zero()) {
                continue;
            }
            if seen.insert(&dense) {
                let sparse = dense
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (j, x.clone()))
                    .collect();
                rows.push(sparse);
                kept_rows.push(dense);
            }
        }
        let mut dedup = IntMatrix::zero(kept_rows.len(), n_gens);
        for (i, r) in kept_rows.into_iter().enumerate() {
            for (j, x) in r.into_iter().enumerate() {
                dedup.set(i, j, x);
            }
        }
        let (factors, free_rank, v) = reduce_presentation(n_gens, rows, true);
        PresentedAbelianGroup {
            generator_labels,
            relations: dedup,
            invariant_factors: factors,
            free_rank,
            v: v.unwrap(),
            basis_change: OnceLock::new(),
        }
    }

    pub fn n_generators(&self) -> usize {
        self.generator_labels.len()
    }

    /// All invariant factors, including the 1s.
    pub fn all_invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Invariant factors > 1, as reported.
    pub fn nontrivial_invariant_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.nontrivial_invariant_factors().is_empty()
    }

    pub fn is_free_of_rank(&self, rank: usize) -> bool {
        self.free_rank == rank && self.nontrivial_invariant_factors().is_empty()
    }

    /// The two unimodular transforms with U·relations·V = S.
    pub fn basis_change(&self) -> &(IntMatrix, IntMatrix) {
        self.basis_change.get_or_init(|| {
            let snf = smith_normal_form(&self.relations);
            (snf.u, snf.v)
        })
    }

    /// Coordinates of a generator combination in the canonical
    /// decomposition: torsion coordinates reduced mod dᵢ, free coordinates
    /// exact. Two vectors have equal images iff they differ by a relation.
    pub fn canonical_image(&self, v: &[BigInt]) -> Result<Vec<BigInt>, AlgebraError> {
        if v.len() != self.n_generators() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.n_generators(),
                got: v.len(),
            });
        }
        let n = self.n_generators();
        let mut y = vec![BigInt::zero(); n];
        for j in 0..n {
            let mut acc = BigInt::zero();
            for (i, vi) in v.iter().enumerate() {
                if !vi.is_zero() {
                    acc += vi * self.v.get(i, j);
                }
            }
            y[j] = acc;
        }
        for (j, d) in self.invariant_factors.iter().enumerate() {
            y[j] = y[j].mod_floor(d);
        }
        Ok(y)
    }

    pub fn describe(&self) -> String {
        let torsion = self.nontrivial_invariant_factors();
        if self.free_rank == 0 && torsion.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in torsion {
            parts.push(format!("Z/{d}"));
        }
        parts.join(" + ")
    }
}

/// Invariant-factor equality: same nontrivial torsion and same free rank.
pub fn is_isomorphic(a: &PresentedAbelianGroup, b: &PresentedAbelianGroup) -> bool {
    a.free_rank() == b.free_rank()
        && a.nontrivial_invariant_factors() == b.nontrivial_invariant_factors()
}

/// Invariant factors (nontrivial) and free rank of the quotient of ℤ^cols
/// by the row span, without keeping transforms. Fast path for large checks.
pub fn quotient_factors(n_gens: usize, relations: &IntMatrix) -> (Vec<BigInt>, usize) {
    assert_eq!(relations.cols(), n_gens);
    let mut seen = BTreeRowSet::new();
    let mut rows = Vec::new();
    for i in 0..relations.rows() {
        let dense = relations.row(i).to_vec();
        if dense.iter().all(|x| x.is_zero()) || !seen.insert(&dense) {
            continue;
        }
        rows.push(
            dense
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.clone()))
                .collect(),
        );
    }
    let (factors, free_rank, _) = reduce_presentation(n_gens, rows, false);
    (
        factors.into_iter().filter(|d| !d.is_one()).collect(),
        free_rank,
    )
}

/// Solves x·B = c over the integers, if a solution exists.
pub fn solve_left(b: &IntMatrix, c: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(c.len(), b.cols());
    let snf = smith_normal_form(b);
    // x·B = c  <=>  y·S = c·V with y = x·U⁻¹, i.e. x = y·U.
    let mut cv = vec![BigInt::zero(); b.cols()];
    for j in 0..b.cols() {
        let mut acc = BigInt::zero();
        for (i, ci) in c.iter().enumerate() {
            if !ci.is_zero() {
                acc += ci * snf.v.get(i, j);
            }
        }
        cv[j] = acc;
    }
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); b.rows()];
    for j in 0..b.cols() {
        let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !cv[j].is_zero() {
                return None;
            }
        } else {
            let (q, r) = cv[j].div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            y[j] = q;
        }
    }
    // x = y·U
    let mut x = vec![BigInt::zero(); b.rows()];
    for j in 0..b.rows() {
        let mut acc = BigInt::zero();
        for (i, yi) in y.iter().enumerate() {
            if !yi.is_zero() {
                acc += yi * snf.u.get(i, j);
            }
        }
        x[j] = acc;
    }
    Some(x)
}

/// Helper set for exact row deduplication.
struct BTreeRowSet {
    set: std::collections::BTreeSet<Vec<BigInt>>,
}

impl BTreeRowSet {
    fn new() -> Self {
        BTreeRowSet {
            set: std::collections::BTreeSet::new(),
        }
    }

    fn insert(&mut self, row: &[BigInt]) -> bool {
        self.set.insert(row.to_vec())
    }
}
