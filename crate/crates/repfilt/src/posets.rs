//! Equivariant decomposition posets: the partition lattice of a finite set
//! and the direct-sum decomposition poset of 𝔽_qⁿ, with fixed-point
//! analysis, weakly-fixed classification and the refinement criterion for
//! complete subgroups.

use std::collections::{BTreeSet, HashMap};

use crate::error::PosetError;
use crate::groups::PermGroup;
use crate::perm::Perm;

pub const MAX_PARTITION_POINTS: usize = 10;
pub const MAX_FIELD_SIZE: u64 = 4096;

// ---------------------------------------------------------------------------
// Partitions of a finite set.

/// A proper partition: at least two blocks, pairwise disjoint, covering
/// {0..n-1}. Blocks are sorted internally and by minimal element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    pub blocks: Vec<Vec<u16>>,
}

impl SetPartition {
    fn normalize(mut blocks: Vec<Vec<u16>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        SetPartition { blocks }
    }

    pub fn is_proper(&self) -> bool {
        self.blocks.len() > 1
    }

    /// self refines other: every block of self lies inside a block of other.
    pub fn refines(&self, other: &SetPartition) -> bool {
        self.blocks.iter().all(|b| {
            other
                .blocks
                .iter()
                .any(|c| b.iter().all(|x| c.binary_search(x).is_ok()))
        })
    }
}

// ---------------------------------------------------------------------------
// Subspaces and decompositions of 𝔽_qⁿ.

fn inv_mod(a: u64, q: u64) -> u64 {
    // Fermat; q prime.
    let mut result = 1u64;
    let mut base = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    result
}

/// Reduced-row-echelon basis over 𝔽_q; the canonical key of a subspace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    pub basis: Vec<Vec<u16>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn from_rows(q: u32, rows: &[Vec<u16>]) -> Subspace {
        Subspace {
            basis: rref(q, rows),
        }
    }

    pub fn contains(&self, q: u32, other: &Subspace) -> bool {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        rref(q, &all).len() == self.dim()
    }
}

fn rref(q: u32, rows: &[Vec<u16>]) -> Vec<Vec<u16>> {
    let q64 = q as u64;
    let mut m: Vec<Vec<u16>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inv_mod(m[rank][col] as u64, q64);
        for x in m[rank].iter_mut() {
            *x = (*x as u64 * inv % q64) as u16;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col] as u64;
                for c in 0..cols {
                    let v = (m[r][c] as u64 + (q64 - f) * m[rank][c] as u64) % q64;
                    m[r][c] = v as u16;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    m.retain(|r| r.iter().any(|&x| x != 0));
    m
}

/// A proper direct-sum decomposition of 𝔽_qⁿ: at least two non-zero
/// summands whose dimensions add to n with jointly independent bases.
/// Summands are sorted by canonical key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqDecomposition {
    pub summands: Vec<Subspace>,
}

impl FqDecomposition {
    pub fn refines(&self, q: u32, other: &FqDecomposition) -> bool {
        self.summands
            .iter()
            .all(|w| other.summands.iter().any(|v| v.contains(q, w)))
    }
}

// ---------------------------------------------------------------------------
// Posets.

pub struct Poset<T> {
    pub elements: Vec<T>,
    /// leq[i][j]: element i is finer than or equal to element j.
    pub leq: Vec<Vec<bool>>,
}

impl<T> Poset<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn has_least_element(&self) -> bool {
        (0..self.len()).any(|i| (0..self.len()).all(|j| self.leq[i][j]))
    }

    /// Antisymmetry over all pairs; reflexivity and transitivity.
    pub fn is_partial_order(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            if !self.leq[i][i] {
                return false;
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return false;
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Euler characteristic of the order complex: alternating sum over
    /// nonempty chains, computed by a(x) = 1 − Σ_{y<x} a(y), χ = Σ a(x).
    pub fn nerve_euler_characteristic(&self) -> i64 {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        let below_count: Vec<usize> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && self.leq[j][i]).count())
            .collect();
        order.sort_by_key(|&i| below_count[i]);
        let mut a = vec![0i64; n];
        for &i in &order {
            let mut acc = 1i64;
            for j in 0..n {
                if j != i && self.leq[j][i] {
                    acc -= a[j];
                }
            }
            a[i] = acc;
        }
        a.iter().sum()
    }

    pub fn sub_poset(&self, keep: &[usize]) -> Poset<T>
    where
        T: Clone,
    {
        let elements = keep.iter().map(|&i| self.elements[i].clone()).collect();
        let leq = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.leq[i][j]).collect())
            .collect();
        Poset { elements, leq }
    }
}

/// All proper partitions of {0..n-1}, ordered by refinement.
pub fn partition_lattice(n: usize) -> Result<Poset<SetPartition>, PosetError> {
    if n == 0 || n > MAX_PARTITION_POINTS {
        return Err(PosetError::SizeBound {
            context: format!("partition lattice needs 1 <= n <= {MAX_PARTITION_POINTS}, got {n}"),
        });
    }
    // Restricted-growth strings.
    let mut elements: Vec<SetPartition> = Vec::new();
    let mut assign = vec![0usize; n];
    fn rec(pos: usize, max_used: usize, assign: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        let n = assign.len();
        if pos == n {
            let blocks_count = max_used + 1;
            if blocks_count < 2 {
                return;
            }
            let mut blocks: Vec<Vec<u16>> = vec![Vec::new(); blocks_count];
            for (i, &b) in assign.iter().enumerate() {
                blocks[b].push(i as u16);
            }
            out.push(SetPartition::normalize(blocks));
            return;
        }
        for b in 0..=max_used + 1 {
            assign[pos] = b;
            rec(pos + 1, max_used.max(b), assign, out);
        }
    }
    if n >= 1 {
        assign[0] = 0;
        rec(1, 0, &mut assign, &mut elements);
    }
    elements.sort();
    let leq = elements
        .iter()
        .map(|p| elements.iter().map(|r| p.refines(r)).collect())
        .collect();
    Ok(Poset { elements, leq })
}

/// All subspaces of 𝔽_qⁿ of dimension k, via RREF pivot patterns.
pub fn subspaces_of_dim(q: u32, n: usize, k: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    // Choose pivot columns.
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // Free positions: in row i, columns after pivots[i] that are not
        // pivot columns themselves.
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in p + 1..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut counter = vec![0u16; free.len()];
        loop {
            let mut basis = vec![vec![0u16; n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                basis[i][p] = 1;
            }
            for (slot, &(i, c)) in free.iter().enumerate() {
                basis[i][c] = counter[slot];
            }
            out.push(Subspace { basis });
            // Increment base-q counter.
            let mut slot = 0;
            loop {
                if slot == counter.len() {
                    break;
                }
                counter[slot] += 1;
                if (counter[slot] as u32) < q {
                    break;
                }
                counter[slot] = 0;
                slot += 1;
            }
            if slot == counter.len() {
                break;
            }
        }
        // Next pivot combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn check_prime(q: u32) -> Result<(), PosetError> {
    let prime = q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0);
    if prime {
        Ok(())
    } else {
        Err(PosetError::NotPrime { q })
    }
}

/// All proper direct-sum decompositions of 𝔽_qⁿ, ordered by refinement.
pub fn fq_decomposition_poset(q: u32, n: usize) -> Result<Poset<FqDecomposition>, PosetError> {
    check_prime(q)?;
    if n == 0 || (q as u64).pow(n as u32) > MAX_FIELD_SIZE {
        return Err(PosetError::SizeBound {
            context: format!("q^n must be at most {MAX_FIELD_SIZE}, got {q}^{n}"),
        });
    }
    let mut by_dim: Vec<Vec<Subspace>> = vec![Vec::new(); n];
    for k in 1..n {
        by_dim[k] = subspaces_of_dim(q, n, k);
    }
    let mut elements: Vec<FqDecomposition> = Vec::new();
    // Summands chosen with strictly increasing canonical keys.
    fn rec(
        q: u32,
        n: usize,
        by_dim: &[Vec<Subspace>],
        chosen: &mut Vec<Subspace>,
        span_rows: &[Vec<u16>],
        remaining: usize,
        out: &mut Vec<FqDecomposition>,
    ) {
        if remaining == 0 {
            if chosen.len() >= 2 {
                out.push(FqDecomposition {
                    summands: chosen.clone(),
                });
            }
            return;
        }
        for k in 1..=remaining.min(n - 1) {
            for s in &by_dim[k] {
                if let Some(last) = chosen.last() {
                    if s <= last {
                        continue;
                    }
                }
                // Independence: the joined span must grow by dim(s).
                let mut rows = span_rows.to_vec();
                rows.extend(s.basis.iter().cloned());
                let joined = rref(q, &rows);
                if joined.len() != span_rows.len() + k {
                    continue;
                }
                chosen.push(s.clone());
                rec(q, n, by_dim, chosen, &joined, remaining - k, out);
                chosen.pop();
            }
        }
    }
    rec(
        q,
        n,
        &by_dim,
        &mut Vec::new(),
        &Vec::new(),
        n,
        &mut elements,
    );
    elements.sort();
    let leq = elements
        .iter()
        .map(|d| elements.iter().map(|e| d.refines(q, e)).collect())
        .collect();
    Ok(Poset { elements, leq })
}

// ---------------------------------------------------------------------------
// Group actions on posets.

/// A homomorphism into the symmetric group of the point set, given by
/// generator images and validated by a multiplication-table check.
pub struct SetAction {
    pub elem_images: Vec<Perm>,
}

/// A homomorphism into GL_n(𝔽_q), given by generator images (row-vector
/// convention: vectors act on the right).
pub struct MatAction {
    pub q: u32,
    pub elem_images: Vec<FqMat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqMat {
    pub n: usize,
    pub a: Vec<u16>,
}

impl FqMat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0u16; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        FqMat { n, a }
    }

    pub fn from_rows(rows: &[Vec<u16>]) -> Self {
        let n = rows.len();
        let mut a = vec![0u16; n * n];
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            a[i * n..(i + 1) * n].copy_from_slice(r);
        }
        FqMat { n, a }
    }

    pub fn mul(&self, other: &FqMat, q: u32) -> FqMat {
        let n = self.n;
        let q = q as u64;
        let mut a = vec![0u16; n * n];
        for i in 0..n {
            for k in 0..n {
                let v = self.a[i * n + k] as u64;
                if v != 0 {
                    for j in 0..n {
                        let cur = a[i * n + j] as u64 + v * other.a[k * n + j] as u64;
                        a[i * n + j] = (cur % q) as u16;
                    }
                }
            }
        }
        FqMat { n, a }
    }

    pub fn apply_row(&self, v: &[u16], q: u32) -> Vec<u16> {
        let n = self.n;
        let q = q as u64;
        let mut out = vec![0u16; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0 {
                for j in 0..n {
                    let cur = out[j] as u64 + vi as u64 * self.a[i * n + j] as u64;
                    out[j] = (cur % q) as u16;
                }
            }
        }
        out
    }
}

fn extend_by_words<T: Clone + PartialEq>(
    group: &PermGroup,
    gen_images: &[T],
    identity: T,
    mul: impl Fn(&T, &T) -> T,
) -> Result<Vec<T>, PosetError> {
    if gen_images.len() != group.generators().len() {
        return Err(PosetError::NotAHomomorphism(format!(
            "expected {} generator images, got {}",
            group.generators().len(),
            gen_images.len()
        )));
    }
    let order = group.order();
    let mut images = Vec::with_capacity(order);
    for e in 0..order as u16 {
        let mut acc = identity.clone();
        for &gi in group.word_of(e) {
            acc = mul(&acc, &gen_images[gi as usize]);
        }
        images.push(acc);
    }
    for a in 0..order as u16 {
        for b in 0..order as u16 {
            let ab = group.mul(a, b);
            if mul(&images[a as usize], &images[b as usize]) != images[ab as usize] {
                return Err(PosetError::NotAHomomorphism(
                    "generator images violate a product relation".into(),
                ));
            }
        }
    }
    Ok(images)
}

pub fn set_action(
    group: &PermGroup,
    gen_images: Vec<Perm>,
    points: usize,
) -> Result<SetAction, PosetError> {
    for p in &gen_images {
        if p.degree() != points {
            return Err(PosetError::NotAHomomorphism(format!(
                "image degree {} does not match {points} points",
                p.degree()
            )));
        }
    }
    let elem_images =
        extend_by_words(group, &gen_images, Perm::identity(points), |a, b| a.then(b))?;
    Ok(SetAction { elem_images })
}

pub fn mat_action(
    group: &PermGroup,
    q: u32,
    n: usize,
    gen_images: Vec<FqMat>,
) -> Result<MatAction, PosetError> {
    check_prime(q)?;
    for m in &gen_images {
        if m.n != n {
            return Err(PosetError::NotAHomomorphism("matrix size mismatch".into()));
        }
    }
    let elem_images = extend_by_words(group, &gen_images, FqMat::identity(n), |a, b| a.mul(b, q))?;
    Ok(MatAction { q, elem_images })
}

/// How the pieces of a poset element move under one acting element; the
/// image of each piece is reported by canonical key, in the original piece
/// order, so the induced permutation is visible.
pub trait PosetElementAction<T: PosetPieces> {
    fn apply_piece_keys(&self, which: usize, x: &T) -> Vec<Vec<u16>>;
    fn count(&self) -> usize;
}

impl PosetElementAction<SetPartition> for SetAction {
    fn apply_piece_keys(&self, which: usize, x: &SetPartition) -> Vec<Vec<u16>> {
        let p = &self.elem_images[which];
        x.blocks
            .iter()
            .map(|b| {
                let mut moved: Vec<u16> = b.iter().map(|&pt| p.apply(pt)).collect();
                moved.sort_unstable();
                moved
            })
            .collect()
    }

    fn count(&self) -> usize {
        self.elem_images.len()
    }
}

impl PosetElementAction<FqDecomposition> for MatAction {
    fn apply_piece_keys(&self, which: usize, x: &FqDecomposition) -> Vec<Vec<u16>> {
        let m = &self.elem_images[which];
        x.summands
            .iter()
            .map(|s| {
                let rows: Vec<Vec<u16>> = s.basis.iter().map(|r| m.apply_row(r, self.q)).collect();
                Subspace::from_rows(self.q, &rows)
                    .basis
                    .into_iter()
                    .flatten()
                    .collect()
            })
            .collect()
    }

    fn count(&self) -> usize {
        self.elem_images.len()
    }
}

/// The permutation induced on the pieces, if the piece set is preserved.
fn summand_permutation<T, A>(action: &A, which: usize, x: &T) -> Option<Vec<usize>>
where
    T: PosetPieces,
    A: PosetElementAction<T>,
{
    let pieces = x.pieces();
    let index: HashMap<&Vec<u16>, usize> = pieces.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let images = action.apply_piece_keys(which, x);
    // perm[j] = position of the image of piece j.
    let mut perm = vec![usize::MAX; pieces.len()];
    for (j, p) in images.iter().enumerate() {
        let &target = index.get(p)?;
        perm[j] = target;
    }
    let mut seen = vec![false; perm.len()];
    for &t in &perm {
        if seen[t] {
            return None;
        }
        seen[t] = true;
    }
    Some(perm)
}

/// Canonical keys of the parts of a poset element, for set-level
/// comparisons.
pub trait PosetPieces: Clone + Ord {
    fn pieces(&self) -> Vec<Vec<u16>>;
}

impl PosetPieces for SetPartition {
    fn pieces(&self) -> Vec<Vec<u16>> {
        self.blocks.clone()
    }
}

impl PosetPieces for FqDecomposition {
    fn pieces(&self) -> Vec<Vec<u16>> {
        self.summands
            .iter()
            .map(|s| s.basis.iter().flatten().copied().collect())
            .collect()
    }
}

impl SetPartition {
    /// The coarsening obtained by merging the listed block groups.
    pub fn coarsen_by_groups(&self, groups: &[Vec<usize>]) -> SetPartition {
        SetPartition::normalize(
            groups
                .iter()
                .map(|g| {
                    g.iter()
                        .flat_map(|&i| self.blocks[i].iter().copied())
                        .collect()
                })
                .collect(),
        )
    }
}

impl FqDecomposition {
    /// The coarsening obtained by joining the listed summand groups.
    pub fn join_groups(&self, q: u32, groups: &[Vec<usize>]) -> FqDecomposition {
        let mut summands: Vec<Subspace> = groups
            .iter()
            .map(|g| {
                let rows: Vec<Vec<u16>> = g
                    .iter()
                    .flat_map(|&i| self.summands[i].basis.iter().cloned())
                    .collect();
                Subspace::from_rows(q, &rows)
            })
            .collect();
        summands.sort();
        FqDecomposition { summands }
    }
}

/// Elements strongly fixed by the action: every block/summand is preserved
/// setwise individually. Returns the indices and the induced sub-poset.
pub fn fixed_subposet<T, A>(poset: &Poset<T>, action: &A) -> (Vec<usize>, Poset<T>)
where
    T: PosetPieces,
    A: PosetElementAction<T>,
{
    let keep: Vec<usize> = (0..poset.len())
        .filter(|&i| {
            (0..action.count()).all(|w| {
                summand_permutation(action, w, &poset.elements[i])
                    .map(|perm| perm.iter().enumerate().all(|(a, &b)| a == b))
                    .unwrap_or(false)
            })
        })
        .collect();
    let sub = poset.sub_poset(&keep);
    (keep, sub)
}

/// Classification of a weakly fixed element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeaklyFixedType {
    /// The action permutes the pieces with more than one orbit; the orbit
    /// coarsening into (first orbit, rest) is a strongly fixed 2-part
    /// decomposition, given by its piece-index groups.
    Type1 { two_part_groups: [Vec<usize>; 2] },
    /// The pieces form a single transitive orbit; `stabilizer` lists the
    /// acting-group element ids preserving piece 0 setwise.
    Type2 {
        stabilizer: Vec<u16>,
        summand: usize,
    },
}

/// All weakly fixed elements (piece set preserved, pieces possibly
/// permuted) with their orbit-type classification.
pub fn weakly_fixed_classes<T, A>(poset: &Poset<T>, action: &A) -> Vec<(usize, WeaklyFixedType)>
where
    T: PosetPieces,
    A: PosetElementAction<T>,
{
    let mut out = Vec::new();
    for (i, x) in poset.elements.iter().enumerate() {
        let perms: Option<Vec<Vec<usize>>> = (0..action.count())
            .map(|w| summand_permutation(action, w, x))
            .collect();
        let Some(perms) = perms else { continue };
        let k = x.pieces().len();
        // Orbits of the induced action on pieces.
        let mut orbit_of = vec![usize::MAX; k];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..k {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let mut members = BTreeSet::new();
            members.insert(start);
            let mut stack = vec![start];
            while let Some(p) = stack.pop() {
                for perm in &perms {
                    let moved = perm[p];
                    if members.insert(moved) {
                        stack.push(moved);
                    }
                }
            }
            let members: Vec<usize> = members.into_iter().collect();
            for &m in &members {
                orbit_of[m] = orbits.len();
            }
            orbits.push(members);
        }
        let class = if orbits.len() == 1 {
            let stabilizer: Vec<u16> = (0..action.count() as u16)
                .filter(|&w| perms[w as usize][0] == 0)
                .collect();
            WeaklyFixedType::Type2 {
                stabilizer,
                summand: 0,
            }
        } else {
            let first = orbits[0].clone();
            let rest: Vec<usize> = (0..k).filter(|p| !first.contains(p)).collect();
            WeaklyFixedType::Type1 {
                two_part_groups: [first, rest],
            }
        };
        out.push((i, class));
    }
    out
}

// ---------------------------------------------------------------------------
// The refinement criterion for complete subgroups of GL_n(𝔽_q).

pub struct LemmaCounterexample {
    pub decomposition: String,
    pub fixed_non_coarsening: String,
}

pub struct LemmaReport {
    pub q: u32,
    pub n: usize,
    pub decompositions: usize,
    pub forced: bool,
    pub pass: bool,
    pub counterexamples: Vec<LemmaCounterexample>,
}

fn primitive_root(q: u32) -> u16 {
    // Smallest generator of 𝔽_q^×; q prime and tiny here.
    'outer: for g in 2..q {
        let mut x = 1u64;
        for _ in 0..q - 2 {
            x = x * g as u64 % q as u64;
            if x == 1 {
                continue 'outer;
            }
        }
        return g as u16;
    }
    1
}

/// Generators of GL_k(𝔽_q) in a given basis of a summand, embedded as
/// n×n matrices acting as the identity on the complementary summands.
pub fn complete_subgroup_generators(
    q: u32,
    n: usize,
    decomposition: &FqDecomposition,
) -> Vec<FqMat> {
    // Change of basis: rows of P are the concatenated summand bases.
    let mut p_rows: Vec<Vec<u16>> = Vec::new();
    for s in &decomposition.summands {
        p_rows.extend(s.basis.iter().cloned());
    }
    let p = FqMat::from_rows(&p_rows);
    let p_inv = invert(&p, q);
    let lambda = primitive_root(q);
    let mut gens = Vec::new();
    let mut offset = 0usize;
    for s in &decomposition.summands {
        let k = s.dim();
        let mut blocks: Vec<FqMat> = Vec::new();
        // diag(λ, 1, .., 1)
        let mut d = FqMat::identity(n);
        d.a[offset * n + offset] = lambda;
        blocks.push(d);
        if k >= 2 {
            // Transvection and a k-cycle on the block coordinates.
            let mut t = FqMat::identity(n);
            t.a[offset * n + offset + 1] = 1;
            blocks.push(t);
            let mut c = FqMat::identity(n);
            for i in 0..k {
                for j in 0..k {
                    c.a[(offset + i) * n + offset + j] = 0;
                }
            }
            for i in 0..k {
                c.a[(offset + i) * n + offset + (i + 1) % k] = 1;
            }
            blocks.push(c);
        }
        for b in blocks {
            gens.push(p_inv.mul(&b, q).mul(&p, q));
        }
        offset += k;
    }
    gens
}

fn invert(m: &FqMat, q: u32) -> FqMat {
    let n = m.n;
    let q64 = q as u64;
    // Augmented Gaussian elimination.
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row: Vec<u64> = m.a[i * n..(i + 1) * n].iter().map(|&x| x as u64).collect();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0).expect("singular matrix");
        a.swap(col, pivot);
        let inv = inv_mod(a[col][col], q64);
        for x in a[col].iter_mut() {
            *x = *x * inv % q64;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..2 * n {
                    a[r][c] = (a[r][c] + (q64 - f) * a[col][c]) % q64;
                }
            }
        }
    }
    let rows: Vec<Vec<u16>> = (0..n)
        .map(|i| a[i][n..].iter().map(|&x| x as u16).collect())
        .collect();
    FqMat::from_rows(&rows)
}

fn describe_decomposition(d: &FqDecomposition) -> String {
    let parts: Vec<String> = d
        .summands
        .iter()
        .map(|s| {
            let rows: Vec<String> = s
                .basis
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
                .collect();
            format!("<{}>", rows.join(","))
        })
        .collect();
    parts.join(" ⊕ ")
}

/// Exhaustively verifies that for every decomposition D, the decompositions
/// strongly fixed by the complete subgroup ∏GL(Wᵢ) are exactly the
/// coarsenings of D. For even q this is refused unless `force` is set, in
/// which case the failures are reported.
pub fn check_refinement_lemma(q: u32, n: usize, force: bool) -> Result<LemmaReport, PosetError> {
    check_prime(q)?;
    if q == 2 && !force {
        return Err(PosetError::EvenCharacteristic { q });
    }
    let poset = fq_decomposition_poset(q, n)?;
    let mut counterexamples = Vec::new();
    for (di, d) in poset.elements.iter().enumerate() {
        let gens = complete_subgroup_generators(q, n, d);
        for (ei, e) in poset.elements.iter().enumerate() {
            let fixed = gens.iter().all(|g| {
                e.summands.iter().all(|s| {
                    let rows: Vec<Vec<u16>> = s.basis.iter().map(|r| g.apply_row(r, q)).collect();
                    Subspace::from_rows(q, &rows) == *s
                })
            });
            let coarsening = poset.leq[di][ei];
            if fixed != coarsening {
                counterexamples.push(LemmaCounterexample {
                    decomposition: describe_decomposition(d),
                    fixed_non_coarsening: describe_decomposition(e),
                });
            }
        }
    }
    Ok(LemmaReport {
        q,
        n,
        decompositions: poset.len(),
        forced: force,
        pass: counterexamples.is_empty(),
        counterexamples,
    })
}
