//! Evaluation of the modified rank filtration and the complexity filtration
//! on the zeroth homotopy level, for any validated coefficient system.
//!
//! Stage n of the rank filtration is presented by generator symbols
//! Tr(H, W) — one per conjugacy/Weyl orbit of pairs of a subgroup class H
//! and an object class W at H of total dimension between 1 and n — with two
//! relation families:
//!   (a) Tr_H(W ⊕ W') − Tr_H(W) − Tr_H(W') while dim W + dim W' ≤ n,
//!   (b) Tr_H(Ind_K^H W') − Tr_K(W') while [H:K]·dim W' ≤ n,
//! enumerated over one representative per conjugacy class of chains K ≤ H.
//!
//! Stage n of the complexity filtration is the quotient of the object group
//! at the full group by Ind_H^G(W) − dim(W)·Ind_H^G(1) for every subgroup
//! class H and object W at H with dim W ≤ n.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::coeffsys::{ind_matrix, weyl_canonical, CoefficientSystem, Table};
use crate::error::{FiltrationError, SystemError};
use crate::exactalg::{is_isomorphic, quotient_factors, IntMatrix, PresentedAbelianGroup};
use crate::groups::PermGroup;

/// Bound on the number of generator symbols per stage.
pub const SYMBOL_CAP: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FiltrationKind {
    Rank,
    Complexity,
}

impl FiltrationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FiltrationKind::Rank => "rank",
            FiltrationKind::Complexity => "complexity",
        }
    }
}

/// A generator symbol Tr(H, W): subgroup class plus Weyl-canonical multiset.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub class: usize,
    pub multiset: Vec<u32>,
}

pub struct FiltrationStage {
    pub kind: FiltrationKind,
    pub n: u32,
    pub group_name: String,
    pub system_name: String,
    pub presentation: PresentedAbelianGroup,
    pub directory: Vec<Symbol>,
    pub relations_count: usize,
    /// Generators × Rep(G)-indecomposables: Tr(H, W) ↦ Ind_H^G(W). For the
    /// complexity filtration this is the identity on Rep(G).
    pub map_to_rep: IntMatrix,
}

impl FiltrationStage {
    pub fn summary(&self) -> String {
        format!(
            "{} stage {} of {} at {}: {}",
            self.kind.as_str(),
            self.n,
            self.system_name,
            self.group_name,
            self.presentation.describe()
        )
    }
}

/// All multisets over the given dimensions with total dimension in
/// [1, max_dim], in lexicographic order.
fn enumerate_multisets(
    dims: &[u32],
    max_dim: u64,
    cap: usize,
) -> Result<Vec<Vec<u32>>, FiltrationError> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dims.len()];
    fn rec(
        dims: &[u32],
        pos: usize,
        remaining: u64,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
    ) -> Result<(), FiltrationError> {
        if pos == dims.len() {
            if current.iter().any(|&m| m > 0) {
                if out.len() >= cap {
                    return Err(FiltrationError::StageTooLarge {
                        symbols: out.len() + 1,
                        bound: cap,
                    });
                }
                out.push(current.clone());
            }
            return Ok(());
        }
        let step = dims[pos] as u64;
        let max_count = remaining / step;
        for m in 0..=max_count {
            current[pos] = m as u32;
            rec(dims, pos + 1, remaining - m * step, current, out, cap)?;
        }
        current[pos] = 0;
        Ok(())
    }
    rec(dims, 0, max_dim, &mut current, &mut out, cap)?;
    Ok(out)
}

fn class_dims(sys: &CoefficientSystem, class: usize) -> Vec<u32> {
    sys.classes[class].indecs.iter().map(|i| i.dim).collect()
}

/// Symbol labels in the report format, e.g. `tr_{C2}^{S3}([1]+[-1])` or
/// `[nu3]` for symbols at the full group.
fn symbol_label(sys: &CoefficientSystem, g: &PermGroup, s: &Symbol) -> String {
    let top = sys.classes.len() - 1;
    let body = sys.format_multiset(s.class, &s.multiset);
    if s.class == top {
        body
    } else {
        format!(
            "tr_{{{}}}^{{{}}}({})",
            g.class_name(s.class),
            g.name(),
            body
        )
    }
}

struct RelationBuild {
    rows: Vec<Vec<i64>>,
}

fn sparse_row(index: &BTreeMap<Symbol, usize>, terms: &[(Symbol, i64)], width: usize) -> Vec<i64> {
    let mut row = vec![0i64; width];
    for (sym, coeff) in terms {
        let i = *index.get(sym).expect("symbol outside the directory");
        row[i] += coeff;
    }
    row
}

/// The n-th stage of the modified rank filtration.
pub fn rank_pi0(
    sys: &CoefficientSystem,
    g: &PermGroup,
    n: u32,
) -> Result<FiltrationStage, FiltrationError> {
    crate::coeffsys::check_alignment(sys, g)?;
    let data = g.subgroup_data()?;
    let top = sys.classes.len() - 1;
    let rep_labels: Vec<String> = sys.classes[top]
        .indecs
        .iter()
        .map(|i| i.label.clone())
        .collect();

    if n == 0 {
        return Ok(FiltrationStage {
            kind: FiltrationKind::Rank,
            n,
            group_name: g.name().to_string(),
            system_name: sys.name.clone(),
            presentation: PresentedAbelianGroup::quotient(Vec::new(), &IntMatrix::zero(0, 0)),
            directory: Vec::new(),
            relations_count: 0,
            map_to_rep: IntMatrix::zero(0, rep_labels.len()),
        });
    }

    // Generator symbols: Weyl-canonical multisets of dimension <= n.
    let mut directory: BTreeSet<Symbol> = BTreeSet::new();
    for c in 0..sys.classes.len() {
        for multiset in enumerate_multisets(&class_dims(sys, c), n as u64, SYMBOL_CAP)? {
            directory.insert(Symbol {
                class: c,
                multiset: weyl_canonical(sys, c, &multiset),
            });
            if directory.len() > SYMBOL_CAP {
                return Err(FiltrationError::StageTooLarge {
                    symbols: directory.len(),
                    bound: SYMBOL_CAP,
                });
            }
        }
    }
    let directory: Vec<Symbol> = directory.into_iter().collect();
    let index: BTreeMap<Symbol, usize> = directory
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let width = directory.len();

    // Relations, generated per class in parallel, then canonically ordered.
    let build_class = |c: usize| -> Result<RelationBuild, FiltrationError> {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let dims = class_dims(sys, c);
        // (a) additivity: W' indecomposable, W any multiset.
        for (i, &di) in dims.iter().enumerate() {
            if (di as u64) >= n as u64 {
                continue;
            }
            let budget = n as u64 - di as u64;
            for w in enumerate_multisets(&dims, budget, SYMBOL_CAP)? {
                let mut sum = w.clone();
                sum[i] += 1;
                let canon = |m: &[u32]| Symbol {
                    class: c,
                    multiset: weyl_canonical(sys, c, m),
                };
                let mut single = vec![0u32; dims.len()];
                single[i] = 1;
                rows.push(sparse_row(
                    &index,
                    &[(canon(&sum), 1), (canon(&w), -1), (canon(&single), -1)],
                    width,
                ));
            }
        }
        // (b) induction: one representative chain per conjugacy class of
        // chains K < H, with K drawn from the normalizer orbits.
        let rep_h = &data.classes[c].rep;
        let (chains, _) = g.subgroup_orbits(rep_h, &data.classes[c].weyl.normalizer)?;
        for chain in &chains {
            let k = &data.subgroups[chain[0]];
            if k.len() == rep_h.len() {
                continue;
            }
            let chain_index = (rep_h.len() / k.len()) as u64;
            let (c_low, _) = g.class_and_witness(k)?;
            let low_dims = class_dims(sys, c_low);
            let ind = ind_matrix(sys, g, k, rep_h).map_err(FiltrationError::System)?;
            let max_dim = n as u64 / chain_index;
            if max_dim == 0 {
                continue;
            }
            for w in enumerate_multisets(&low_dims, max_dim, SYMBOL_CAP)? {
                let induced = apply_table_i64(&w, &ind);
                rows.push(sparse_row(
                    &index,
                    &[
                        (
                            Symbol {
                                class: c,
                                multiset: weyl_canonical(sys, c, &induced),
                            },
                            1,
                        ),
                        (
                            Symbol {
                                class: c_low,
                                multiset: weyl_canonical(sys, c_low, &w),
                            },
                            -1,
                        ),
                    ],
                    width,
                ));
            }
        }
        Ok(RelationBuild { rows })
    };
    let built: Result<Vec<RelationBuild>, FiltrationError> = (0..sys.classes.len())
        .into_par_iter()
        .map(build_class)
        .collect();
    let built = built?;
    let mut rows: Vec<Vec<i64>> = built.into_iter().flat_map(|b| b.rows).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let relations = IntMatrix::from_rows(width, &rows);

    // Augmentation to the object group at G.
    let whole = &data.classes[top].rep;
    let mut ind_to_top: Vec<Table> = Vec::with_capacity(sys.classes.len());
    for c in 0..sys.classes.len() {
        ind_to_top.push(
            ind_matrix(sys, g, &data.classes[c].rep, whole).map_err(FiltrationError::System)?,
        );
    }
    let mut map_to_rep = IntMatrix::zero(width, rep_labels.len());
    for (i, s) in directory.iter().enumerate() {
        let image = apply_table_i64(&s.multiset, &ind_to_top[s.class]);
        for (j, &v) in image.iter().enumerate() {
            map_to_rep.set(i, j, BigInt::from(v as i64));
        }
    }
    // Well-definedness: every relation row dies under the augmentation.
    let product = relations.mul(&map_to_rep);
    if !product.is_zero() {
        return Err(FiltrationError::System(SystemError::Structural {
            location: format!("rank stage {n} of {}", sys.name),
            reason: "a relation row does not vanish under the map to the object group".into(),
        }));
    }

    let labels: Vec<String> = directory.iter().map(|s| symbol_label(sys, g, s)).collect();
    let presentation = PresentedAbelianGroup::quotient(labels, &relations);
    Ok(FiltrationStage {
        kind: FiltrationKind::Rank,
        n,
        group_name: g.name().to_string(),
        system_name: sys.name.clone(),
        relations_count: presentation.relations.rows(),
        presentation,
        directory,
        map_to_rep,
    })
}

fn apply_table_i64(x: &[u32], table: &Table) -> Vec<u32> {
    let cols = table.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![0i64; cols];
    for (i, &m) in x.iter().enumerate() {
        if m != 0 {
            for (j, &c) in table[i].iter().enumerate() {
                out[j] += m as i64 * c;
            }
        }
    }
    out.into_iter().map(|v| v as u32).collect()
}

/// The n-th stage of the complexity filtration: a canonical quotient of the
/// object group at the full group. Composite object classes contribute the
/// sum of their indecomposables' relations, so only indecomposable W are
/// emitted.
pub fn complexity_pi0(
    sys: &CoefficientSystem,
    g: &PermGroup,
    n: u32,
) -> Result<FiltrationStage, FiltrationError> {
    crate::coeffsys::check_alignment(sys, g)?;
    let data = g.subgroup_data()?;
    let top = sys.classes.len() - 1;
    let whole = &data.classes[top].rep;
    let n_rep = sys.classes[top].indecs.len();

    let mut rows: Vec<Vec<i64>> = Vec::new();
    for c in 0..sys.classes.len() {
        let ind =
            ind_matrix(sys, g, &data.classes[c].rep, whole).map_err(FiltrationError::System)?;
        let unit = sys.classes[c].unit;
        for (i, indec) in sys.classes[c].indecs.iter().enumerate() {
            if indec.dim as u64 > n as u64 || i == unit {
                continue;
            }
            let mut row = vec![0i64; n_rep];
            for (j, &v) in ind[i].iter().enumerate() {
                row[j] += v;
            }
            for (j, &v) in ind[unit].iter().enumerate() {
                row[j] -= indec.dim as i64 * v;
            }
            rows.push(row);
        }
    }
    rows.sort_unstable();
    rows.dedup();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let relations = IntMatrix::from_rows(n_rep, &rows);
    let labels: Vec<String> = sys.classes[top]
        .indecs
        .iter()
        .map(|i| format!("[{}]", i.label))
        .collect();
    let directory: Vec<Symbol> = (0..n_rep)
        .map(|i| Symbol {
            class: top,
            multiset: {
                let mut m = vec![0u32; n_rep];
                m[i] = 1;
                m
            },
        })
        .collect();
    let presentation = PresentedAbelianGroup::quotient(labels, &relations);
    Ok(FiltrationStage {
        kind: FiltrationKind::Complexity,
        n,
        group_name: g.name().to_string(),
        system_name: sys.name.clone(),
        relations_count: presentation.relations.rows(),
        presentation,
        directory,
        map_to_rep: IntMatrix::identity(n_rep),
    })
}

/// The free basis of the n-th cofiber: all conjugacy/Weyl orbits of pairs
/// (H, W) with W indecomposable of dimension exactly n at H and not
/// isomorphic to any induction from a proper subgroup.
pub fn cofiber_pi0_basis(
    sys: &CoefficientSystem,
    g: &PermGroup,
    n: u32,
) -> Result<Vec<Symbol>, FiltrationError> {
    if !sys.flags.semisimple {
        return Err(FiltrationError::System(SystemError::NotSemisimple));
    }
    crate::coeffsys::check_alignment(sys, g)?;
    let data = g.subgroup_data()?;
    let mut out = Vec::new();
    for c in 0..sys.classes.len() {
        let rep_h = &data.classes[c].rep;
        // Canonical multisets of every induced object of dimension n.
        let mut induced_set: BTreeSet<Vec<u32>> = BTreeSet::new();
        let (chains, _) = g.subgroup_orbits(rep_h, &data.classes[c].weyl.normalizer)?;
        for chain in &chains {
            let k = &data.subgroups[chain[0]];
            if k.len() == rep_h.len() {
                continue;
            }
            let chain_index = (rep_h.len() / k.len()) as u64;
            if n as u64 % chain_index != 0 {
                continue;
            }
            let (c_low, _) = g.class_and_witness(k)?;
            let ind = ind_matrix(sys, g, k, rep_h).map_err(FiltrationError::System)?;
            let target = n as u64 / chain_index;
            for w in enumerate_multisets(&class_dims(sys, c_low), target, SYMBOL_CAP)? {
                let dim: u64 = w
                    .iter()
                    .zip(&sys.classes[c_low].indecs)
                    .map(|(&m, i)| m as u64 * i.dim as u64)
                    .sum();
                if dim != target {
                    continue;
                }
                induced_set.insert(weyl_canonical(sys, c, &apply_table_i64(&w, &ind)));
            }
        }
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        for (i, indec) in sys.classes[c].indecs.iter().enumerate() {
            if indec.dim as u64 != n as u64 {
                continue;
            }
            let mut single = vec![0u32; sys.classes[c].indecs.len()];
            single[i] = 1;
            let canon = weyl_canonical(sys, c, &single);
            if !seen.insert(canon.clone()) {
                continue; // Weyl-conjugate to an earlier indecomposable
            }
            if !induced_set.contains(&canon) {
                out.push(Symbol {
                    class: c,
                    multiset: canon,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Matrix of the canonical map from stage n to stage m >= n of the same
/// filtration: each generator symbol persists.
pub fn connecting_map(
    a: &FiltrationStage,
    b: &FiltrationStage,
) -> Result<IntMatrix, FiltrationError> {
    if a.kind != b.kind
        || a.group_name != b.group_name
        || a.system_name != b.system_name
        || b.n < a.n
    {
        return Err(FiltrationError::MismatchedStages(format!(
            "({} n={} of {}) -> ({} n={} of {})",
            a.kind.as_str(),
            a.n,
            a.system_name,
            b.kind.as_str(),
            b.n,
            b.system_name
        )));
    }
    let index: BTreeMap<&Symbol, usize> = b
        .directory
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut m = IntMatrix::zero(a.directory.len(), b.directory.len());
    for (i, s) in a.directory.iter().enumerate() {
        let j = index.get(s).ok_or_else(|| {
            FiltrationError::MismatchedStages(format!(
                "generator of stage {} missing from stage {}",
                a.n, b.n
            ))
        })?;
        m.set(i, *j, BigInt::from(1));
    }
    Ok(m)
}

/// Invariant factors and free rank of the cokernel of the connecting map.
pub fn connecting_cokernel(
    a: &FiltrationStage,
    b: &FiltrationStage,
) -> Result<(Vec<BigInt>, usize), FiltrationError> {
    let m = connecting_map(a, b)?;
    let stacked = stack(&b.presentation.relations, &m);
    Ok(quotient_factors(
        b.directory.len().max(b.presentation.n_generators()),
        &stacked,
    ))
}

fn stack(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    assert_eq!(a.cols(), b.cols());
    let mut out = IntMatrix::zero(a.rows() + b.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, a.get(i, j).clone());
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out.set(a.rows() + i, j, b.get(i, j).clone());
        }
    }
    out
}

/// Whether the canonical map between two consecutive stages is an
/// isomorphism: a surjection between abstractly isomorphic finitely
/// generated abelian groups is an isomorphism.
pub fn connecting_is_isomorphism(
    a: &FiltrationStage,
    b: &FiltrationStage,
) -> Result<bool, FiltrationError> {
    if !is_isomorphic(&a.presentation, &b.presentation) {
        return Ok(false);
    }
    let (torsion, free) = connecting_cokernel(a, b)?;
    Ok(torsion.is_empty() && free == 0)
}

/// Whether the augmentation Tr(H,W) ↦ Ind_H^G(W) is an isomorphism onto the
/// object group at G.
pub fn augmentation_is_isomorphism(stage: &FiltrationStage) -> bool {
    let rep_rank = stage.map_to_rep.cols();
    if !stage.presentation.is_free_of_rank(rep_rank) {
        return false;
    }
    let (torsion, free) = quotient_factors(rep_rank, &stage.map_to_rep);
    torsion.is_empty() && free == 0
}

pub struct StabilizationCertificate {
    pub stage: u32,
    /// All connecting maps and (for the rank filtration) augmentations were
    /// verified to be isomorphisms from `stage` through this bound.
    pub checked_through: u32,
}

/// Smallest n₀ ≤ |G| such that every stage from n₀ through |G| maps
/// isomorphically onward (and, for the rank filtration, isomorphically to
/// the object group at G).
pub fn stabilization_stage(
    sys: &CoefficientSystem,
    g: &PermGroup,
    kind: FiltrationKind,
) -> Result<StabilizationCertificate, FiltrationError> {
    let bound = g.order() as u32;
    let mut stages = Vec::with_capacity(bound as usize + 1);
    for n in 0..=bound {
        stages.push(match kind {
            FiltrationKind::Rank => rank_pi0(sys, g, n)?,
            FiltrationKind::Complexity => complexity_pi0(sys, g, n)?,
        });
    }
    let mut ok = vec![true; bound as usize + 1];
    for n in 0..=bound as usize {
        if kind == FiltrationKind::Rank && !augmentation_is_isomorphism(&stages[n]) {
            ok[n] = false;
        }
        if n < bound as usize && !connecting_is_isomorphism(&stages[n], &stages[n + 1])? {
            ok[n] = false;
        }
    }
    // Smallest n₀ with ok[n] for all n in [n₀, bound].
    let mut n0: Option<u32> = None;
    for n in (0..=bound as usize).rev() {
        if ok[n] {
            n0 = Some(n as u32);
        } else {
            break;
        }
    }
    n0.map(|stage| StabilizationCertificate {
        stage,
        checked_through: bound,
    })
    .ok_or(FiltrationError::NoStabilization {
        bound: bound as usize,
    })
}

/// Cheap estimate of the directory size of a rank stage, used to decide
/// whether a stabilization certificate is affordable.
pub fn estimate_rank_symbols(sys: &CoefficientSystem, n: u32) -> u64 {
    let mut total: u64 = 0;
    for c in 0..sys.classes.len() {
        let dims = class_dims(sys, c);
        // Count multisets by dynamic programming on the total dimension.
        let mut counts = vec![0u64; n as usize + 1];
        counts[0] = 1;
        for &d in &dims {
            for t in d as usize..=n as usize {
                counts[t] = counts[t].saturating_add(counts[t - d as usize]);
            }
        }
        total = total.saturating_add(counts.iter().sum::<u64>() - 1);
    }
    total
}
