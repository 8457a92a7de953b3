//! Coefficient systems: per subgroup class, a list of indecomposable
//! objects with dimensions, plus restriction, induction and Weyl-conjugation
//! tables.
//!
//! Tables are stored for one chosen embedding per pair of subgroup classes;
//! every other inclusion of actual subgroups is reached by composing with
//! conjugation witnesses and the stored Weyl label actions.

pub mod builders;
pub mod characters;
mod io;
mod validate;

pub use io::{load_system, save_system, system_to_canonical_json};
pub use validate::{validate, CheckLine, ValidationReport};

use std::collections::BTreeMap;

use crate::error::SystemError;
use crate::groups::{ElemId, PermGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Complex,
    Real,
    Rational,
    FpLattices(u32),
    FiniteSets,
}

impl Base {
    pub fn as_str(&self) -> String {
        match self {
            Base::Complex => "complex".into(),
            Base::Real => "real".into(),
            Base::Rational => "rational".into(),
            Base::FpLattices(p) => format!("fp:{p}"),
            Base::FiniteSets => "finite-sets".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Base, SystemError> {
        Ok(match s {
            "complex" => Base::Complex,
            "real" => Base::Real,
            "rational" => Base::Rational,
            "finite-sets" => Base::FiniteSets,
            _ => {
                if let Some(p) = s.strip_prefix("fp:") {
                    Base::FpLattices(p.parse().map_err(|_| SystemError::UnknownKind(s.into()))?)
                } else {
                    return Err(SystemError::UnknownKind(s.into()));
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub semisimple: bool,
    pub frobenius: bool,
    pub mackey: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indecomposable {
    pub label: String,
    pub dim: u32,
}

/// Integer multiplicity table; rows are source indecomposables, columns
/// target indecomposables.
pub type Table = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassData {
    pub indecs: Vec<Indecomposable>,
    /// Index of the dimension-1 trivial object.
    pub unit: usize,
    /// Label permutation per Weyl-group element (aligned with the canonical
    /// element order of `weyl_group`).
    pub weyl_perms: Vec<Vec<u16>>,
    /// Restriction tables to lower classes, keyed by the target class id.
    pub res: BTreeMap<usize, Table>,
    /// Induction tables to higher classes, keyed by the target class id.
    pub ind: BTreeMap<usize, Table>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSystem {
    pub name: String,
    pub base: Base,
    pub flags: Flags,
    /// Aligned with the subgroup classes of the group the system is for.
    pub classes: Vec<ClassData>,
}

/// A formal direct sum of indecomposables at one subgroup class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectClass {
    pub class: usize,
    pub multiset: Vec<u32>,
}

impl ObjectClass {
    pub fn dim(&self, sys: &CoefficientSystem) -> u64 {
        self.multiset
            .iter()
            .zip(&sys.classes[self.class].indecs)
            .map(|(&m, ind)| m as u64 * ind.dim as u64)
            .sum()
    }

    pub fn indecomposable(class: usize, index: usize, width: usize) -> Self {
        let mut multiset = vec![0u32; width];
        multiset[index] = 1;
        ObjectClass { class, multiset }
    }
}

impl CoefficientSystem {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn unit_object(&self, class: usize) -> ObjectClass {
        ObjectClass::indecomposable(
            class,
            self.classes[class].unit,
            self.classes[class].indecs.len(),
        )
    }

    pub fn label(&self, class: usize, index: usize) -> &str {
        &self.classes[class].indecs[index].label
    }

    /// Formats a multiset as a readable sum, e.g. `[1]+2[nu3]`.
    pub fn format_multiset(&self, class: usize, multiset: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, &m) in multiset.iter().enumerate() {
            if m == 1 {
                parts.push(format!("[{}]", self.label(class, i)));
            } else if m > 1 {
                parts.push(format!("{m}[{}]", self.label(class, i)));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

fn apply_label_perm_i64(perm: &[u16], v: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; v.len()];
    for (i, &x) in v.iter().enumerate() {
        out[perm[i] as usize] = x;
    }
    out
}

pub fn apply_label_perm_u32(perm: &[u16], v: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; v.len()];
    for (i, &x) in v.iter().enumerate() {
        out[perm[i] as usize] = x;
    }
    out
}

/// Lexicographically minimal representative of the Weyl orbit of a
/// multiset; the canonical form used for generator symbols.
pub fn weyl_canonical(sys: &CoefficientSystem, class: usize, multiset: &[u32]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    for perm in &sys.classes[class].weyl_perms {
        let cand = apply_label_perm_u32(perm, multiset);
        if best.as_ref().map(|b| cand < *b).unwrap_or(true) {
            best = Some(cand);
        }
    }
    best.unwrap_or_else(|| multiset.to_vec())
}

/// The label permutation attached to a normalizer element of the class
/// representative.
fn weyl_perm_of<'a>(
    sys: &'a CoefficientSystem,
    g: &PermGroup,
    class: usize,
    n: ElemId,
) -> Result<&'a [u16], SystemError> {
    let idx = g
        .weyl_index_of(class, n)
        .ok_or_else(|| SystemError::Structural {
            location: format!("class {class}"),
            reason: "element is not in the normalizer of the class representative".into(),
        })?;
    sys.classes[class]
        .weyl_perms
        .get(idx)
        .map(|p| p.as_slice())
        .ok_or_else(|| SystemError::Structural {
            location: format!("class {class}"),
            reason: format!("missing Weyl permutation #{idx}"),
        })
}

struct EmbeddingData {
    c_low: usize,
    c_high: usize,
    /// π_low(u)·M·π_high(n⁻¹) data for restriction, and the elements for
    /// the induction direction.
    n: ElemId,
    v0: ElemId,
    w_s: ElemId,
    w_t: ElemId,
}

fn resolve_embedding(
    g: &PermGroup,
    sub: &[ElemId],
    sup: &[ElemId],
) -> Result<EmbeddingData, SystemError> {
    let data = g.subgroup_data()?;
    let (c_low, w_s) = g.class_and_witness(sub)?;
    let (c_high, w_t) = g.class_and_witness(sup)?;
    let k0_index =
        data.chosen_embedding(c_low, c_high)
            .ok_or_else(|| SystemError::MissingTable {
                low: g.class_name(c_low),
                high: g.class_name(c_high),
            })?;
    let k0 = &data.subgroups[k0_index];
    let (_, v0) = data.class_of[k0_index];
    let s1 = g.conj_set(sub, g.inv(w_t));
    let weyl = &data.classes[c_high].weyl;
    let n = weyl
        .normalizer
        .iter()
        .copied()
        .find(|&n| g.conj_set(k0, n) == s1)
        .ok_or_else(|| SystemError::UnreachableEmbedding {
            low: g.class_name(c_low),
            high: g.class_name(c_high),
        })?;
    Ok(EmbeddingData {
        c_low,
        c_high,
        n,
        v0,
        w_s,
        w_t,
    })
}

/// Restriction matrix along an inclusion of actual subgroups, expressed in
/// class labels. Rows are indecomposables of `sup`'s class, columns
/// indecomposables of `sub`'s class.
pub fn res_matrix(
    sys: &CoefficientSystem,
    g: &PermGroup,
    sub: &[ElemId],
    sup: &[ElemId],
) -> Result<Table, SystemError> {
    let e = resolve_embedding(g, sub, sup)?;
    let stored =
        sys.classes[e.c_high]
            .res
            .get(&e.c_low)
            .ok_or_else(|| SystemError::MissingTable {
                low: g.class_name(e.c_low),
                high: g.class_name(e.c_high),
            })?;
    // u = v0·n·w_t·w_s⁻¹ normalizes the low representative.
    let u = g.mul(g.mul(g.mul(e.v0, e.n), e.w_t), g.inv(e.w_s));
    let p_low = weyl_perm_of(sys, g, e.c_low, u)?.to_vec();
    let p_high = weyl_perm_of(sys, g, e.c_high, g.inv(e.n))?.to_vec();
    let rows = sys.classes[e.c_high].indecs.len();
    let cols = sys.classes[e.c_low].indecs.len();
    let mut out = vec![vec![0i64; cols]; rows];
    for y in 0..rows {
        let src = &stored[p_high[y] as usize];
        out[y] = apply_label_perm_i64(&p_low, src);
    }
    Ok(out)
}

/// Induction matrix along an inclusion of actual subgroups, in class
/// labels. Rows are indecomposables of `sub`'s class, columns of `sup`'s.
pub fn ind_matrix(
    sys: &CoefficientSystem,
    g: &PermGroup,
    sub: &[ElemId],
    sup: &[ElemId],
) -> Result<Table, SystemError> {
    let e = resolve_embedding(g, sub, sup)?;
    let stored =
        sys.classes[e.c_low]
            .ind
            .get(&e.c_high)
            .ok_or_else(|| SystemError::MissingTable {
                low: g.class_name(e.c_low),
                high: g.class_name(e.c_high),
            })?;
    // m = w_s·w_t⁻¹·n⁻¹·v0⁻¹ normalizes the low representative.
    let m = g.mul(g.mul(g.mul(e.w_s, g.inv(e.w_t)), g.inv(e.n)), g.inv(e.v0));
    let p_low = weyl_perm_of(sys, g, e.c_low, m)?.to_vec();
    let p_high = weyl_perm_of(sys, g, e.c_high, e.n)?.to_vec();
    let rows = sys.classes[e.c_low].indecs.len();
    let cols = sys.classes[e.c_high].indecs.len();
    let mut out = vec![vec![0i64; cols]; rows];
    for x in 0..rows {
        let src = &stored[p_low[x] as usize];
        out[x] = apply_label_perm_i64(&p_high, src);
    }
    Ok(out)
}

/// The label permutation of the conjugation isomorphism from objects of
/// `s` to objects of `s^gid` (same class).
pub fn conj_label_perm(
    sys: &CoefficientSystem,
    g: &PermGroup,
    s: &[ElemId],
    gid: ElemId,
) -> Result<Vec<u16>, SystemError> {
    let (c, w_s) = g.class_and_witness(s)?;
    let target = g.conj_set(s, gid);
    let (c2, w_target) = g.class_and_witness(&target)?;
    debug_assert_eq!(c, c2);
    let m = g.mul(g.mul(w_s, gid), g.inv(w_target));
    Ok(weyl_perm_of(sys, g, c, m)?.to_vec())
}

fn apply_table(x: &[u32], table: &Table) -> Result<Vec<u32>, SystemError> {
    let cols = table.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![0i64; cols];
    for (i, &m) in x.iter().enumerate() {
        if m != 0 {
            for (j, &c) in table[i].iter().enumerate() {
                out[j] += m as i64 * c;
            }
        }
    }
    out.into_iter()
        .map(|v| {
            u32::try_from(v).map_err(|_| SystemError::Structural {
                location: "table application".into(),
                reason: "negative multiplicity".into(),
            })
        })
        .collect()
}

/// Linear extension of the restriction tables: `x` lives at the class of
/// `sup`, the result at the class of `sub`. Dimension is preserved.
pub fn restrict(
    sys: &CoefficientSystem,
    g: &PermGroup,
    sub: &[ElemId],
    sup: &[ElemId],
    x: &ObjectClass,
) -> Result<ObjectClass, SystemError> {
    let m = res_matrix(sys, g, sub, sup)?;
    let (c_low, _) = g.class_and_witness(sub)?;
    Ok(ObjectClass {
        class: c_low,
        multiset: apply_table(&x.multiset, &m)?,
    })
}

/// Linear extension of the induction tables: `x` lives at the class of
/// `sub`, the result at the class of `sup`. Dimension is multiplied by the
/// index.
pub fn induce(
    sys: &CoefficientSystem,
    g: &PermGroup,
    sub: &[ElemId],
    sup: &[ElemId],
    x: &ObjectClass,
) -> Result<ObjectClass, SystemError> {
    let m = ind_matrix(sys, g, sub, sup)?;
    let (c_high, _) = g.class_and_witness(sup)?;
    Ok(ObjectClass {
        class: c_high,
        multiset: apply_table(&x.multiset, &m)?,
    })
}

/// Checks that the system's class list is aligned with the group.
pub fn check_alignment(sys: &CoefficientSystem, g: &PermGroup) -> Result<(), SystemError> {
    let data = g.subgroup_data()?;
    if data.classes.len() != sys.classes.len() {
        return Err(SystemError::GroupMismatch {
            system: sys.name.clone(),
            group: g.name().to_string(),
            reason: format!(
                "system has {} subgroup classes, group has {}",
                sys.classes.len(),
                data.classes.len()
            ),
        });
    }
    for (i, class) in data.classes.iter().enumerate() {
        if sys.classes[i].weyl_perms.len() != class.weyl.group.order() {
            return Err(SystemError::Structural {
                location: format!("class {} ({})", i, g.class_name(i)),
                reason: format!(
                    "expected {} Weyl permutations, found {}",
                    class.weyl.group.order(),
                    sys.classes[i].weyl_perms.len()
                ),
            });
        }
    }
    Ok(())
}
