//! Builtin coefficient systems, each behind the `SystemBuilder` trait and
//! selected by name at runtime.
//!
//! Semisimple systems over ℂ, ℝ and ℚ are generated from exact character
//! data (integer-valued class functions, or cyclotomic integers for the
//! complex cyclic families); induction and restriction tables come from
//! exact induced-character arithmetic followed by integral decomposition.
//! Burnside systems are generated by orbit counting, and the 𝔽_p[C_p]
//! lattice family is written out directly since it is not semisimple.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::SystemError;
use crate::groups::{ElemId, PermGroup};

use super::characters::{conj_values, decompose, induce_values, ClassFn, CycCtx};
use super::{Base, ClassData, CoefficientSystem, Flags, Indecomposable, Table};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemSpec {
    Burnside,
    ComplexCyclic,
    RealCyclic,
    RationalCyclic,
    FpLattices,
    Paper(String),
    File(String),
}

/// Parses the CLI `--system` grammar: `burnside`, `complex-cyclic`,
/// `real-cyclic`, `rational-cyclic`, `fp-lattices`, `paper:<KEY>` with KEY
/// in {S3/C, S3/R, A4/Q, D5/Q, A5/Q}, or `file:<path>` (a bare `*.json`
/// path also works). A `builtin:` prefix is accepted and ignored.
pub fn parse_system_spec(s: &str) -> Result<SystemSpec, SystemError> {
    let s = s.trim();
    let s = s.strip_prefix("builtin:").unwrap_or(s);
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(SystemSpec::File(path.to_string()));
    }
    if s.ends_with(".json") {
        return Ok(SystemSpec::File(s.to_string()));
    }
    if let Some(key) = s.strip_prefix("paper:") {
        return Ok(SystemSpec::Paper(key.to_string()));
    }
    Ok(match s.replace('_', "-").as_str() {
        "burnside" => SystemSpec::Burnside,
        "complex-cyclic" => SystemSpec::ComplexCyclic,
        "real-cyclic" => SystemSpec::RealCyclic,
        "rational-cyclic" => SystemSpec::RationalCyclic,
        "fp-lattices" | "fp-lattices-cyclic" => SystemSpec::FpLattices,
        _ => return Err(SystemError::UnknownKind(s.to_string())),
    })
}

pub trait SystemBuilder: Sync + Send {
    fn id(&self) -> &'static str;
    fn matches(&self, spec: &SystemSpec) -> bool;
    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError>;
}

fn registry() -> &'static Vec<Box<dyn SystemBuilder>> {
    static REGISTRY: OnceLock<Vec<Box<dyn SystemBuilder>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut v: Vec<Box<dyn SystemBuilder>> = vec![
            Box::new(BurnsideBuilder),
            Box::new(ComplexCyclicBuilder),
            Box::new(RealCyclicBuilder),
            Box::new(RationalCyclicBuilder),
            Box::new(FpLatticesBuilder),
        ];
        for key in PAPER_KEYS {
            v.push(Box::new(PaperBuilder { key }));
        }
        v
    })
}

pub fn builder_ids() -> Vec<&'static str> {
    registry().iter().map(|b| b.id()).collect()
}

/// Builds (or loads) and validates a coefficient system for the group.
pub fn build_system(spec: &SystemSpec, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
    let sys = match spec {
        SystemSpec::File(path) => super::load_system(std::path::Path::new(path), g)?,
        _ => {
            let builder = registry()
                .iter()
                .find(|b| b.matches(spec))
                .ok_or_else(|| SystemError::UnknownKind(format!("{spec:?}")))?;
            builder.build(g)?
        }
    };
    let report = super::validate(&sys, g)?;
    if let Some(line) = report.first_failure() {
        return Err(SystemError::Structural {
            location: format!("validation of {}", sys.name),
            reason: format!("{}: {}", line.name, line.detail),
        });
    }
    Ok(sys)
}

// ---------------------------------------------------------------------------
// Character-based builders.

#[derive(Clone, Debug)]
enum CharKind {
    Const(i64),
    /// Value determined by element order.
    ByOrder(&'static [(usize, i64)]),
    /// Dimension-1 sign character with kernel the k-th order-2 subgroup
    /// (canonical order) of the class representative.
    KernelSign(usize),
    /// x = gen^a ↦ ζ_m^{(m/d)·i·a} on a cyclic representative of order d.
    CycExp(u32),
    /// ζ^{(m/d)·i·a} + ζ^{-(m/d)·i·a}.
    RealCycExp(u32),
}

fn discrete_logs(g: &PermGroup, rep: &[ElemId]) -> Option<(ElemId, Vec<usize>)> {
    let d = rep.len();
    let generator = rep.iter().copied().find(|&e| g.elem_order(e) == d)?;
    let mut dlog = vec![usize::MAX; d];
    let mut cur: ElemId = 0;
    for a in 0..d {
        let pos = rep.binary_search(&cur).ok()?;
        dlog[pos] = a;
        cur = g.mul(cur, generator);
    }
    Some((generator, dlog))
}

fn char_values(
    ctx: &CycCtx,
    g: &PermGroup,
    rep: &[ElemId],
    kind: &CharKind,
) -> Result<ClassFn, SystemError> {
    let bad = |reason: String| SystemError::Structural {
        location: "character data".into(),
        reason,
    };
    let values = match kind {
        CharKind::Const(c) => vec![ctx.int(*c); rep.len()],
        CharKind::ByOrder(map) => rep
            .iter()
            .map(|&e| {
                let o = g.elem_order(e);
                map.iter()
                    .find(|(ord, _)| *ord == o)
                    .map(|(_, v)| ctx.int(*v))
                    .ok_or_else(|| bad(format!("no character value for element order {o}")))
            })
            .collect::<Result<_, _>>()?,
        CharKind::KernelSign(k) => {
            let mut kernels: Vec<Vec<ElemId>> = rep
                .iter()
                .copied()
                .filter(|&e| g.elem_order(e) == 2)
                .map(|e| vec![0, e])
                .collect();
            kernels.sort();
            let kernel = kernels
                .get(*k)
                .ok_or_else(|| bad(format!("no {k}-th order-2 subgroup")))?;
            rep.iter()
                .map(|&e| {
                    let v = if kernel.binary_search(&e).is_ok() {
                        1
                    } else {
                        -1
                    };
                    ctx.int(v)
                })
                .collect()
        }
        CharKind::CycExp(i) => {
            let d = rep.len();
            let (_, dlog) =
                discrete_logs(g, rep).ok_or_else(|| bad("class rep is not cyclic".into()))?;
            let step = ctx.m / d;
            (0..d)
                .map(|pos| ctx.root((step * *i as usize * dlog[pos]) % ctx.m))
                .collect()
        }
        CharKind::RealCycExp(i) => {
            let d = rep.len();
            let (_, dlog) =
                discrete_logs(g, rep).ok_or_else(|| bad("class rep is not cyclic".into()))?;
            let step = ctx.m / d;
            (0..d)
                .map(|pos| {
                    let k = (step * *i as usize * dlog[pos]) % ctx.m;
                    let mut v = ctx.root(k);
                    CycCtx::add_assign(&mut v, &ctx.root((ctx.m - k) % ctx.m));
                    v
                })
                .collect()
        }
    };
    Ok(ClassFn { values })
}

/// Builds a full coefficient system from per-class indecomposable character
/// data. The first spec in each class must be the trivial character.
fn build_char_system(
    g: &PermGroup,
    name: String,
    base: Base,
    flags: Flags,
    m: usize,
    specs: &dyn Fn(usize, &str) -> Result<Vec<(String, CharKind)>, SystemError>,
) -> Result<CoefficientSystem, SystemError> {
    let ctx = CycCtx::new(m);
    let data = g.subgroup_data()?;
    let n_classes = data.classes.len();

    // Realize the character basis per class.
    let mut bases: Vec<Vec<ClassFn>> = Vec::with_capacity(n_classes);
    let mut indecs: Vec<Vec<Indecomposable>> = Vec::with_capacity(n_classes);
    for c in 0..n_classes {
        let rep = &data.classes[c].rep;
        let struct_name = g.structure_name_of(rep);
        let class_specs = specs(c, &struct_name)?;
        let mut basis = Vec::new();
        let mut inds = Vec::new();
        for (label, kind) in &class_specs {
            let f = char_values(&ctx, g, rep, kind)?;
            let dim_value = &f.values[0];
            let dim = dim_value[0];
            if dim <= 0 || dim_value[1..].iter().any(|&c| c != 0) {
                return Err(SystemError::BadCharacter {
                    label: label.clone(),
                    class: g.class_name(c),
                });
            }
            inds.push(Indecomposable {
                label: label.clone(),
                dim: dim as u32,
            });
            basis.push(f);
        }
        bases.push(basis);
        indecs.push(inds);
    }

    let mut classes: Vec<ClassData> = Vec::with_capacity(n_classes);
    for c in 0..n_classes {
        let rep = &data.classes[c].rep;
        let weyl = &data.classes[c].weyl;
        // Label permutation for each Weyl element, via a normalizer
        // representative: χ ↦ χ(n·x·n⁻¹).
        let mut rep_of = vec![None; weyl.group.order()];
        for (pos, &n) in weyl.normalizer.iter().enumerate() {
            let w = weyl.weyl_index[pos] as usize;
            rep_of[w].get_or_insert(n);
        }
        let mut weyl_perms = Vec::with_capacity(weyl.group.order());
        for n in rep_of
            .iter()
            .map(|o| o.expect("every Weyl element has a representative"))
        {
            let mut perm = vec![0u16; bases[c].len()];
            for (i, f) in bases[c].iter().enumerate() {
                let conj = conj_values(g, rep, f, n);
                let j = bases[c].iter().position(|h| *h == conj).ok_or_else(|| {
                    SystemError::BadCharacter {
                        label: indecs[c][i].label.clone(),
                        class: g.class_name(c),
                    }
                })?;
                perm[i] = j as u16;
            }
            weyl_perms.push(perm);
        }
        classes.push(ClassData {
            indecs: indecs[c].clone(),
            unit: 0,
            weyl_perms,
            res: BTreeMap::new(),
            ind: BTreeMap::new(),
        });
    }

    // Tables for every embeddable class pair, along the chosen embedding.
    for high in 0..n_classes {
        let rep_high = data.classes[high].rep.clone();
        for low in 0..n_classes {
            let Some(k0_index) = data.chosen_embedding(low, high) else {
                continue;
            };
            let k0 = data.subgroups[k0_index].clone();
            let (_, v0) = data.class_of[k0_index];
            let rep_low = data.classes[low].rep.clone();
            // Restriction: value on R_low at x is χ(v0⁻¹·x·v0).
            let mut res_table: Table = Vec::new();
            for (y, chi) in bases[high].iter().enumerate() {
                let pulled = ClassFn {
                    values: rep_low
                        .iter()
                        .map(|&x| {
                            let inside = g.conj(x, v0);
                            chi.values[rep_high.binary_search(&inside).unwrap()].clone()
                        })
                        .collect(),
                };
                let row =
                    decompose(&bases[low], &pulled).ok_or_else(|| SystemError::BadCharacter {
                        label: indecs[high][y].label.clone(),
                        class: g.class_name(low),
                    })?;
                if row.iter().any(|&x| x < 0) {
                    return Err(SystemError::BadCharacter {
                        label: indecs[high][y].label.clone(),
                        class: g.class_name(low),
                    });
                }
                res_table.push(row);
            }
            classes[high].res.insert(low, res_table);
            // Induction: transport the R_low character onto K₀, then induce.
            let mut ind_table: Table = Vec::new();
            let v0_inv = g.inv(v0);
            for (x, chi) in bases[low].iter().enumerate() {
                let on_k0 = ClassFn {
                    values: k0
                        .iter()
                        .map(|&kk| {
                            let back = g.conj(kk, v0_inv); // v0·kk·v0⁻¹
                            chi.values[rep_low.binary_search(&back).unwrap()].clone()
                        })
                        .collect(),
                };
                let induced = induce_values(&ctx, g, &k0, &on_k0, &rep_high).ok_or_else(|| {
                    SystemError::BadCharacter {
                        label: indecs[low][x].label.clone(),
                        class: g.class_name(high),
                    }
                })?;
                let row =
                    decompose(&bases[high], &induced).ok_or_else(|| SystemError::BadCharacter {
                        label: indecs[low][x].label.clone(),
                        class: g.class_name(high),
                    })?;
                if row.iter().any(|&v| v < 0) {
                    return Err(SystemError::BadCharacter {
                        label: indecs[low][x].label.clone(),
                        class: g.class_name(high),
                    });
                }
                ind_table.push(row);
            }
            classes[low].ind.insert(high, ind_table);
        }
    }

    Ok(CoefficientSystem {
        name,
        base,
        flags,
        classes,
    })
}

/// The character oracle used by tests: restriction of a stored basis
/// character along an actual inclusion, decomposed independently of the
/// table machinery. Only available for the character-generated builtins.
pub fn character_basis(g: &PermGroup, spec: &SystemSpec) -> Option<(usize, Vec<Vec<ClassFn>>)> {
    let (m, make): (
        usize,
        Box<dyn Fn(usize, &str) -> Option<Vec<(String, CharKind)>>>,
    ) = match spec {
        SystemSpec::ComplexCyclic => (g.order(), Box::new(|_c, name| complex_cyclic_specs(name))),
        SystemSpec::Paper(key) if key == "S3/C" => {
            (3, Box::new(|_c, name| paper_specs("S3/C", name)))
        }
        SystemSpec::Paper(key) => {
            let key = key.clone();
            (1, Box::new(move |_c, name| paper_specs(&key, name)))
        }
        _ => return None,
    };
    let ctx = CycCtx::new(m);
    let data = g.subgroup_data().ok()?;
    let mut out = Vec::new();
    for c in 0..data.classes.len() {
        let rep = &data.classes[c].rep;
        let specs = make(c, &g.structure_name_of(rep))?;
        let basis = specs
            .iter()
            .map(|(_, kind)| char_values(&ctx, g, rep, kind).ok())
            .collect::<Option<Vec<_>>>()?;
        out.push(basis);
    }
    Some((m, out))
}

// ---------------------------------------------------------------------------
// Cyclic families.

fn require_cyclic(g: &PermGroup, id: &str) -> Result<(), SystemError> {
    let n = g.order();
    if g.elements().iter().any(|p| p.order() == n) || n == 1 {
        Ok(())
    } else {
        Err(SystemError::GroupMismatch {
            system: id.to_string(),
            group: g.name().to_string(),
            reason: "group is not cyclic".into(),
        })
    }
}

fn require_cyclic_prime(g: &PermGroup, id: &str) -> Result<u32, SystemError> {
    require_cyclic(g, id)?;
    let p = g.order() as u32;
    let is_prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    if !is_prime {
        return Err(SystemError::GroupMismatch {
            system: id.to_string(),
            group: g.name().to_string(),
            reason: format!("order {p} is not prime"),
        });
    }
    Ok(p)
}

fn complex_cyclic_specs(struct_name: &str) -> Option<Vec<(String, CharKind)>> {
    if struct_name == "e" {
        return Some(vec![("1".into(), CharKind::Const(1))]);
    }
    let d: u32 = struct_name.strip_prefix('C')?.parse().ok()?;
    let mut specs = vec![("1".into(), CharKind::Const(1))];
    for i in 1..d {
        let label = if d == 2 {
            "-1".to_string()
        } else {
            format!("eta^{i}")
        };
        specs.push((label, CharKind::CycExp(i)));
    }
    Some(specs)
}

struct ComplexCyclicBuilder;

impl SystemBuilder for ComplexCyclicBuilder {
    fn id(&self) -> &'static str {
        "complex-cyclic"
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        *spec == SystemSpec::ComplexCyclic
    }

    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
        require_cyclic(g, self.id())?;
        let n = g.order();
        build_char_system(
            g,
            format!("complex-cyclic({n})"),
            Base::Complex,
            Flags {
                semisimple: true,
                frobenius: true,
                mackey: true,
            },
            n,
            &|c, name| {
                complex_cyclic_specs(name).ok_or_else(|| SystemError::GroupMismatch {
                    system: "complex-cyclic".into(),
                    group: format!("class {c}"),
                    reason: format!("unexpected subgroup class {name}"),
                })
            },
        )
    }
}

struct RealCyclicBuilder;

impl SystemBuilder for RealCyclicBuilder {
    fn id(&self) -> &'static str {
        "real-cyclic"
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        *spec == SystemSpec::RealCyclic
    }

    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
        let p = require_cyclic_prime(g, self.id())?;
        build_char_system(
            g,
            format!("real-cyclic({p})"),
            Base::Real,
            Flags {
                semisimple: true,
                frobenius: p == 2,
                mackey: true,
            },
            p as usize,
            &move |_, name| match name {
                "e" => Ok(vec![("1".into(), CharKind::Const(1))]),
                "C2" => Ok(vec![
                    ("1".into(), CharKind::Const(1)),
                    ("-1".into(), CharKind::ByOrder(&[(1, 1), (2, -1)])),
                ]),
                _ => {
                    let mut specs = vec![("1".into(), CharKind::Const(1))];
                    for i in 1..=(p - 1) / 2 {
                        specs.push((format!("r{i}"), CharKind::RealCycExp(i)));
                    }
                    Ok(specs)
                }
            },
        )
    }
}

struct RationalCyclicBuilder;

impl SystemBuilder for RationalCyclicBuilder {
    fn id(&self) -> &'static str {
        "rational-cyclic"
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        *spec == SystemSpec::RationalCyclic
    }

    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
        let p = require_cyclic_prime(g, self.id())?;
        let rho_label = if p == 2 { "-1" } else { "rhobar" };
        let rho_dim = (p - 1) as i64;
        build_char_system(
            g,
            format!("rational-cyclic({p})"),
            Base::Rational,
            Flags {
                semisimple: true,
                frobenius: p == 2,
                mackey: true,
            },
            1,
            &move |_, name| match name {
                "e" => Ok(vec![("1".into(), CharKind::Const(1))]),
                _ => Ok(vec![
                    ("1".into(), CharKind::Const(1)),
                    (
                        rho_label.to_string(),
                        CharKind::ByOrder(match rho_dim {
                            1 => &[(1, 1), (2, -1)],
                            2 => &[(1, 2), (3, -1)],
                            4 => &[(1, 4), (5, -1)],
                            6 => &[(1, 6), (7, -1)],
                            _ => {
                                return Err(SystemError::GroupMismatch {
                                    system: "rational-cyclic".into(),
                                    group: name.to_string(),
                                    reason: "only p in {2,3,5,7} is built in".into(),
                                })
                            }
                        }),
                    ),
                ]),
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Transcribed systems for the worked example groups.

const PAPER_KEYS: &[&str] = &["S3/C", "S3/R", "A4/Q", "D5/Q", "A5/Q"];

fn paper_specs(system: &str, struct_name: &str) -> Option<Vec<(String, CharKind)>> {
    use CharKind::*;
    let one = ("1".to_string(), Const(1));
    let minus = ("-1".to_string(), ByOrder(&[(1, 1), (2, -1)]));
    let spec: Vec<(String, CharKind)> = match (system, struct_name) {
        (_, "e") => vec![one],
        (_, "C2") => vec![one, minus],
        ("S3/C", "C3") => vec![one, ("eta".into(), CycExp(1)), ("eta^2".into(), CycExp(2))],
        (_, "C3") => vec![one, ("rhobar3".into(), ByOrder(&[(1, 2), (3, -1)]))],
        (_, "V4") => vec![
            one,
            ("phi1".into(), KernelSign(0)),
            ("phi2".into(), KernelSign(1)),
            ("phi3".into(), KernelSign(2)),
        ],
        (_, "C5") => vec![one, ("rhobar5".into(), ByOrder(&[(1, 4), (5, -1)]))],
        (_, "S3") => vec![
            one,
            ("sgn".into(), ByOrder(&[(1, 1), (2, -1), (3, 1)])),
            ("nu3".into(), ByOrder(&[(1, 2), (2, 0), (3, -1)])),
        ],
        (_, "D5") => vec![
            one,
            ("-1".into(), ByOrder(&[(1, 1), (2, -1), (5, 1)])),
            ("psi".into(), ByOrder(&[(1, 4), (2, 0), (5, -1)])),
        ],
        (_, "A4") => vec![
            one,
            ("eta".into(), ByOrder(&[(1, 2), (2, 2), (3, -1)])),
            ("nu4".into(), ByOrder(&[(1, 3), (2, -1), (3, 0)])),
        ],
        (_, "A5") => vec![
            one,
            ("nu5".into(), ByOrder(&[(1, 4), (2, 0), (3, 1), (5, -1)])),
            ("psi5".into(), ByOrder(&[(1, 5), (2, 1), (3, -1), (5, 0)])),
            (
                "lambda2nu5".into(),
                ByOrder(&[(1, 6), (2, -2), (3, 0), (5, 1)]),
            ),
        ],
        _ => return None,
    };
    // Restrict each system to the classes it actually allows.
    let allowed: &[&str] = match system {
        "S3/C" | "S3/R" => &["e", "C2", "C3", "S3"],
        "A4/Q" => &["e", "C2", "C3", "V4", "A4"],
        "D5/Q" => &["e", "C2", "C5", "D5"],
        "A5/Q" => &["e", "C2", "C3", "V4", "C5", "S3", "D5", "A4", "A5"],
        _ => return None,
    };
    if !allowed.contains(&struct_name) {
        return None;
    }
    Some(spec)
}

struct PaperBuilder {
    key: &'static str,
}

impl SystemBuilder for PaperBuilder {
    fn id(&self) -> &'static str {
        self.key
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        matches!(spec, SystemSpec::Paper(k) if k == self.key)
    }

    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
        let key = self.key;
        let base = match key.rsplit('/').next().unwrap() {
            "C" => Base::Complex,
            "R" => Base::Real,
            _ => Base::Rational,
        };
        let m = if key == "S3/C" { 3 } else { 1 };
        build_char_system(
            g,
            format!("paper:{key}"),
            base,
            Flags {
                semisimple: true,
                frobenius: key == "S3/C",
                mackey: true,
            },
            m,
            &move |c, name| {
                paper_specs(key, name).ok_or_else(|| SystemError::GroupMismatch {
                    system: format!("paper:{key}"),
                    group: format!("class {c} ({name})"),
                    reason: "group does not match this transcription".into(),
                })
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Burnside systems (finite G-sets), generated by orbit counting.

struct BurnsideBuilder;

impl SystemBuilder for BurnsideBuilder {
    fn id(&self) -> &'static str {
        "burnside"
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        *spec == SystemSpec::Burnside
    }

    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
        build_burnside(g)
    }
}

fn build_burnside(g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
    let data = g.subgroup_data()?;
    let n_classes = data.classes.len();

    struct BurnsideClass {
        /// H-conjugacy classes of subgroups of the class representative,
        /// as indices into the global subgroup list.
        h_classes: Vec<Vec<usize>>,
        class_of: std::collections::HashMap<usize, usize>,
    }

    let mut locals = Vec::with_capacity(n_classes);
    let mut classes: Vec<ClassData> = Vec::with_capacity(n_classes);
    for c in 0..n_classes {
        let rep = data.classes[c].rep.clone();
        let (h_classes, class_of) = g.subgroup_classes_within(&rep)?;
        // Labels: H/K with a structural name for K, disambiguated.
        let h_name = g.structure_name_of(&rep);
        let mut labels: Vec<String> = h_classes
            .iter()
            .map(|members| {
                format!(
                    "{}/{}",
                    h_name,
                    g.structure_name_of(&data.subgroups[members[0]])
                )
            })
            .collect();
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for l in &labels {
            *counts.entry(l.clone()).or_default() += 1;
        }
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for l in labels.iter_mut() {
            if counts[l.as_str()] > 1 {
                let k = seen.entry(l.clone()).or_default();
                *k += 1;
                *l = format!("{l}#{k}");
            }
        }
        let indecs: Vec<Indecomposable> = h_classes
            .iter()
            .zip(&labels)
            .map(|(members, label)| Indecomposable {
                label: label.clone(),
                dim: (rep.len() / data.subgroups[members[0]].len()) as u32,
            })
            .collect();
        let unit = indecs
            .iter()
            .position(|i| i.dim == 1)
            .expect("H/H always present");
        // Weyl label action: [K] ↦ [K^n].
        let weyl = &data.classes[c].weyl;
        let mut rep_of = vec![None; weyl.group.order()];
        for (pos, &n) in weyl.normalizer.iter().enumerate() {
            rep_of[weyl.weyl_index[pos] as usize].get_or_insert(n);
        }
        let weyl_perms: Vec<Vec<u16>> = rep_of
            .iter()
            .map(|n| {
                let n = n.expect("representative per Weyl element");
                h_classes
                    .iter()
                    .map(|members| {
                        let moved = g.conj_set(&data.subgroups[members[0]], n);
                        class_of[&data.index[&moved]] as u16
                    })
                    .collect()
            })
            .collect();
        locals.push(BurnsideClass {
            h_classes,
            class_of,
        });
        classes.push(ClassData {
            indecs,
            unit,
            weyl_perms,
            res: BTreeMap::new(),
            ind: BTreeMap::new(),
        });
    }

    for high in 0..n_classes {
        let rep_high = data.classes[high].rep.clone();
        for low in 0..n_classes {
            let Some(k0_index) = data.chosen_embedding(low, high) else {
                continue;
            };
            let k0 = data.subgroups[k0_index].clone();
            let (_, v0) = data.class_of[k0_index];
            let v0_inv = g.inv(v0);
            // Restriction by orbit decomposition of K₀ on H/L.
            let mut res_table: Table = Vec::new();
            for members in &locals[high].h_classes {
                let l = &data.subgroups[members[0]];
                // Left cosets xL of L in R_high.
                let mut cosets: Vec<Vec<ElemId>> = Vec::new();
                let mut seen: std::collections::BTreeSet<Vec<ElemId>> =
                    std::collections::BTreeSet::new();
                for &x in &rep_high {
                    let mut coset: Vec<ElemId> = l.iter().map(|&e| g.mul(x, e)).collect();
                    coset.sort_unstable();
                    if seen.insert(coset.clone()) {
                        cosets.push(coset);
                    }
                }
                let coset_pos: std::collections::HashMap<Vec<ElemId>, usize> = cosets
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), i))
                    .collect();
                let mut visited = vec![false; cosets.len()];
                let mut row = vec![0i64; locals[low].h_classes.len()];
                for start in 0..cosets.len() {
                    if visited[start] {
                        continue;
                    }
                    // Orbit of K₀ through this coset.
                    let mut stack = vec![start];
                    visited[start] = true;
                    while let Some(i) = stack.pop() {
                        for &k in &k0 {
                            let mut moved: Vec<ElemId> =
                                cosets[i].iter().map(|&e| g.mul(k, e)).collect();
                            moved.sort_unstable();
                            let j = coset_pos[&moved];
                            if !visited[j] {
                                visited[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                    // Stabilizer of the starting coset xL: {k : x⁻¹kx ∈ L}.
                    let x = cosets[start][0];
                    let mut stab: Vec<ElemId> = k0
                        .iter()
                        .copied()
                        .filter(|&k| l.binary_search(&g.conj(k, x)).is_ok())
                        .collect();
                    stab.sort_unstable();
                    // Transport K₀-sets back to the class representative:
                    // the stabilizer becomes v0·stab·v0⁻¹.
                    let back = g.conj_set(&stab, v0_inv);
                    let label = locals[low].class_of[&data.index[&back]];
                    row[label] += 1;
                }
                res_table.push(row);
            }
            classes[high].res.insert(low, res_table);
            // Induction: R_low/M ↦ R_high/(M^{v0}).
            let mut ind_table: Table = Vec::new();
            for members in &locals[low].h_classes {
                let m0 = &data.subgroups[members[0]];
                let moved = g.conj_set(m0, v0);
                let label = locals[high].class_of[&data.index[&moved]];
                let mut row = vec![0i64; locals[high].h_classes.len()];
                row[label] = 1;
                ind_table.push(row);
            }
            classes[low].ind.insert(high, ind_table);
        }
    }

    Ok(CoefficientSystem {
        name: format!("burnside({})", g.name()),
        base: Base::FiniteSets,
        flags: Flags {
            semisimple: true,
            frobenius: false,
            mackey: true,
        },
        classes,
    })
}

// ---------------------------------------------------------------------------
// 𝔽_p[C_p]-lattices: the one non-semisimple family, written out directly.

struct FpLatticesBuilder;

impl SystemBuilder for FpLatticesBuilder {
    fn id(&self) -> &'static str {
        "fp-lattices"
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        *spec == SystemSpec::FpLattices
    }

    fn build(&self, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
        let p = require_cyclic_prime(g, self.id())? as usize;
        let data = g.subgroup_data()?;
        assert_eq!(data.classes.len(), 2);
        // Class 0 = trivial subgroup, class 1 = C_p.
        let trivial = ClassData {
            indecs: vec![Indecomposable {
                label: "1".into(),
                dim: 1,
            }],
            unit: 0,
            weyl_perms: vec![vec![0]; p],
            res: BTreeMap::from([(0, vec![vec![1]])]),
            ind: BTreeMap::from([
                (0, vec![vec![1]]),
                (
                    1,
                    vec![{
                        let mut row = vec![0i64; p];
                        row[p - 1] = 1; // Ind_e[1] = V_p, the regular lattice
                        row
                    }],
                ),
            ]),
        };
        let mut res_to_trivial: Table = Vec::new();
        for i in 1..=p {
            res_to_trivial.push(vec![i as i64]); // Res V_i = i·[1]
        }
        let identity: Table = (0..p)
            .map(|i| {
                let mut row = vec![0i64; p];
                row[i] = 1;
                row
            })
            .collect();
        let top = ClassData {
            indecs: (1..=p)
                .map(|i| Indecomposable {
                    label: format!("V{i}"),
                    dim: i as u32,
                })
                .collect(),
            unit: 0,
            weyl_perms: vec![(0..p as u16).collect()],
            res: BTreeMap::from([(0, res_to_trivial), (1, identity.clone())]),
            ind: BTreeMap::from([(1, identity)]),
        };
        Ok(CoefficientSystem {
            name: format!("fp-lattices({p})"),
            base: Base::FpLattices(p as u32),
            flags: Flags {
                semisimple: false,
                frobenius: false,
                mackey: true,
            },
            classes: vec![trivial, top],
        })
    }
}
