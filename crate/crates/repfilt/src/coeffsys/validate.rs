//! Coefficient-system validation: structure, dimension rules, transitivity
//! of restriction/induction, Frobenius transposes, the Mackey double-coset
//! identity, and coherence of the Weyl label actions.

use crate::error::SystemError;
use crate::groups::{ElemId, PermGroup};

use super::{conj_label_perm, ind_matrix, res_matrix, CoefficientSystem, Table};

#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckLine>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn pass(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed: true,
            detail: detail.into(),
        });
    }

    fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed: false,
            detail: detail.into(),
        });
    }

    fn record(&mut self, name: impl Into<String>, outcome: Result<String, String>) {
        match outcome {
            Ok(d) => self.pass(name, d),
            Err(d) => self.fail(name, d),
        }
    }

    pub fn first_failure(&self) -> Option<&CheckLine> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn table_mul(a: &Table, b: &Table) -> Table {
    let rows = a.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![vec![0i64; cols]; rows];
    for i in 0..rows {
        for (k, &av) in a[i].iter().enumerate() {
            if av != 0 {
                for (j, &bv) in b[k].iter().enumerate() {
                    out[i][j] += av * bv;
                }
            }
        }
    }
    out
}

fn table_add(a: &mut Table, b: &Table) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
}

fn perm_to_table(perm: &[u16]) -> Table {
    let n = perm.len();
    let mut t = vec![vec![0i64; n]; n];
    for (i, &j) in perm.iter().enumerate() {
        t[i][j as usize] = 1;
    }
    t
}

/// Runs every checkable invariant of the system over the given group.
/// Structural problems (missing tables, shape mismatches) are hard errors;
/// identity checks are collected into the report with the first
/// counterexample in the detail column.
pub fn validate(sys: &CoefficientSystem, g: &PermGroup) -> Result<ValidationReport, SystemError> {
    super::check_alignment(sys, g)?;
    let data = g.subgroup_data()?;
    let mut report = ValidationReport::default();

    // Structure: labels, dims, units, table presence and shapes.
    for (c, class) in sys.classes.iter().enumerate() {
        let loc = || format!("class {} ({})", c, g.class_name(c));
        let mut labels: Vec<&str> = class.indecs.iter().map(|i| i.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != class.indecs.len() {
            return Err(SystemError::Structural {
                location: loc(),
                reason: "duplicate indecomposable labels".into(),
            });
        }
        if class.indecs.iter().any(|i| i.dim == 0) {
            return Err(SystemError::Structural {
                location: loc(),
                reason: "indecomposable of dimension 0".into(),
            });
        }
        let unit = class
            .indecs
            .get(class.unit)
            .ok_or_else(|| SystemError::Structural {
                location: loc(),
                reason: "unit index out of range".into(),
            })?;
        if unit.dim != 1 {
            return Err(SystemError::MissingUnit {
                class: g.class_name(c),
            });
        }
        for perm in &class.weyl_perms {
            if perm.len() != class.indecs.len() {
                return Err(SystemError::Structural {
                    location: loc(),
                    reason: "Weyl permutation of wrong length".into(),
                });
            }
            let mut seen = vec![false; perm.len()];
            for &p in perm {
                if p as usize >= perm.len() || seen[p as usize] {
                    return Err(SystemError::Structural {
                        location: loc(),
                        reason: "Weyl entry is not a permutation".into(),
                    });
                }
                seen[p as usize] = true;
            }
            for (i, &p) in perm.iter().enumerate() {
                if class.indecs[i].dim != class.indecs[p as usize].dim {
                    return Err(SystemError::Structural {
                        location: loc(),
                        reason: "Weyl permutation does not preserve dimensions".into(),
                    });
                }
            }
        }
        // Tables exist exactly for the subconjugate class pairs.
        for high in 0..sys.classes.len() {
            let embeddable = data.chosen_embedding(c, high).is_some();
            let have_ind = class.ind.contains_key(&high);
            let have_res = sys.classes[high].res.contains_key(&c);
            if embeddable && (!have_ind || !have_res) {
                return Err(SystemError::MissingTable {
                    low: g.class_name(c),
                    high: g.class_name(high),
                });
            }
            if !embeddable && (have_ind || have_res) {
                return Err(SystemError::Structural {
                    location: loc(),
                    reason: format!(
                        "table present for non-embeddable pair ({}, {})",
                        g.class_name(c),
                        g.class_name(high)
                    ),
                });
            }
            if embeddable {
                let ind = &class.ind[&high];
                let res = &sys.classes[high].res[&c];
                if ind.len() != class.indecs.len()
                    || ind
                        .iter()
                        .any(|r| r.len() != sys.classes[high].indecs.len())
                    || res.len() != sys.classes[high].indecs.len()
                    || res.iter().any(|r| r.len() != class.indecs.len())
                {
                    return Err(SystemError::Structural {
                        location: loc(),
                        reason: format!("table shape mismatch toward {}", g.class_name(high)),
                    });
                }
                if ind
                    .iter()
                    .chain(res.iter())
                    .any(|r| r.iter().any(|&x| x < 0))
                {
                    return Err(SystemError::Structural {
                        location: loc(),
                        reason: "negative multiplicity in a stored table".into(),
                    });
                }
            }
        }
    }
    report.pass("structure", "labels, units, Weyl shapes, table presence");

    // Dimension rules on stored tables.
    let mut outcome: Result<String, String> = Ok("dim(Res X)=dim X, dim(Ind X)=[H:K]·dim X".into());
    'dims: for (high, class_high) in sys.classes.iter().enumerate() {
        for (&low, res) in &class_high.res {
            let k0 = data.chosen_embedding(low, high).unwrap();
            let index = (data.classes[high].order / data.subgroups[k0].len()) as i64;
            for (y, row) in res.iter().enumerate() {
                let d: i64 = row
                    .iter()
                    .zip(&sys.classes[low].indecs)
                    .map(|(&m, i)| m * i.dim as i64)
                    .sum();
                if d != class_high.indecs[y].dim as i64 {
                    outcome = Err(format!(
                        "Res {} -> {}: row {} has dimension {} instead of {}",
                        g.class_name(high),
                        g.class_name(low),
                        class_high.indecs[y].label,
                        d,
                        class_high.indecs[y].dim
                    ));
                    break 'dims;
                }
            }
            let ind = &sys.classes[low].ind[&high];
            for (x, row) in ind.iter().enumerate() {
                let d: i64 = row
                    .iter()
                    .zip(&class_high.indecs)
                    .map(|(&m, i)| m * i.dim as i64)
                    .sum();
                let expect = index * sys.classes[low].indecs[x].dim as i64;
                if d != expect {
                    outcome = Err(format!(
                        "Ind {} -> {}: row {} has dimension {} instead of {}",
                        g.class_name(low),
                        g.class_name(high),
                        sys.classes[low].indecs[x].label,
                        d,
                        expect
                    ));
                    break 'dims;
                }
            }
        }
    }
    report.record("dimension-rules", outcome);

    // Units restrict to units, and Weyl actions fix the unit.
    let mut outcome: Result<String, String> = Ok("unit behaves as the trivial object".into());
    'units: for (high, class_high) in sys.classes.iter().enumerate() {
        for (&low, res) in &class_high.res {
            let row = &res[class_high.unit];
            for (j, &m) in row.iter().enumerate() {
                let want = if j == sys.classes[low].unit { 1 } else { 0 };
                if m != want {
                    outcome = Err(format!(
                        "Res {} -> {} of the unit is not the unit",
                        g.class_name(high),
                        g.class_name(low)
                    ));
                    break 'units;
                }
            }
        }
        for perm in &class_high.weyl_perms {
            if perm[class_high.unit] as usize != class_high.unit {
                outcome = Err(format!(
                    "Weyl action moves the unit at {}",
                    g.class_name(high)
                ));
                break 'units;
            }
        }
    }
    report.record("unit-object", outcome);

    // Weyl label action is a genuine right action of the Weyl group.
    let mut outcome: Result<String, String> = Ok("label action is a right W-action".into());
    'weyl: for (c, class) in sys.classes.iter().enumerate() {
        let weyl = &data.classes[c].weyl;
        // One normalizer representative per Weyl element.
        let mut rep_of = vec![None; weyl.group.order()];
        for (pos, &n) in weyl.normalizer.iter().enumerate() {
            let w = weyl.weyl_index[pos] as usize;
            if rep_of[w].is_none() {
                rep_of[w] = Some(n);
            }
        }
        let perm_of = |n: ElemId| -> &Vec<u16> {
            let idx = g.weyl_index_of(c, n).unwrap();
            &class.weyl_perms[idx]
        };
        for &n1 in rep_of.iter().flatten() {
            for &n2 in rep_of.iter().flatten() {
                let composite = perm_of(g.mul(n1, n2));
                let p1 = perm_of(n1);
                let p2 = perm_of(n2);
                let applied: Vec<u16> = (0..p1.len()).map(|i| p2[p1[i] as usize]).collect();
                if *composite != applied {
                    outcome = Err(format!(
                        "action property fails at {} for a pair of Weyl elements",
                        g.class_name(c)
                    ));
                    break 'weyl;
                }
            }
        }
        // The identity coset acts trivially.
        let id_perm = perm_of(0);
        if id_perm.iter().enumerate().any(|(i, &j)| i as u16 != j) {
            outcome = Err(format!("identity acts nontrivially at {}", g.class_name(c)));
            break 'weyl;
        }
    }
    report.record("weyl-action", outcome);

    // Transitivity along all nested chains of actual subgroups inside each
    // class representative; exercised through the transport machinery, so
    // this also validates embedding reachability and Weyl coherence.
    let mut outcome: Result<String, String> = Ok("Res and Ind are transitive along chains".into());
    'trans: for high in 0..sys.classes.len() {
        let rep = &data.classes[high].rep;
        let inside: Vec<&Vec<ElemId>> = data
            .subgroups
            .iter()
            .filter(|s| s.iter().all(|e| rep.binary_search(e).is_ok()))
            .collect();
        for mid in &inside {
            for low in &inside {
                if low.len() >= mid.len() || !low.iter().all(|e| mid.binary_search(e).is_ok()) {
                    continue;
                }
                let res_high_mid = res_matrix(sys, g, mid, rep).map_err(|e| e.to_string());
                let res_mid_low = res_matrix(sys, g, low, mid).map_err(|e| e.to_string());
                let res_high_low = res_matrix(sys, g, low, rep).map_err(|e| e.to_string());
                let (a, b, c) = match (res_high_mid, res_mid_low, res_high_low) {
                    (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                    (e1, e2, e3) => {
                        outcome = Err(format!(
                            "transport failed inside {}: {:?} {:?} {:?}",
                            g.class_name(high),
                            e1.err(),
                            e2.err(),
                            e3.err()
                        ));
                        break 'trans;
                    }
                };
                if table_mul(&a, &b) != c {
                    outcome = Err(format!(
                        "Res transitivity fails for a chain inside {}",
                        g.class_name(high)
                    ));
                    break 'trans;
                }
                let ind_low_mid = ind_matrix(sys, g, low, mid).unwrap();
                let ind_mid_high = ind_matrix(sys, g, mid, rep).unwrap();
                let ind_low_high = ind_matrix(sys, g, low, rep).unwrap();
                if table_mul(&ind_low_mid, &ind_mid_high) != ind_low_high {
                    outcome = Err(format!(
                        "Ind transitivity fails for a chain inside {}",
                        g.class_name(high)
                    ));
                    break 'trans;
                }
            }
        }
    }
    report.record("transitivity", outcome);

    // Induction to the whole group is invariant under the Weyl action on
    // the source labels.
    let top = sys.classes.len() - 1;
    let mut outcome: Result<String, String> = Ok("Ind to G absorbs the Weyl action".into());
    'winv: for c in 0..sys.classes.len() {
        let ind = &sys.classes[c].ind[&top];
        for perm in &sys.classes[c].weyl_perms {
            let permuted = table_mul(&perm_to_table(perm), ind);
            if permuted != *ind {
                outcome = Err(format!(
                    "Ind {} -> G changes under a Weyl element",
                    g.class_name(c)
                ));
                break 'winv;
            }
        }
    }
    report.record("weyl-invariance-of-induction", outcome);

    // Frobenius: induction is the transpose of restriction (when flagged).
    if sys.flags.frobenius {
        let mut outcome: Result<String, String> = Ok("Ind = Resᵀ on all stored tables".into());
        'frob: for (high, class_high) in sys.classes.iter().enumerate() {
            for (&low, res) in &class_high.res {
                let ind = &sys.classes[low].ind[&high];
                for y in 0..res.len() {
                    for x in 0..res[y].len() {
                        if res[y][x] != ind[x][y] {
                            outcome = Err(format!(
                                "transpose fails for pair ({}, {})",
                                g.class_name(low),
                                g.class_name(high)
                            ));
                            break 'frob;
                        }
                    }
                }
            }
        }
        report.record("frobenius-transpose", outcome);
    }

    // Mackey double coset formula at the top level (when flagged):
    // Res_K ∘ Ind_H = Σ_{KgH} Ind_{K∩gHg⁻¹ ≤ K} ∘ conj(g⁻¹) ∘ Res_{(K∩gHg⁻¹)^g ≤ H}.
    if sys.flags.mackey {
        let mut outcome: Result<String, String> = Ok("double coset formula holds at G".into());
        let whole: Vec<ElemId> = (0..g.order() as ElemId).collect();
        'mackey: for ck in 0..sys.classes.len() {
            for ch in 0..sys.classes.len() {
                let k = &data.classes[ck].rep;
                let h = &data.classes[ch].rep;
                let lhs = table_mul(
                    &ind_matrix(sys, g, h, &whole).unwrap(),
                    &res_matrix(sys, g, k, &whole).unwrap(),
                );
                let mut rhs =
                    vec![vec![0i64; sys.classes[ck].indecs.len()]; sys.classes[ch].indecs.len()];
                for dc in g.double_cosets(k, h) {
                    let i = dc.intersection;
                    let a = g.conj_set(&i, dc.rep);
                    let res_part = res_matrix(sys, g, &a, h).unwrap();
                    let conj_part =
                        perm_to_table(&conj_label_perm(sys, g, &a, g.inv(dc.rep)).unwrap());
                    let ind_part = ind_matrix(sys, g, &i, k).unwrap();
                    let term = table_mul(&table_mul(&res_part, &conj_part), &ind_part);
                    table_add(&mut rhs, &term);
                }
                if lhs != rhs {
                    outcome = Err(format!(
                        "Res_{} ∘ Ind_{} disagrees with the double-coset sum",
                        g.class_name(ck),
                        g.class_name(ch)
                    ));
                    break 'mackey;
                }
            }
        }
        report.record("mackey-double-coset", outcome);
    }

    Ok(report)
}
