//! Coefficient-system integration tests: builtin tables against the known
//! induction/restriction formulas, the mark homomorphism for Burnside
//! systems, validation fault injection, and file round-trips.

use repfilt::coeffsys::builders::{build_system, parse_system_spec, SystemSpec};
use repfilt::coeffsys::{
    induce, load_system, restrict, save_system, system_to_canonical_json, validate,
    CoefficientSystem, ObjectClass,
};
use repfilt::groups::{ElemId, PermGroup};

fn group(spec: &str) -> PermGroup {
    repfilt::groups::parse_group_spec(spec).unwrap()
}

fn system(sys: &str, g: &PermGroup) -> CoefficientSystem {
    build_system(&parse_system_spec(sys).unwrap(), g).unwrap()
}

fn class_by_name(g: &PermGroup, name: &str) -> usize {
    let data = g.subgroup_data().unwrap();
    (0..data.classes.len())
        .find(|&c| g.class_name(c) == name)
        .unwrap_or_else(|| panic!("no class named {name}"))
}

fn label_index(sys: &CoefficientSystem, class: usize, label: &str) -> usize {
    sys.classes[class]
        .indecs
        .iter()
        .position(|i| i.label == label)
        .unwrap_or_else(|| panic!("no label {label} in class {class}"))
}

fn object(sys: &CoefficientSystem, class: usize, parts: &[(&str, u32)]) -> ObjectClass {
    let mut multiset = vec![0u32; sys.classes[class].indecs.len()];
    for (label, mult) in parts {
        multiset[label_index(sys, class, label)] += mult;
    }
    ObjectClass { class, multiset }
}

fn rep_of<'g>(g: &'g PermGroup, class: usize) -> &'g [ElemId] {
    &g.subgroup_data().unwrap().classes[class].rep
}

#[test]
fn s3_complex_induction_formulas() {
    let g = group("S3");
    let sys = system("paper:S3/C", &g);
    let e = class_by_name(&g, "e");
    let c2 = class_by_name(&g, "C2");
    let c3 = class_by_name(&g, "C3");
    let s3 = class_by_name(&g, "S3");
    let whole = rep_of(&g, s3);
    let cases: Vec<(usize, ObjectClass, ObjectClass)> = vec![
        (
            c2,
            object(&sys, c2, &[("1", 1)]),
            object(&sys, s3, &[("1", 1), ("nu3", 1)]),
        ),
        (
            c2,
            object(&sys, c2, &[("-1", 1)]),
            object(&sys, s3, &[("sgn", 1), ("nu3", 1)]),
        ),
        (
            c3,
            object(&sys, c3, &[("1", 1)]),
            object(&sys, s3, &[("1", 1), ("sgn", 1)]),
        ),
        (
            c3,
            object(&sys, c3, &[("eta", 1)]),
            object(&sys, s3, &[("nu3", 1)]),
        ),
        (
            c3,
            object(&sys, c3, &[("eta^2", 1)]),
            object(&sys, s3, &[("nu3", 1)]),
        ),
        (
            e,
            object(&sys, e, &[("1", 1)]),
            object(&sys, s3, &[("1", 1), ("sgn", 1), ("nu3", 2)]),
        ),
    ];
    for (from, x, want) in cases {
        let got = induce(&sys, &g, rep_of(&g, from), whole, &x).unwrap();
        assert_eq!(got, want, "induction from class {from}");
    }
    // Within-chain inductions.
    let got = induce(
        &sys,
        &g,
        rep_of(&g, e),
        rep_of(&g, c2),
        &object(&sys, e, &[("1", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, c2, &[("1", 1), ("-1", 1)]));
    // Induction along an identity inclusion is the identity.
    let x = object(&sys, c3, &[("eta", 1)]);
    assert_eq!(
        induce(&sys, &g, rep_of(&g, c3), rep_of(&g, c3), &x).unwrap(),
        x
    );
}

#[test]
fn s3_complex_restriction_formulas() {
    let g = group("S3");
    let sys = system("paper:S3/C", &g);
    let c2 = class_by_name(&g, "C2");
    let c3 = class_by_name(&g, "C3");
    let s3 = class_by_name(&g, "S3");
    let whole = rep_of(&g, s3);
    // Res_{C3}(nu3) = eta + eta^2 (Frobenius transpose of the stated
    // induction, cross-checked by the character engine in the oracle test).
    let got = restrict(
        &sys,
        &g,
        rep_of(&g, c3),
        whole,
        &object(&sys, s3, &[("nu3", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, c3, &[("eta", 1), ("eta^2", 1)]));
    let got = restrict(
        &sys,
        &g,
        rep_of(&g, c2),
        whole,
        &object(&sys, s3, &[("nu3", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, c2, &[("1", 1), ("-1", 1)]));
    let got = restrict(
        &sys,
        &g,
        rep_of(&g, c2),
        whole,
        &object(&sys, s3, &[("sgn", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, c2, &[("-1", 1)]));
}

#[test]
fn s3_real_induction_of_the_two_dimensional_rep() {
    let g = group("S3");
    let sys = system("paper:S3/R", &g);
    let c3 = class_by_name(&g, "C3");
    let s3 = class_by_name(&g, "S3");
    let got = induce(
        &sys,
        &g,
        rep_of(&g, c3),
        rep_of(&g, s3),
        &object(&sys, c3, &[("rhobar3", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, s3, &[("nu3", 2)]));
}

#[test]
fn a5_rational_induction_formulas() {
    let g = group("A5");
    let sys = system("paper:A5/Q", &g);
    let a4 = class_by_name(&g, "A4");
    let s3 = class_by_name(&g, "S3");
    let d5 = class_by_name(&g, "D5");
    let a5 = class_by_name(&g, "A5");
    let whole = rep_of(&g, a5);
    let cases: Vec<(usize, &str, Vec<(&str, u32)>)> = vec![
        (a4, "1", vec![("1", 1), ("nu5", 1)]),
        (a4, "eta", vec![("psi5", 2)]),
        (a4, "nu4", vec![("nu5", 1), ("psi5", 1), ("lambda2nu5", 1)]),
        (s3, "1", vec![("1", 1), ("nu5", 1), ("psi5", 1)]),
        (s3, "sgn", vec![("nu5", 1), ("lambda2nu5", 1)]),
        (s3, "nu3", vec![("nu5", 1), ("psi5", 2), ("lambda2nu5", 1)]),
        (d5, "1", vec![("1", 1), ("psi5", 1)]),
        (d5, "-1", vec![("lambda2nu5", 1)]),
        (d5, "psi", vec![("nu5", 2), ("psi5", 2), ("lambda2nu5", 1)]),
    ];
    for (from, label, want) in cases {
        let got = induce(
            &sys,
            &g,
            rep_of(&g, from),
            whole,
            &object(&sys, from, &[(label, 1)]),
        )
        .unwrap();
        assert_eq!(
            got,
            object(&sys, a5, &want),
            "Ind of {label} from class {from}"
        );
    }
}

#[test]
fn a4_rational_induction_formulas() {
    let g = group("A4");
    let sys = system("paper:A4/Q", &g);
    let v4 = class_by_name(&g, "V4");
    let a4 = class_by_name(&g, "A4");
    let whole = rep_of(&g, a4);
    let got = induce(
        &sys,
        &g,
        rep_of(&g, v4),
        whole,
        &object(&sys, v4, &[("1", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, a4, &[("1", 1), ("eta", 1)]));
    for phi in ["phi1", "phi2", "phi3"] {
        let got = induce(
            &sys,
            &g,
            rep_of(&g, v4),
            whole,
            &object(&sys, v4, &[(phi, 1)]),
        )
        .unwrap();
        assert_eq!(got, object(&sys, a4, &[("nu4", 1)]), "Ind of {phi}");
    }
}

#[test]
fn d5_rational_induction_formulas() {
    let g = group("D5");
    let sys = system("paper:D5/Q", &g);
    let c2 = class_by_name(&g, "C2");
    let c5 = class_by_name(&g, "C5");
    let d5 = class_by_name(&g, "D5");
    let whole = rep_of(&g, d5);
    let got = induce(
        &sys,
        &g,
        rep_of(&g, c2),
        whole,
        &object(&sys, c2, &[("1", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, d5, &[("1", 1), ("psi", 1)]));
    let got = induce(
        &sys,
        &g,
        rep_of(&g, c2),
        whole,
        &object(&sys, c2, &[("-1", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, d5, &[("-1", 1), ("psi", 1)]));
    let got = induce(
        &sys,
        &g,
        rep_of(&g, c5),
        whole,
        &object(&sys, c5, &[("rhobar5", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, d5, &[("psi", 2)]));
}

#[test]
fn fp_lattices_tables() {
    for p in [2usize, 3, 5] {
        let g = group(&format!("C{p}"));
        let sys = system("fp-lattices", &g);
        let e = 0usize;
        let top = 1usize;
        let got = induce(
            &sys,
            &g,
            rep_of(&g, e),
            rep_of(&g, top),
            &object(&sys, e, &[("1", 1)]),
        )
        .unwrap();
        assert_eq!(got, object(&sys, top, &[(&format!("V{p}"), 1)]));
        for i in 1..=p {
            let x = object(&sys, top, &[(&format!("V{i}"), 1)]);
            let got = restrict(&sys, &g, rep_of(&g, e), rep_of(&g, top), &x).unwrap();
            assert_eq!(got.multiset, vec![i as u32]);
        }
    }
}

#[test]
fn complex_cyclic_regular_representation() {
    for n in [2usize, 3, 4, 5, 6] {
        let g = group(&format!("C{n}"));
        let sys = system("complex-cyclic", &g);
        let data = g.subgroup_data().unwrap();
        let top = data.classes.len() - 1;
        let e = 0usize;
        let got = induce(
            &sys,
            &g,
            rep_of(&g, e),
            rep_of(&g, top),
            &object(&sys, e, &[("1", 1)]),
        )
        .unwrap();
        // Regular representation: every character exactly once.
        assert!(got.multiset.iter().all(|&m| m == 1));
        assert_eq!(got.dim(&sys) as usize, n);
    }
}

#[test]
fn rational_cyclic_tables() {
    for p in [3usize, 5] {
        let g = group(&format!("C{p}"));
        let sys = system("rational-cyclic", &g);
        let got = induce(
            &sys,
            &g,
            rep_of(&g, 0),
            rep_of(&g, 1),
            &object(&sys, 0, &[("1", 1)]),
        )
        .unwrap();
        assert_eq!(got, object(&sys, 1, &[("1", 1), ("rhobar", 1)]));
    }
}

#[test]
fn burnside_restriction_by_orbit_decomposition() {
    let g = group("S3");
    let sys = system("burnside", &g);
    let c2 = class_by_name(&g, "C2");
    let c3 = class_by_name(&g, "C3");
    let s3 = class_by_name(&g, "S3");
    // Res_{C2}(S3/C3) = C2/e: the two cosets are swapped.
    let s3_mod_c3 = object(&sys, s3, &[("S3/C3", 1)]);
    let got = restrict(&sys, &g, rep_of(&g, c2), rep_of(&g, s3), &s3_mod_c3).unwrap();
    let unit_e = label_index(&sys, c2, "C2/e");
    assert_eq!(got.multiset[unit_e], 1);
    assert_eq!(got.dim(&sys), 2);
    assert_eq!(got.multiset.iter().sum::<u32>(), 1);
    // Ind_{C3}(C3/e) = S3/e.
    let got = induce(
        &sys,
        &g,
        rep_of(&g, c3),
        rep_of(&g, s3),
        &object(&sys, c3, &[("C3/e", 1)]),
    )
    .unwrap();
    assert_eq!(got, object(&sys, s3, &[("S3/e", 1)]));
}

#[test]
fn burnside_marks_match_direct_fixed_point_counts() {
    // For each transitive H-set H/K and each subgroup L of H, the
    // multiplicity of the unit in Res_L(H/K) equals |(H/K)^L| counted
    // directly on cosets.
    for spec in ["S3", "A4", "C12", "D5"] {
        let g = group(spec);
        let sys = system("burnside", &g);
        let data = g.subgroup_data().unwrap();
        for c in 0..data.classes.len() {
            let rep = data.classes[c].rep.clone();
            let inside: Vec<Vec<ElemId>> = data
                .subgroups
                .iter()
                .filter(|s| s.iter().all(|e| rep.binary_search(e).is_ok()))
                .cloned()
                .collect();
            let (h_classes, _) = g.subgroup_classes_within(&rep).unwrap();
            for l in &inside {
                let res = repfilt::coeffsys::res_matrix(&sys, &g, l, &rep).unwrap();
                let (cl, _) = g.class_and_witness(l).unwrap();
                let unit = sys.classes[cl].unit;
                for (label, members) in h_classes.iter().enumerate() {
                    let k = &data.subgroups[members[0]];
                    // Direct fixed-point count on cosets xK.
                    let mut cosets: std::collections::BTreeSet<Vec<ElemId>> =
                        std::collections::BTreeSet::new();
                    for &x in &rep {
                        let mut coset: Vec<ElemId> = k.iter().map(|&e| g.mul(x, e)).collect();
                        coset.sort_unstable();
                        cosets.insert(coset);
                    }
                    let fixed = cosets
                        .iter()
                        .filter(|coset| {
                            l.iter().all(|&ll| {
                                let mut moved: Vec<ElemId> =
                                    coset.iter().map(|&e| g.mul(ll, e)).collect();
                                moved.sort_unstable();
                                moved == **coset
                            })
                        })
                        .count() as i64;
                    assert_eq!(
                        res[label][unit], fixed,
                        "marks mismatch in {spec}, class {c}, label {label}"
                    );
                }
            }
        }
    }
}

#[test]
fn weyl_orbits_fuse_conjugate_labels() {
    let g = group("S3");
    let sys = system("paper:S3/C", &g);
    let c3 = class_by_name(&g, "C3");
    // eta and eta^2 lie in one Weyl orbit.
    let eta = label_index(&sys, c3, "eta");
    let eta2 = label_index(&sys, c3, "eta^2");
    assert!(sys.classes[c3]
        .weyl_perms
        .iter()
        .any(|p| p[eta] as usize == eta2));
    let mut m = vec![0u32; 3];
    m[eta] = 1;
    let canon = repfilt::coeffsys::weyl_canonical(&sys, c3, &m);
    let mut m2 = vec![0u32; 3];
    m2[eta2] = 1;
    assert_eq!(canon, repfilt::coeffsys::weyl_canonical(&sys, c3, &m2));
}

#[test]
fn corrupted_induction_row_fails_validation() {
    let g = group("S3");
    let mut sys = system("paper:S3/C", &g);
    let c3 = class_by_name(&g, "C3");
    let s3 = class_by_name(&g, "S3");
    // Corrupt Ind_{C3}^{S3}(eta): claim it is [1]+[sgn] instead of [nu3].
    let eta = label_index(&sys, c3, "eta");
    let table = sys.classes[c3].ind.get_mut(&s3).unwrap();
    table[eta] = vec![1, 1, 0];
    let report = validate(&sys, &g).unwrap();
    assert!(!report.ok());
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    assert!(
        failed.contains(&"transitivity")
            || failed.contains(&"frobenius-transpose")
            || failed.contains(&"mackey-double-coset"),
        "corruption not caught: {failed:?}"
    );
}

#[test]
fn save_load_round_trip_is_canonical() {
    let g = group("A5");
    let sys = system("paper:A5/Q", &g);
    let dir = std::env::temp_dir().join("repfilt-io-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a5q.json");
    save_system(&sys, &g, &path).unwrap();
    let loaded = load_system(&path, &g).unwrap();
    assert_eq!(loaded, sys);
    // Canonical bytes survive a second round trip.
    let first = std::fs::read_to_string(&path).unwrap();
    assert_eq!(system_to_canonical_json(&loaded, &g).unwrap(), first);
    assert!(validate(&loaded, &g).unwrap().ok());
}

#[test]
fn file_missing_weyl_table_names_the_class() {
    let g = group("S3");
    let sys = system("paper:S3/C", &g);
    let text = system_to_canonical_json(&sys, &g).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["groups"][2].as_object_mut().unwrap().remove("weyl");
    let broken = serde_json::to_string(&doc).unwrap();
    let dir = std::env::temp_dir().join("repfilt-io-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, broken).unwrap();
    let err = load_system(&path, &g).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("class 2") && msg.contains("Weyl"),
        "got: {msg}"
    );
}

#[test]
fn hand_written_c2_complex_file_matches_builtin() {
    let g = group("C2");
    let text = r#"{
  "name": "hand-written C2 over the complex numbers",
  "base": "complex",
  "flags": {"semisimple": true, "frobenius": true, "mackey": true},
  "groups": [
    {
      "class_key": {"index": 0, "order": 1, "name": "e"},
      "indecomposables": [{"label": "1", "dim": 1}],
      "unit": "1",
      "weyl": [[0], [0]],
      "res": {"0": [[1]]},
      "ind": {"0": [[1]], "1": [[1, 1]]}
    },
    {
      "class_key": {"index": 1, "order": 2, "name": "C2"},
      "indecomposables": [{"label": "1", "dim": 1}, {"label": "-1", "dim": 1}],
      "unit": "1",
      "weyl": [[0, 1]],
      "res": {"0": [[1], [1]], "1": [[1, 0], [0, 1]]},
      "ind": {"1": [[1, 0], [0, 1]]}
    }
  ]
}"#;
    let dir = std::env::temp_dir().join("repfilt-io-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c2c.json");
    std::fs::write(&path, text).unwrap();
    let loaded = load_system(&path, &g).unwrap();
    assert!(validate(&loaded, &g).unwrap().ok());
    let builtin = system(&"complex-cyclic", &g);
    assert_eq!(loaded.classes, builtin.classes);
}

#[test]
fn character_oracle_agrees_with_tables() {
    // Independent route: restrict/induce characters directly and decompose,
    // then compare with the table machinery, on every embeddable pair of
    // class representatives.
    use repfilt::coeffsys::characters::{decompose, induce_values, restrict_values, CycCtx};
    for (sys_name, grp) in [
        ("paper:S3/C", "S3"),
        ("paper:A4/Q", "A4"),
        ("paper:D5/Q", "D5"),
        ("paper:A5/Q", "A5"),
        ("complex-cyclic", "C6"),
    ] {
        let g = group(grp);
        let sys = system(sys_name, &g);
        let spec = parse_system_spec(sys_name).unwrap();
        let (m, bases) = repfilt::coeffsys::builders::character_basis(&g, &spec).unwrap();
        let ctx = CycCtx::new(m);
        let data = g.subgroup_data().unwrap();
        for high in 0..data.classes.len() {
            let rep_high = data.classes[high].rep.clone();
            for low in 0..data.classes.len() {
                if data.chosen_embedding(low, high).is_none() || low == high {
                    continue;
                }
                // The oracle restricts along the canonical embedding of the
                // class representative itself when it happens to be inside;
                // otherwise skip (the table path is exercised elsewhere).
                let rep_low = data.classes[low].rep.clone();
                if !rep_low.iter().all(|e| rep_high.binary_search(e).is_ok()) {
                    continue;
                }
                let res = repfilt::coeffsys::res_matrix(&sys, &g, &rep_low, &rep_high).unwrap();
                for (y, chi) in bases[high].iter().enumerate() {
                    let direct = restrict_values(&rep_high, chi, &rep_low);
                    let row = decompose(&bases[low], &direct).unwrap();
                    assert_eq!(res[y], row, "{sys_name}: Res {high}->{low} row {y}");
                }
                let ind = repfilt::coeffsys::ind_matrix(&sys, &g, &rep_low, &rep_high).unwrap();
                for (x, chi) in bases[low].iter().enumerate() {
                    let direct = induce_values(&ctx, &g, &rep_low, chi, &rep_high).unwrap();
                    let row = decompose(&bases[high], &direct).unwrap();
                    assert_eq!(ind[x], row, "{sys_name}: Ind {low}->{high} row {x}");
                }
            }
        }
    }
}

#[test]
fn shipped_s3_example_file_matches_the_builtin() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/s3-complex.json");
    let g = group("S3");
    let loaded = load_system(&path, &g).unwrap();
    assert!(validate(&loaded, &g).unwrap().ok());
    assert_eq!(loaded, system("paper:S3/C", &g));
}

#[test]
fn non_embeddable_pair_has_no_table() {
    // C3 does not contain a C2, so inducing from the C2 class to the C3
    // class must report a missing table.
    let g = group("S3");
    let sys = system("paper:S3/C", &g);
    let c2 = class_by_name(&g, "C2");
    let c3 = class_by_name(&g, "C3");
    let x = object(&sys, c2, &[("1", 1)]);
    let err = induce(&sys, &g, rep_of(&g, c2), rep_of(&g, c3), &x).unwrap_err();
    assert!(matches!(
        err,
        repfilt::error::SystemError::MissingTable { .. }
    ));
}

#[test]
fn unit_of_dimension_two_is_rejected() {
    let g = group("C3");
    let sys = system("rational-cyclic", &g);
    let text = system_to_canonical_json(&sys, &g).unwrap();
    // Point the unit of the top class at the 2-dimensional object.
    let broken = text.replace(
        "\"unit\": \"1\",\n      \"weyl\": [\n        [\n          0,\n          1\n        ]",
        "\"unit\": \"rhobar\",\n      \"weyl\": [\n        [\n          0,\n          1\n        ]",
    );
    assert_ne!(broken, text, "fixture did not match the canonical layout");
    let loaded = repfilt::coeffsys::builders::build_system(
        &SystemSpec::File(write_temp("bad-unit.json", &broken)),
        &g,
    );
    let err = loaded.unwrap_err();
    assert!(
        matches!(err, repfilt::error::SystemError::MissingUnit { .. }),
        "got {err}"
    );
}

fn write_temp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join("repfilt-io-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn unknown_kind_is_rejected() {
    assert!(parse_system_spec("nonsense").is_err());
    let g = group("S3");
    // A mismatched group for a transcribed system.
    let err = build_system(&SystemSpec::Paper("A4/Q".into()), &g).unwrap_err();
    assert!(err.to_string().contains("does not match") || err.to_string().contains("class"));
}
