//! Filtration-engine integration tests: the worked-example stage values,
//! cofiber bases, connecting maps, stabilization certificates, and the
//! structural invariants (augmentation well-definedness, right-exactness,
//! determinism of presentations).

use repfilt::coeffsys::builders::{build_system, parse_system_spec};
use repfilt::coeffsys::CoefficientSystem;
use repfilt::error::FiltrationError;
use repfilt::filtration::{
    cofiber_pi0_basis, complexity_pi0, connecting_cokernel, connecting_is_isomorphism,
    connecting_map, rank_pi0, stabilization_stage, FiltrationKind, FiltrationStage,
};
use repfilt::groups::{parse_group_spec, PermGroup};

fn setup(system: &str, group: &str) -> (PermGroup, CoefficientSystem) {
    let g = parse_group_spec(group).unwrap();
    let sys = build_system(&parse_system_spec(system).unwrap(), &g).unwrap();
    (g, sys)
}

fn rank_free(sys: &CoefficientSystem, g: &PermGroup, n: u32) -> usize {
    let stage = rank_pi0(sys, g, n).unwrap();
    assert!(
        stage.presentation.nontrivial_invariant_factors().is_empty(),
        "unexpected torsion at rank stage {n}"
    );
    stage.presentation.free_rank()
}

fn complexity_free(sys: &CoefficientSystem, g: &PermGroup, n: u32) -> usize {
    let stage = complexity_pi0(sys, g, n).unwrap();
    assert!(
        stage.presentation.nontrivial_invariant_factors().is_empty(),
        "unexpected torsion at complexity stage {n}"
    );
    stage.presentation.free_rank()
}

#[test]
fn s3_complex_rank_stages() {
    let (g, sys) = setup("paper:S3/C", "S3");
    assert!(rank_pi0(&sys, &g, 0).unwrap().presentation.is_trivial());
    assert_eq!(rank_free(&sys, &g, 1), 7);
    assert_eq!(rank_free(&sys, &g, 2), 5);
    assert_eq!(rank_free(&sys, &g, 3), 3);
    assert_eq!(rank_free(&sys, &g, 4), 3);
    // The stage-2 basis identifications: the free quotient keeps exactly
    // the classes [1], [sgn], [nu3], tr_{C2}[1], tr_{C2}[-1].
    let stage = rank_pi0(&sys, &g, 2).unwrap();
    assert_eq!(stage.presentation.free_rank(), 5);
}

#[test]
fn s3_real_rank_and_complexity_stages() {
    let (g, sys) = setup("paper:S3/R", "S3");
    assert_eq!(rank_free(&sys, &g, 1), 6);
    assert_eq!(rank_free(&sys, &g, 2), 6);
    assert_eq!(rank_free(&sys, &g, 3), 3);
    assert_eq!(complexity_free(&sys, &g, 1), 2);
    assert_eq!(complexity_free(&sys, &g, 2), 1);
}

#[test]
fn cyclic_rank_stages_over_all_bases() {
    for p in [2u32, 3, 5] {
        let pu = p as usize;
        let (g, sys) = setup("complex-cyclic", &format!("C{p}"));
        for n in 1..p {
            assert_eq!(rank_free(&sys, &g, n), pu + 1, "C over C{p} at {n}");
        }
        assert_eq!(rank_free(&sys, &g, p), pu);
        assert_eq!(complexity_free(&sys, &g, 1), 1);

        let (g, sys) = setup("fp-lattices", &format!("C{p}"));
        for n in 1..p {
            assert_eq!(rank_free(&sys, &g, n), n as usize + 1, "F{p} at {n}");
        }
        assert_eq!(rank_free(&sys, &g, p), pu);
        for n in 0..=p {
            let expect = if n <= 1 { pu } else { pu - n as usize + 1 };
            assert_eq!(complexity_free(&sys, &g, n), expect, "F{p} complexity {n}");
        }

        let (g, sys) = setup("rational-cyclic", &format!("C{p}"));
        for n in 1..=p + 1 {
            let expect = if n == p - 1 { 3 } else { 2 };
            assert_eq!(rank_free(&sys, &g, n), expect, "Q over C{p} rank at {n}");
            let expect = if n >= p - 1 { 1 } else { 2 };
            assert_eq!(
                complexity_free(&sys, &g, n),
                expect,
                "Q over C{p} compl at {n}"
            );
        }
    }
}

#[test]
fn rational_complexity_of_a4_d5_a5() {
    let (g, sys) = setup("paper:A4/Q", "A4");
    assert_eq!(complexity_free(&sys, &g, 1), 2);
    assert_eq!(complexity_free(&sys, &g, 2), 1);

    let (g, sys) = setup("paper:D5/Q", "D5");
    for n in 1..=3 {
        assert_eq!(complexity_free(&sys, &g, n), 2);
    }
    assert_eq!(complexity_free(&sys, &g, 4), 1);

    let (g, sys) = setup("paper:A5/Q", "A5");
    assert_eq!(complexity_free(&sys, &g, 1), 3);
    assert_eq!(complexity_free(&sys, &g, 2), 2);
    assert_eq!(complexity_free(&sys, &g, 3), 2);
    assert_eq!(complexity_free(&sys, &g, 4), 1);
    assert_eq!(complexity_free(&sys, &g, 7), 1);
}

#[test]
fn burnside_rank_is_the_burnside_ring() {
    for (group, classes) in [("C2", 2), ("C3", 2), ("C4", 3), ("S3", 4), ("A4", 5)] {
        let (g, sys) = setup("burnside", group);
        for n in 1..=g.order() as u32 {
            let stage = rank_pi0(&sys, &g, n).unwrap();
            assert!(
                stage.presentation.is_free_of_rank(classes),
                "burnside({group}) at stage {n}: {}",
                stage.presentation.describe()
            );
        }
    }
}

#[test]
fn burnside_complexity_reaches_the_integers() {
    for group in ["C2", "C3", "C4", "S3", "A4"] {
        let (g, sys) = setup("burnside", group);
        let order = g.order() as u32;
        for n in [order, order + 1, order + 3] {
            let stage = complexity_pi0(&sys, &g, n).unwrap();
            assert!(
                stage.presentation.is_free_of_rank(1),
                "burnside({group}) n={n}"
            );
        }
    }
}

#[test]
fn complex_complexity_collapses_at_stage_one() {
    for (system, group) in [
        ("paper:S3/C", "S3"),
        ("complex-cyclic", "C2"),
        ("complex-cyclic", "C4"),
        ("complex-cyclic", "C6"),
    ] {
        let (g, sys) = setup(system, group);
        for n in 1..=g.order() as u32 {
            assert_eq!(
                complexity_free(&sys, &g, n),
                1,
                "{system} on {group} at {n}"
            );
        }
    }
}

#[test]
fn cofiber_basis_examples() {
    // C_p over C at n=1: the trivial class at e plus the p characters.
    let (g, sys) = setup("complex-cyclic", "C5");
    let basis = cofiber_pi0_basis(&sys, &g, 1).unwrap();
    assert_eq!(basis.len(), 6);
    assert!(basis.iter().any(|s| s.class == 0));
    assert_eq!(basis.iter().filter(|s| s.class == 1).count(), 5);
    // At n=p there is no irreducible of that dimension at all.
    assert!(cofiber_pi0_basis(&sys, &g, 5).unwrap().is_empty());

    // S3 over C at n=2: nu3 is induced from eta, so the layer is empty.
    let (g, sys) = setup("paper:S3/C", "S3");
    assert!(cofiber_pi0_basis(&sys, &g, 2).unwrap().is_empty());
    // At n=1 all seven dimension-1 orbits survive.
    assert_eq!(cofiber_pi0_basis(&sys, &g, 1).unwrap().len(), 7);

    // Non-semisimple systems are refused.
    let (g, sys) = setup("fp-lattices", "C3");
    assert!(matches!(
        cofiber_pi0_basis(&sys, &g, 1),
        Err(FiltrationError::System(
            repfilt::error::SystemError::NotSemisimple
        ))
    ));
}

#[test]
fn right_exactness_of_the_cofiber_sequence() {
    for (system, group, stab) in [
        ("paper:S3/C", "S3", 3u32),
        ("complex-cyclic", "C2", 2),
        ("complex-cyclic", "C3", 3),
        ("complex-cyclic", "C5", 5),
    ] {
        let (g, sys) = setup(system, group);
        let mut prev = rank_pi0(&sys, &g, 0).unwrap();
        for n in 1..=stab {
            let cur = rank_pi0(&sys, &g, n).unwrap();
            let basis = cofiber_pi0_basis(&sys, &g, n).unwrap();
            let (torsion, free) = connecting_cokernel(&prev, &cur).unwrap();
            assert!(
                torsion.is_empty(),
                "{system} {group} n={n}: torsion {torsion:?}"
            );
            assert_eq!(free, basis.len(), "{system} {group} n={n}");
            prev = cur;
        }
    }
}

#[test]
fn connecting_map_examples() {
    let (g, sys) = setup("complex-cyclic", "C5");
    let s1 = rank_pi0(&sys, &g, 1).unwrap();
    let s2 = rank_pi0(&sys, &g, 2).unwrap();
    assert!(connecting_is_isomorphism(&s1, &s2).unwrap());
    let s4 = rank_pi0(&sys, &g, 4).unwrap();
    let s5 = rank_pi0(&sys, &g, 5).unwrap();
    // Surjective with kernel of rank 1: tr[1] - sum of the characters.
    let (torsion, free) = connecting_cokernel(&s4, &s5).unwrap();
    assert!(torsion.is_empty() && free == 0);
    assert!(!connecting_is_isomorphism(&s4, &s5).unwrap());
    // Identity stage gives the identity matrix.
    let id = connecting_map(&s4, &s4).unwrap();
    assert_eq!(
        id,
        repfilt::exactalg::IntMatrix::identity(s4.directory.len())
    );
    // Mismatched stages are rejected.
    let (g2, sys2) = setup("complex-cyclic", "C3");
    let other = rank_pi0(&sys2, &g2, 2).unwrap();
    assert!(connecting_map(&s1, &other).is_err());
    assert!(connecting_map(&s2, &s1).is_err());
}

#[test]
fn stabilization_certificates() {
    for (system, group, kind, expect) in [
        ("paper:S3/C", "S3", FiltrationKind::Rank, 3u32),
        ("complex-cyclic", "C2", FiltrationKind::Rank, 2),
        ("complex-cyclic", "C3", FiltrationKind::Rank, 3),
        ("complex-cyclic", "C5", FiltrationKind::Rank, 5),
        ("paper:S3/C", "S3", FiltrationKind::Complexity, 1),
        ("paper:A5/Q", "A5", FiltrationKind::Complexity, 4),
    ] {
        let (g, sys) = setup(system, group);
        let cert = stabilization_stage(&sys, &g, kind).unwrap();
        assert_eq!(cert.stage, expect, "{system} {group} {kind:?}");
        assert_eq!(cert.checked_through, g.order() as u32);
    }
}

#[test]
fn complexity_stage_zero_is_the_object_group() {
    let (g, sys) = setup("paper:A5/Q", "A5");
    let stage = complexity_pi0(&sys, &g, 0).unwrap();
    assert!(stage.presentation.is_free_of_rank(4));
    assert_eq!(stage.relations_count, 0);
}

#[test]
fn rank_stage_generator_count_grows_with_weyl_fusion() {
    // At C3 <= S3 over C the characters eta, eta^2 are fused: stage 1 has
    // 7 generators, not 8.
    let (g, sys) = setup("paper:S3/C", "S3");
    let stage = rank_pi0(&sys, &g, 1).unwrap();
    assert_eq!(stage.directory.len(), 7);
    assert_eq!(stage.relations_count, 0);
}

#[test]
fn oversized_stage_is_a_resource_error() {
    let (g, sys) = setup("burnside", "A5");
    match rank_pi0(&sys, &g, 60) {
        Err(FiltrationError::StageTooLarge { .. }) => {}
        other => panic!(
            "expected a stage-size error, got {other:?}",
            other = other.map(|s| s.summary())
        ),
    }
}

#[test]
fn presentations_are_deterministic_across_parallelism() {
    let (g, sys) = setup("paper:S3/C", "S3");
    let render = |stage: &FiltrationStage| {
        format!(
            "{:?}|{:?}|{}",
            stage.presentation.generator_labels,
            stage.presentation.nontrivial_invariant_factors(),
            stage.relations_count
        )
    };
    let base = render(&rank_pi0(&sys, &g, 3).unwrap());
    for threads in [1usize, 4] {
        let out = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| render(&rank_pi0(&sys, &g, 3).unwrap()));
        assert_eq!(out, base, "threads = {threads}");
    }
}

#[test]
fn augmentation_kills_every_relation() {
    // The construction itself checks this; exercise it over a spread of
    // systems and stages by just building them.
    for (system, group, n) in [
        ("paper:S3/R", "S3", 4u32),
        ("paper:A5/Q", "A5", 3),
        ("burnside", "A4", 8),
        ("real-cyclic", "C5", 6),
    ] {
        let (g, sys) = setup(system, group);
        let stage = rank_pi0(&sys, &g, n).unwrap();
        let product = stage.presentation.relations.mul(&stage.map_to_rep);
        assert!(product.is_zero(), "{system} {group} n={n}");
    }
}
