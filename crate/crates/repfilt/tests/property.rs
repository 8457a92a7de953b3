//! Property tests for the spec-level invariants that quantify over inputs:
//! Smith normal form shape and round-trip, presentation invariance under
//! row moves, canonical images modulo relations, Weyl canonicalization,
//! and the double-coset partition.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use repfilt::coeffsys::builders::{build_system, parse_system_spec};
use repfilt::coeffsys::{apply_label_perm_u32, weyl_canonical};
use repfilt::exactalg::{is_isomorphic, smith_normal_form, IntMatrix, PresentedAbelianGroup};
use repfilt::groups::parse_group_spec;

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-9i64..=9, r * c).prop_map(move |data| {
            let mut m = IntMatrix::zero(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, BigInt::from(data[i * c + j]));
                }
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_transforms_reconstruct_the_input(m in small_matrix()) {
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s.clone());
        // Diagonal with a divisibility chain.
        let d = snf.diagonal();
        for w in d.windows(2) {
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn quotient_is_invariant_under_row_moves(
        m in small_matrix(),
        seed in 0u64..1000,
    ) {
        let labels: Vec<String> = (0..m.cols()).map(|i| format!("g{i}")).collect();
        let base = PresentedAbelianGroup::quotient(labels.clone(), &m);
        // Permute rows, negate one, and add one row to another.
        let rows = m.rows();
        let mut variant = m.clone();
        if rows >= 2 {
            let a = (seed % rows as u64) as usize;
            let b = ((seed / 7) % rows as u64) as usize;
            for j in 0..m.cols() {
                let tmp = variant.get(a, j).clone();
                variant.set(a, j, variant.get(b, j).clone());
                variant.set(b, j, tmp);
            }
            if a != b {
                for j in 0..m.cols() {
                    let v = variant.get(a, j) + variant.get(b, j);
                    variant.set(a, j, v);
                }
            }
        }
        if rows >= 1 {
            let a = ((seed / 13) % rows as u64) as usize;
            for j in 0..m.cols() {
                let v = -variant.get(a, j);
                variant.set(a, j, v);
            }
        }
        let moved = PresentedAbelianGroup::quotient(labels, &variant);
        prop_assert!(is_isomorphic(&base, &moved));
    }

    #[test]
    fn canonical_images_agree_modulo_relations(
        m in small_matrix(),
        v in proptest::collection::vec(-20i64..=20, 5),
        row in 0usize..5,
    ) {
        prop_assume!(m.rows() > 0);
        let labels: Vec<String> = (0..m.cols()).map(|i| format!("g{i}")).collect();
        let g = PresentedAbelianGroup::quotient(labels, &m);
        let v: Vec<BigInt> = v.into_iter().take(m.cols()).map(BigInt::from).collect();
        let row = row % m.rows();
        let shifted: Vec<BigInt> = (0..m.cols())
            .map(|j| &v[j] + m.get(row, j))
            .collect();
        prop_assert_eq!(g.canonical_image(&v).unwrap(), g.canonical_image(&shifted).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weyl_canonical_is_constant_on_orbits(
        multiset in proptest::collection::vec(0u32..4, 3),
        which in 0usize..2,
    ) {
        // The C3 class of S3 over C has Weyl group of order 2.
        let g = parse_group_spec("S3").unwrap();
        let sys = build_system(&parse_system_spec("paper:S3/C").unwrap(), &g).unwrap();
        let c3 = 2usize;
        let perms = &sys.classes[c3].weyl_perms;
        let moved = apply_label_perm_u32(&perms[which % perms.len()], &multiset);
        let a = weyl_canonical(&sys, c3, &multiset);
        let b = weyl_canonical(&sys, c3, &moved);
        prop_assert_eq!(&a, &b);
        // Idempotent.
        prop_assert_eq!(weyl_canonical(&sys, c3, &a), a.clone());
    }

    #[test]
    fn double_cosets_partition_the_group(
        group_idx in 0usize..4,
        hi in 0usize..12,
        ki in 0usize..12,
    ) {
        let spec = ["S3", "A4", "D5", "C12"][group_idx];
        let g = parse_group_spec(spec).unwrap();
        let data = g.subgroup_data().unwrap();
        let h = &data.subgroups[hi % data.subgroups.len()];
        let k = &data.subgroups[ki % data.subgroups.len()];
        let cosets = g.double_cosets(h, k);
        // |HgK| = |H||K| / |H ∩ gKg⁻¹|.
        let total: usize = cosets
            .iter()
            .map(|dc| h.len() * k.len() / dc.intersection.len())
            .sum();
        prop_assert_eq!(total, g.order());
    }
}
