mod common;

use proptest::prelude::*;
use proptest::sample::subsequence;

use fdf_core::algebra::numtheory::{gcd, prime_power};
use fdf_core::algebra::{AbelianGroup, CrtIso, CyclotomicIndexer, FieldElement, FiniteField, GroupElement};
use fdf_core::catalog::Catalog;
use fdf_core::codes::{fhs_bound, fhs_max_correlation, Fhs};
use fdf_core::designs::{affine_plane, verify_bibd, verify_resolution, ResolvableDesign};
use fdf_core::families::{delta_block, verify_sdf, DesignFamily, FamilyKind};
use fdf_core::search::{solve, SystemRegistry, SystemRequest, DEFAULT_BUDGET};

const FIELDS: [u64; 20] = [5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49];

/// Moduli of a cyclic group or a product of two, of order at most 200.
fn moduli() -> impl Strategy<Value = Vec<u64>> {
    prop_oneof![
        (2u64..=200).prop_map(|n| vec![n]),
        (2u64..=14).prop_flat_map(|a| (Just(a), 2u64..=200 / a)).prop_map(|(a, b)| vec![a, b]),
    ]
}

fn group_of(moduli: &[u64]) -> AbelianGroup {
    if moduli.len() == 1 {
        AbelianGroup::cyclic(moduli[0]).unwrap()
    } else {
        AbelianGroup::product(moduli.iter().map(|&m| AbelianGroup::cyclic(m).unwrap()).collect()).unwrap()
    }
}

/// Relabels symbols by first occurrence so that every label in `0..l` is used.
fn dense(seq: Vec<u32>) -> (Vec<u32>, usize) {
    let mut labels = std::collections::HashMap::new();
    let out = seq
        .into_iter()
        .map(|s| {
            let next = labels.len() as u32;
            *labels.entry(s).or_insert(next)
        })
        .collect();
    (out, labels.len())
}

fn sdf_over(n: u64, blocks: &[Vec<u64>], lambda: u64) -> DesignFamily {
    DesignFamily {
        kind: FamilyKind::Sdf,
        group: AbelianGroup::cyclic(n).unwrap(),
        subgroup: None,
        lambda,
        blocks: blocks.iter().map(|b| b.iter().map(|&x| GroupElement(x as u32)).collect()).collect(),
        frame_partition: None,
        provenance: String::new(),
    }
}

proptest! {
    #[test]
    fn difference_lists_match_brute_force(
        (moduli, tuples) in moduli().prop_flat_map(|m| {
            let elem = m.iter().map(|&k| 0..k).collect::<Vec<_>>();
            (Just(m), prop::collection::vec(elem, 2..=9))
        })
    ) {
        let g = group_of(&moduli);
        let block: Vec<GroupElement> = tuples
            .iter()
            .map(|t| g.compose(&t.iter().map(|&c| GroupElement(c as u32)).collect::<Vec<_>>()).unwrap())
            .collect();
        let mut got: Vec<Vec<u64>> = delta_block(&g, &block)
            .unwrap()
            .into_iter()
            .map(|x| g.components(x).iter().map(|c| c.0 as u64).collect())
            .collect();
        got.sort();
        prop_assert_eq!(got, common::differences(&moduli, &tuples));
    }

    #[test]
    fn transversality_ignores_the_primitive_element(
        field in 0..FIELDS.len(),
        pick in any::<prop::sample::Index>(),
        other in any::<prop::sample::Index>(),
        raw in prop::collection::vec(any::<prop::sample::Index>(), 1..40),
        lambda in 1u64..=3,
    ) {
        let q = FIELDS[field];
        let (p, m) = prime_power(q).unwrap();
        let f = FiniteField::new(p, m).unwrap();
        let divisors: Vec<u64> = (2..q).filter(|e| (q - 1) % e == 0).collect();
        let e = *pick.get(&divisors);
        let primitive: Vec<FieldElement> = f.nonzero().filter(|&x| common::log_table(&f, x).is_some()).collect();
        let w = *other.get(&primitive);
        let nonzero: Vec<FieldElement> = f.nonzero().collect();
        let a: Vec<FieldElement> = raw.iter().map(|i| *i.get(&nonzero)).collect();

        let old = CyclotomicIndexer::new(f.clone(), e).unwrap();
        let new = CyclotomicIndexer::with_primitive(f.clone(), e, w).unwrap();
        let counts_old = old.class_counts(&a).unwrap();
        let counts_new = new.class_counts(&a).unwrap();
        prop_assert_eq!(&counts_new, &common::class_counts(&common::log_table(&f, w).unwrap(), e, &a));
        let (mut s_old, mut s_new) = (counts_old.clone(), counts_new.clone());
        s_old.sort();
        s_new.sort();
        prop_assert_eq!(s_old, s_new);
        prop_assert_eq!(old.is_transversal(&a, lambda).unwrap(), new.is_transversal(&a, lambda).unwrap());
    }

    #[test]
    fn transversals_stay_transversals(field in 0..FIELDS.len(), other in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let q = FIELDS[field];
        let (p, m) = prime_power(q).unwrap();
        let f = FiniteField::new(p, m).unwrap();
        let e = (2..q).find(|e| (q - 1) % e == 0).unwrap();
        // One member from each class C_i = g^i <g^e>, shifted within the class by the seed.
        let a: Vec<FieldElement> = (0..e).map(|i| f.exp((i + e * (seed % ((q - 1) / e))) as i64)).collect();
        let primitive: Vec<FieldElement> = f.nonzero().filter(|&x| common::log_table(&f, x).is_some()).collect();
        let w = *other.get(&primitive);
        prop_assert!(CyclotomicIndexer::new(f.clone(), e).unwrap().is_transversal(&a, 1).unwrap());
        prop_assert!(CyclotomicIndexer::with_primitive(f.clone(), e, w).unwrap().is_transversal(&a, 1).unwrap());
    }

    #[test]
    fn sliding_correlation_matches_triple_loop(raw in prop::collection::vec(0u32..6, 2..=200), frac in 0.0f64..1.0) {
        let (seq, l) = dense(raw);
        let x = Fhs::new(seq.clone(), l).unwrap();
        let big_l = 1 + ((seq.len() - 1) as f64 * frac) as usize;
        prop_assert_eq!(fhs_max_correlation(&x, big_l).unwrap(), common::naive_max_correlation(&seq, big_l));
    }

    #[test]
    fn correlation_never_beats_the_bound(raw in prop::collection::vec(0u32..8, 2..=120), frac in 0.0f64..1.0) {
        let (seq, l) = dense(raw);
        prop_assume!(l >= 2);
        let x = Fhs::new(seq.clone(), l).unwrap();
        let n = seq.len();
        let big_l = 1 + ((n - 1) as f64 * frac) as usize;
        let bound = fhs_bound(n as u64, l as u64, big_l as u64).unwrap();
        prop_assert!(fhs_max_correlation(&x, big_l).unwrap() as u64 >= bound);
    }

    #[test]
    fn bound_grows_with_the_window(n in 2u64..2000, l in 2u64..100) {
        let mut last = 0;
        for big_l in 1..=n.min(300) {
            let b = fhs_bound(n, l, big_l).unwrap();
            prop_assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn sdf_verdicts_match_dictionary_counts(
        (n, blocks) in (2u64..=40).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(prop::collection::vec(0..n, 2..=7), 1..=3))
        }),
        doubled in any::<bool>(),
    ) {
        // Doubling every element of Z_n is an SDF; otherwise the blocks are random.
        let blocks = if doubled { vec![(0..n).flat_map(|x| [x, x]).collect()] } else { blocks };
        let total: u64 = blocks.iter().map(|b| (b.len() * (b.len() - 1)) as u64).sum();
        let fam = sdf_over(n, &blocks, total / n);
        let counts = common::cyclic_difference_counts(n, &blocks);
        let bad: Vec<u32> = (0..n).filter(|x| counts.get(x).copied().unwrap_or(0) != fam.lambda).map(|x| x as u32).collect();
        let r = verify_sdf(&fam).unwrap();
        prop_assert_eq!(r.violations.iter().map(|v| v.element.0).collect::<Vec<_>>(), bad.clone());
        prop_assert_eq!(r.ok, bad.is_empty() && fam.lambda % 2 == 0);
    }

    #[test]
    fn bibd_verdicts_match_dictionary_counts(
        q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8]),
        edits in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..3),
    ) {
        let mut d: ResolvableDesign = affine_plane(q).unwrap();
        let v = d.design.v;
        for (b, i, x) in &edits {
            let b = b.index(d.design.blocks.len());
            let i = i.index(d.design.k);
            d.design.blocks[b][i] = x.index(v) as u32;
        }
        let counts = common::pair_counts(&d.design.blocks);
        let v = v as u32;
        let deficient = (0..v)
            .flat_map(|x| (x + 1..v).map(move |y| (x, y)))
            .filter(|p| counts.get(p).copied().unwrap_or(0) != 1)
            .count() as u64;
        let well_formed = d.design.blocks.iter().all(|b| {
            let mut s = b.clone();
            s.sort();
            s.dedup();
            s.len() == b.len()
        });
        let r = verify_bibd(&d.design);
        prop_assert_eq!(r.pairs_checked, common::binomial2(v as u64));
        prop_assert_eq!(r.deficient_pairs, deficient);
        prop_assert_eq!(r.ok, deficient == 0 && well_formed);
        if edits.is_empty() {
            prop_assert!(verify_resolution(&d.design, &d.resolution).ok);
        }
    }

    #[test]
    fn designs_survive_canonical_form_and_json(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])) {
        let d = affine_plane(q).unwrap();
        let mut c = d.clone();
        c.canonicalize();
        let mut again = c.clone();
        again.canonicalize();
        prop_assert_eq!(&again, &c);
        let back = ResolvableDesign::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert!(verify_bibd(&back.design).ok && verify_resolution(&back.design, &back.resolution).ok);
    }

    #[test]
    fn crt_is_an_isomorphism(
        (a, b) in (2u64..=30, 2u64..=30).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1),
        x in any::<prop::sample::Index>(),
        y in any::<prop::sample::Index>(),
    ) {
        let g = group_of(&[a, b]);
        let iso = CrtIso::new(&g).unwrap();
        let n = (a * b) as usize;
        let (x, y) = (GroupElement(x.index(n) as u32), GroupElement(y.index(n) as u32));
        let z = iso.target();
        prop_assert_eq!(iso.invert(iso.apply(x)), x);
        prop_assert_eq!(iso.apply(g.add(x, y)), z.add(iso.apply(x), iso.apply(y)));
    }

    #[test]
    fn families_survive_json(
        (n, blocks) in (2u64..=60).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(6) as usize), 1..=4))
        }),
    ) {
        let fam = sdf_over(n, &blocks, 2);
        let back = DesignFamily::from_json(&fam.to_json()).unwrap();
        prop_assert_eq!(&back, &fam);
        prop_assert_eq!(verify_sdf(&back).unwrap().ok, verify_sdf(&fam).unwrap().ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fixed_seeds_give_fixed_assignments(seed in any::<u64>()) {
        let req = SystemRequest {
            sdf: Some(Catalog::standard().family("z125_6_6").unwrap()),
            q: 67,
            tie_duplicates: true,
            ..Default::default()
        };
        let sys = SystemRegistry::standard().build("generic", &req).unwrap();
        let a = solve(&sys, seed, DEFAULT_BUDGET).unwrap();
        let b = solve(&sys, seed, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.nodes, b.nodes);
        prop_assert_eq!(a.assignment.map(|x| x.values), b.assignment.map(|x| x.values));
    }
}
