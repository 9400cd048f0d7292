use fixedbitset::FixedBitSet;
use groupoid_galois::enumeration::{canonical_enumeration, canonical_family, check_condition_superfluous};
use groupoid_galois::random::{random_action, RandomConfig};
use groupoid_galois::subgroupoid::{enumerate_wide_subgroupoids, generated_wide_subgroupoid, DEFAULT_ENUMERATION_CAP};
use groupoid_galois::{FiniteGroupoid, Morphism};
use groupoid_galois_oracles::brute_force_wide_subgroupoids;
use proptest::prelude::*;

fn groupoid(seed: u64) -> FiniteGroupoid {
    random_action(seed, &RandomConfig::default()).groupoid().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_an_involution(seed in any::<u64>()) {
        let g = groupoid(seed);
        for x in g.morphisms() {
            prop_assert_eq!(g.inverse(g.inverse(x)), x);
            prop_assert_eq!(g.dom(g.inverse(x)), g.ran(x));
        }
    }

    #[test]
    fn generating_twice_changes_nothing(seed in any::<u64>(), picks in proptest::collection::vec(any::<usize>(), 0..4)) {
        let g = groupoid(seed);
        let gens: Vec<Morphism> = picks.iter().map(|p| Morphism(p % g.len())).collect();
        let once = generated_wide_subgroupoid(&g, gens);
        let twice = generated_wide_subgroupoid(&g, once.iter());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn components_decompose_as_products(seed in any::<u64>()) {
        let g = groupoid(seed);
        for comp in g.connected_components() {
            let mut members = FixedBitSet::with_capacity(g.len());
            for m in &comp.morphisms {
                members.insert(m.0);
            }
            let (sub, _) = g.subgroupoid(&members).unwrap();
            let dec = sub.connected_decomposition().unwrap();
            prop_assert_eq!(dec.n, comp.objects.len());
            prop_assert!(sub.is_isomorphism(&dec.product, &dec.to_product));
        }
    }

    #[test]
    fn canonical_enumerations_satisfy_the_condition(seed in any::<u64>()) {
        let g = groupoid(seed);
        let family = canonical_family(&g).unwrap();
        prop_assert_eq!(family.len(), g.objects().len());
        prop_assert!(check_condition_superfluous(&g, &family).unwrap());
    }

    #[test]
    fn enumeration_matches_brute_force(seed in any::<u64>()) {
        let g = groupoid(seed);
        prop_assume!(g.len() <= 10);
        let mut fast: Vec<FixedBitSet> = enumerate_wide_subgroupoids(&g, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .into_iter()
            .map(|h| h.members().clone())
            .collect();
        let mut slow = brute_force_wide_subgroupoids(&g);
        fast.sort_by_key(|s| s.ones().collect::<Vec<_>>());
        slow.sort_by_key(|s| s.ones().collect::<Vec<_>>());
        prop_assert_eq!(fast, slow);
    }
}

#[test]
fn coarse_two_enumeration_lists_every_arrow_once() {
    let g = FiniteGroupoid::coarse(3).unwrap();
    let e = g.objects()[1];
    let en = canonical_enumeration(&g, e).unwrap();
    let mut got: Vec<Morphism> = en.list.clone();
    got.sort();
    assert_eq!(got, g.into_object(e));
    assert_eq!(en.list[0], e);
}

#[test]
fn s8_groupoid_has_36_wide_subgroupoids() {
    let g = groupoid_galois::catalog::s8_groupoid();
    assert_eq!(g.len(), 16);
    let w = enumerate_wide_subgroupoids(&g, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(w.len(), brute_force_wide_subgroupoids(&g).len());
    assert_eq!(w.len(), 36);
}
