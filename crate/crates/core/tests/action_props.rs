use fixedbitset::FixedBitSet;
use groupoid_galois::galois::{invariants, stabilizer};
use groupoid_galois::random::{random_action, RandomConfig};
use groupoid_galois::subgroupoid::{enumerate_wide_subgroupoids, DEFAULT_ENUMERATION_CAP};
use groupoid_galois::{PartialAction, WideSubgroupoid};
use proptest::prelude::*;

fn by_name(alpha: &PartialAction) -> Vec<(String, Vec<usize>, Vec<(usize, usize)>)> {
    let g = alpha.groupoid();
    let mut out: Vec<_> =
        g.morphisms().map(|x| (g.name(x).to_string(), alpha.support(x).ones().collect(), alpha.pairs(x))).collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn restriction_is_transitive(seed in any::<u64>(), pick_h in any::<usize>(), pick_k in any::<usize>()) {
        let alpha = random_action(seed, &RandomConfig::default());
        let g = alpha.groupoid();
        let w = enumerate_wide_subgroupoids(g, DEFAULT_ENUMERATION_CAP).unwrap();
        let h = &w[pick_h % w.len()];
        let below: Vec<&WideSubgroupoid> = w.iter().filter(|k| k.is_subset(h)).collect();
        let k = below[pick_k % below.len()];
        let (sub, back) = g.subgroupoid(h.members()).unwrap();
        let mut inner = FixedBitSet::with_capacity(sub.len());
        for (i, m) in back.iter().enumerate() {
            inner.set(i, k.contains(*m));
        }
        let inner = WideSubgroupoid::new(&sub, inner).unwrap();
        let twice = alpha.restrict(h).unwrap().restrict(&inner).unwrap();
        let once = alpha.restrict(k).unwrap();
        prop_assert_eq!(by_name(&twice), by_name(&once));
    }

    #[test]
    fn orthogonal_supports_partition_the_indices(seed in any::<u64>()) {
        let alpha = random_action(seed, &RandomConfig::orthogonal());
        prop_assert!(alpha.is_orthogonal());
        let g = alpha.groupoid();
        let mut hit = vec![0usize; alpha.dim()];
        for &e in g.objects() {
            for i in alpha.support(e).ones() {
                hit[i] += 1;
            }
        }
        prop_assert!(hit.iter().all(|&c| c == 1));
        for x in g.morphisms() {
            prop_assert!(alpha.support(x).is_subset(alpha.support(g.ran(x))));
        }
    }

    #[test]
    fn larger_subgroupoids_have_coarser_invariants(seed in any::<u64>()) {
        let alpha = random_action(seed, &RandomConfig::default());
        let w = enumerate_wide_subgroupoids(alpha.groupoid(), DEFAULT_ENUMERATION_CAP).unwrap();
        let inv: Vec<_> = w.iter().map(|h| invariants(&alpha, h).unwrap()).collect();
        for (i, h) in w.iter().enumerate() {
            for (j, k) in w.iter().enumerate() {
                if h.is_subset(k) {
                    prop_assert!(inv[j].coarsens(&inv[i]));
                }
            }
            let stab = stabilizer(&alpha, &inv[i]).unwrap();
            prop_assert!(h.iter().all(|x| stab.contains(x)));
        }
    }

    #[test]
    fn accepted_actions_satisfy_the_composition_clauses(seed in any::<u64>()) {
        prop_assert!(random_action(seed, &RandomConfig::default()).inverse_and_image_clauses_hold());
    }
}
