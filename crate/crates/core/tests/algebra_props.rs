use groupoid_galois::algebra::{BaseRing, IdempotentAlgebra};
use groupoid_galois::partition::parse_brackets;
use groupoid_galois::PartitionSubalgebra;
use groupoid_galois_oracles::{block_vectors, idempotents_by_search, same_span, span_intersection};
use proptest::prelude::*;

fn partition(m: usize) -> impl Strategy<Value = PartitionSubalgebra> {
    proptest::collection::vec(0usize..4, m).prop_map(|labels| PartitionSubalgebra::from_labels(&labels))
}

fn two_partitions() -> impl Strategy<Value = (PartitionSubalgebra, PartitionSubalgebra)> {
    (1usize..=8).prop_flat_map(|m| (partition(m), partition(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn idempotents_match_coefficientwise_search(m in 1usize..=6, mask in any::<u8>()) {
        let support: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, m).unwrap();
        let mut fast: Vec<Vec<String>> = alg.all_idempotents(&support, 8).unwrap().iter().map(|x| x.to_strings()).collect();
        let mut slow: Vec<Vec<String>> = idempotents_by_search(m, &support)
            .iter()
            .map(|c| c.iter().map(|v| v.to_string()).collect())
            .collect();
        fast.sort();
        slow.sort();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn meet_is_span_intersection((a, b) in two_partitions()) {
        let m = a.dim();
        let meet = a.meet_as_intersection(&b).unwrap();
        let oracle = span_intersection(&block_vectors(a.blocks(), m), &block_vectors(b.blocks(), m), m);
        prop_assert!(same_span(&block_vectors(meet.blocks(), m), &oracle, m));
        prop_assert!(meet.coarsens(&a) && meet.coarsens(&b));
    }

    #[test]
    fn brackets_round_trip(c in (1usize..=12).prop_flat_map(partition)) {
        let text = c.render();
        prop_assert_eq!(PartitionSubalgebra::parse(&text, c.dim()).unwrap(), c.clone());
        prop_assert_eq!(parse_brackets(&text).unwrap(), c.blocks_one_based().into_iter().filter(|b| b.len() > 1).collect::<Vec<_>>());
    }
}

#[test]
fn finite_field_idempotents_are_zero_one() {
    for base in [BaseRing::PrimeField(2), BaseRing::PrimeField(5)] {
        let alg = IdempotentAlgebra::new(base, 3).unwrap();
        let all = alg.all_idempotents(&[0, 1, 2], 8).unwrap();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|x| x.is_idempotent()));
    }
}
