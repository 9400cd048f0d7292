use std::sync::Arc;

use groupoid_galois::catalog::{non_galois_global, not_strongly_galois, s8_example};
use groupoid_galois::constructions::{find_isomorphism, orthogonalize};
use groupoid_galois::correspondence::{is_strongly_galois, run_global, run_strong, StrongReason};
use groupoid_galois::galois::{invariants_all, is_galois, verify_coordinates, GaloisCoordinates, GaloisDecision};
use groupoid_galois::subgroupoid::{generated_wide_subgroupoid, DEFAULT_ENUMERATION_CAP};
use groupoid_galois::{BaseRing, FiniteGroupoid, IdempotentAlgebra, PartialAction, PartitionSubalgebra};

/// Generators of each wide subgroupoid and its invariant subalgebra, as
/// listed for the twelve-index example (with `K₃` generated by the two
/// `gh` arrows between `f1` and `f2`).
const S8_ROWS: &[(&[&str], &str)] = &[
    (&[], "A"),
    (&["(f1,f1,g)"], "[1,2][3,4][5,6][7,8]"),
    (&["(f1,f1,h)"], "[1,3][2,4][5,7][6,8]"),
    (&["(f1,f1,gh)"], "[1,4][2,3][5,8][6,7]"),
    (&["(f1,f1,g)", "(f1,f1,h)"], "[1,2,3,4][5,6,7,8]"),
    (&["(f2,f2,g)"], "[5,6][7,8][9,10][11,12]"),
    (&["(f2,f2,h)"], "[5,7][6,8][9,11][10,12]"),
    (&["(f2,f2,gh)"], "[5,8][6,7][9,12][10,11]"),
    (&["(f2,f2,g)", "(f2,f2,h)"], "[5,6,7,8][9,10,11,12]"),
    (&["(f1,f1,g)", "(f2,f2,g)"], "[1,2][3,4][5,6][7,8][9,10][11,12]"),
    (&["(f1,f1,g)", "(f2,f2,h)"], "[1,2][3,4][5,6,7,8][9,11][10,12]"),
    (&["(f1,f1,g)", "(f2,f2,gh)"], "[1,2][3,4][5,6,7,8][9,12][10,11]"),
    (&["(f1,f1,g)", "(f2,f2,g)", "(f2,f2,h)"], "[1,2][3,4][5,6,7,8][9,10,11,12]"),
    (&["(f1,f1,h)", "(f2,f2,g)"], "[1,3][2,4][5,6,7,8][9,10][11,12]"),
    (&["(f1,f1,h)", "(f2,f2,h)"], "[1,3][2,4][5,7][6,8][9,11][10,12]"),
    (&["(f1,f1,h)", "(f2,f2,gh)"], "[1,3][2,4][5,6,7,8][9,12][10,11]"),
    (&["(f1,f1,h)", "(f2,f2,g)", "(f2,f2,h)"], "[1,3][2,4][5,6,7,8][9,10,11,12]"),
    (&["(f1,f1,gh)", "(f2,f2,g)"], "[1,4][2,3][5,6,7,8][9,10][11,12]"),
    (&["(f1,f1,gh)", "(f2,f2,h)"], "[1,4][2,3][5,6,7,8][9,11][10,12]"),
    (&["(f1,f1,gh)", "(f2,f2,gh)"], "[1,4][2,3][5,8][6,7][9,12][10,11]"),
    (&["(f1,f1,gh)", "(f2,f2,g)", "(f2,f2,h)"], "[1,4][2,3][5,6,7,8][9,10,11,12]"),
    (&["(f1,f1,g)", "(f1,f1,h)", "(f2,f2,g)"], "[1,2,3,4][5,6,7,8][9,10][11,12]"),
    (&["(f1,f1,g)", "(f1,f1,h)", "(f2,f2,h)"], "[1,2,3,4][5,6,7,8][9,11][10,12]"),
    (&["(f1,f1,g)", "(f1,f1,h)", "(f2,f2,gh)"], "[1,2,3,4][5,6,7,8][9,12][10,11]"),
    (&["(f1,f1,g)", "(f1,f1,h)", "(f2,f2,g)", "(f2,f2,h)"], "[1,2,3,4][5,6,7,8][9,10,11,12]"),
    (&["(f1,f2,1)"], "[1,5,9][2,6,10][3,7,11][4,8,12]"),
    (&["(f1,f2,g)"], "[1,6,9][2,5,10][3,8,11][4,7,12]"),
    (&["(f1,f2,h)"], "[1,7,9][2,8,10][3,5,11][4,6,12]"),
    (&["(f1,f2,gh)"], "[1,8,9][2,7,10][3,6,11][4,5,12]"),
    (&["(f1,f2,1)", "(f1,f2,g)", "(f1,f1,g)", "(f2,f2,g)"], "[1,2,5,6,9,10][3,4,7,8,11,12]"),
    (&["(f1,f2,1)", "(f1,f2,h)", "(f1,f1,h)", "(f2,f2,h)"], "[1,3,5,7,9,11][2,4,6,8,10,12]"),
    (&["(f1,f2,1)", "(f1,f2,gh)", "(f1,f1,gh)", "(f2,f2,gh)"], "[1,4,5,8,9,12][2,3,6,7,10,11]"),
    (&["(f1,f2,1)", "(f1,f1,g)", "(f1,f1,h)"], "[1,2,3,4,5,6,7,8,9,10,11,12]"),
];

#[test]
fn s8_table_contains_every_listed_row() {
    let alpha = s8_example();
    let g = alpha.groupoid();
    let table = run_strong(&alpha, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(S8_ROWS.len(), 33);
    for (gens, brackets) in S8_ROWS {
        let h = generated_wide_subgroupoid(g, gens.iter().map(|n| g.find(n).unwrap()));
        let row = table.row_for(&h).unwrap_or_else(|| panic!("no row for {gens:?}"));
        assert_eq!(row.subalgebra, PartitionSubalgebra::parse(brackets, 12).unwrap(), "{gens:?}");
    }
}

#[test]
fn s8_has_three_rows_beyond_the_listed_ones() {
    let alpha = s8_example();
    let g = alpha.groupoid();
    let table = run_strong(&alpha, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(table.rows.len(), 36);
    let extra = [["(f1,f2,h)", "(f1,f2,gh)"], ["(f1,f2,g)", "(f1,f2,gh)"], ["(f1,f2,g)", "(f1,f2,h)"]];
    let expected = ["[1,2,7,8,9,10][3,4,5,6,11,12]", "[1,3,6,8,9,11][2,4,5,7,10,12]", "[1,4,6,7,9,12][2,3,5,8,10,11]"];
    for (gens, brackets) in extra.iter().zip(expected) {
        let h = generated_wide_subgroupoid(g, gens.iter().map(|n| g.find(n).unwrap()));
        assert_eq!(h.len(), 2 + 6);
        let row = table.row_for(&h).unwrap();
        assert_eq!(row.subalgebra, PartitionSubalgebra::parse(brackets, 12).unwrap());
        let listed =
            S8_ROWS.iter().any(|(gens, _)| generated_wide_subgroupoid(g, gens.iter().map(|n| g.find(n).unwrap())) == h);
        assert!(!listed);
    }
}

#[test]
fn s8_is_strongly_galois_with_standard_coordinates() {
    let alpha = s8_example();
    assert!(alpha.is_global() && !alpha.is_orthogonal());
    assert!(is_strongly_galois(&alpha, DEFAULT_ENUMERATION_CAP).unwrap().strongly_galois);
    assert!(verify_coordinates(&alpha, &GaloisCoordinates::standard(&alpha.algebra())).unwrap());
    assert!(invariants_all(&alpha).num_blocks() == 1);
}

#[test]
fn s8_table_is_independent_of_the_base_ring() {
    let alpha = s8_example();
    let q = run_strong(&alpha, DEFAULT_ENUMERATION_CAP).unwrap();
    for base in ["Fp:2", "Fp:5"] {
        let other = run_strong(&alpha.with_base(base.parse().unwrap()), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(other.render_text(), q.render_text(), "{base}");
        let pairs = |t: &groupoid_galois::CorrespondenceTable| {
            t.rows.iter().map(|r| (r.subgroupoid.clone(), r.subalgebra.clone())).collect::<Vec<_>>()
        };
        assert_eq!(pairs(&other), pairs(&q));
    }
}

#[test]
fn two_object_example_is_not_galois_at_index_two() {
    let beta = non_galois_global();
    assert!(beta.is_global());
    match is_galois(&beta).unwrap() {
        GaloisDecision::NotGalois(o) => {
            assert_eq!(o.g, "g");
            assert_eq!(o.index, 2);
        }
        GaloisDecision::Galois(_) => panic!("expected an obstruction"),
    }
    assert_eq!(invariants_all(&beta), PartitionSubalgebra::parse("[1,3]", 3).unwrap());
}

#[test]
fn two_object_orthogonalization_accepts_the_four_pair_system() {
    let beta = non_galois_global();
    let orth = orthogonalize(&beta).unwrap();
    let eps = &orth.action;
    assert_eq!(eps.dim(), 4);
    assert!(is_galois(eps).unwrap().is_galois());
    let g = beta.groupoid();
    let (d, r) = (g.find("d").unwrap(), g.find("r").unwrap());
    let alg = eps.algebra();
    // (e1,0), (e2,0), (0,e2), (0,e3), each paired with itself.
    let copies = [(d, 0), (d, 1), (r, 1), (r, 2)];
    let pairs = copies
        .iter()
        .map(|&(e, i)| {
            let k = orth.family[e.0][i].unwrap();
            let x = alg.basis(k).unwrap();
            (x.clone(), x)
        })
        .collect();
    let coords = GaloisCoordinates { pairs };
    assert!(verify_coordinates(eps, &coords).unwrap());
    let mut short = coords.clone();
    short.pairs.pop();
    assert!(!verify_coordinates(eps, &short).unwrap());
}

#[test]
fn literal_epsilon_is_isomorphic_to_the_computed_one() {
    let beta = non_galois_global();
    let orth = orthogonalize(&beta).unwrap();
    let g: Arc<FiniteGroupoid> = beta.groupoid_arc().clone();
    let alg = IdempotentAlgebra::new(BaseRing::Rationals, 4).unwrap();
    // (a e1 + b e2, 0) ↦ (0, a e2 + b e3) on E = (Re1 ⊕ Re2) × (Re2 ⊕ Re3).
    let literal = PartialAction::new(
        g,
        alg,
        vec![vec![0, 1], vec![2, 3], vec![2, 3], vec![0, 1]],
        vec![vec![(0, 0), (1, 1)], vec![(2, 2), (3, 3)], vec![(0, 2), (1, 3)], vec![(2, 0), (3, 1)]],
    )
    .unwrap();
    assert!(is_galois(&literal).unwrap().is_galois());
    assert!(find_isomorphism(&literal, &orth.action).is_some());
}

#[test]
fn two_copies_of_z2_are_galois_but_not_strongly() {
    let beta = not_strongly_galois();
    match is_galois(&beta).unwrap() {
        GaloisDecision::Galois(c) => assert_eq!(c, GaloisCoordinates::standard(&beta.algebra())),
        GaloisDecision::NotGalois(o) => panic!("unexpected obstruction {o}"),
    }
    let report = is_strongly_galois(&beta, DEFAULT_ENUMERATION_CAP).unwrap();
    assert!(!report.strongly_galois);
    match report.reason.unwrap() {
        StrongReason::Collision { first, second, subalgebra } => {
            assert_eq!(first, "𝒢₀ ∪ {g}");
            assert_eq!(second, "𝒢₀ ∪ {h}");
            assert_eq!(subalgebra, "[1,2]");
        }
        other => panic!("unexpected reason {other}"),
    }
    let table = run_global(&beta, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(table.render_text(), "𝒢₀ ↔ A\n𝒢 ↔ [1,2]\n");
    assert_eq!(table.rows[1].subalgebra, invariants_all(&beta));
}
