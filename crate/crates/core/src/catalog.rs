//! Built-in example actions.

use std::sync::Arc;

use thiserror::Error;

use crate::action::PartialAction;
use crate::algebra::{BaseRing, IdempotentAlgebra};
use crate::constructions::orthogonalize;
use crate::groupoid::{FiniteGroupoid, RawGroupoid, RawMorphism};
use crate::random::{random_action, RandomConfig};

pub const EXAMPLES: &[&str] = &["s8-example", "non-galois-global", "not-strongly-galois", "s8-orthogonalization"];

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown example `{0}`; known: {known}, random:<seed>", known = EXAMPLES.join(", "))]
    Unknown(String),
}

/// Looks up an example by name; `random:<seed>` draws from the default generator.
pub fn example(name: &str) -> Result<PartialAction, CatalogError> {
    match name {
        "s8-example" => Ok(s8_example()),
        "non-galois-global" => Ok(non_galois_global()),
        "not-strongly-galois" => Ok(not_strongly_galois()),
        "s8-orthogonalization" => Ok(orthogonalize(&s8_example()).expect("orthogonalizes").action),
        _ => match name.strip_prefix("random:").and_then(|s| s.parse::<u64>().ok()) {
            Some(seed) => Ok(random_action(seed, &RandomConfig::default())),
            None => Err(CatalogError::Unknown(name.to_string())),
        },
    }
}

/// `𝒜₂ × (ℤ₂ × ℤ₂)` on objects `f1, f2`, acting on twelve indices.
pub fn s8_groupoid() -> FiniteGroupoid {
    FiniteGroupoid::coarse_named(&["f1", "f2"])
        .and_then(|c| c.product_with_group(&FiniteGroupoid::klein_four()))
        .expect("s8 groupoid")
}

/// `(s,t,ℓ)` sends index `i + 4s` to `ℓ(i) + 4t` for `i < 8`, where the Klein
/// group acts on `0..8` through `g = (01)(23)(45)(67)`, `h = (02)(13)(46)(57)`.
pub fn s8_example() -> PartialAction {
    let g = Arc::new(s8_groupoid());
    let alg = IdempotentAlgebra::new(BaseRing::Rationals, 12).expect("dimension");
    let mut support = Vec::with_capacity(16);
    let mut perm = Vec::with_capacity(16);
    for s in 0..2 {
        for t in 0..2 {
            for l in 0..4 {
                support.push((4 * t..4 * t + 8).collect());
                perm.push((0..8).map(|i| (i + 4 * s, (i ^ l) + 4 * t)).collect());
            }
        }
    }
    PartialAction::new(g, alg, support, perm).expect("s8 example is valid")
}

/// Objects `d`, `r` and `g: d → r`; `S_d = {1,2}`, `S_r = {2,3}`,
/// `π_g(1) = 3`, `π_g(2) = 2`.
pub fn non_galois_global() -> PartialAction {
    let m = |id: &str, dom: &str, ran: &str, inv: &str| RawMorphism {
        id: id.into(),
        dom: dom.into(),
        ran: ran.into(),
        inv: Some(inv.into()),
    };
    let raw = RawGroupoid {
        objects: vec!["d".into(), "r".into()],
        morphisms: vec![
            m("d", "d", "d", "d"),
            m("r", "r", "r", "r"),
            m("g", "d", "r", "g^-1"),
            m("g^-1", "r", "d", "g"),
        ],
        compose: vec![["g".into(), "g^-1".into(), "r".into()], ["g^-1".into(), "g".into(), "d".into()]],
    };
    let g = Arc::new(FiniteGroupoid::from_raw(&raw).expect("two-object groupoid"));
    let alg = IdempotentAlgebra::new(BaseRing::Rationals, 3).expect("dimension");
    PartialAction::new(
        g,
        alg,
        vec![vec![0, 1], vec![1, 2], vec![1, 2], vec![0, 1]],
        vec![vec![(0, 0), (1, 1)], vec![(1, 1), (2, 2)], vec![(0, 2), (1, 1)], vec![(2, 0), (1, 1)]],
    )
    .expect("example is valid")
}

/// Two copies of `ℤ₂`, on objects `f1` and `f2`, both swapping `e₁` and `e₂`.
pub fn not_strongly_galois() -> PartialAction {
    let z2 = |e: &str, x: &str| FiniteGroupoid::group_from_table(&[e, x], &[vec![0, 1], vec![1, 0]]).expect("Z2");
    let (a, b) = (z2("f1", "g"), z2("f2", "h"));
    let g = Arc::new(FiniteGroupoid::disjoint_union(&[&a, &b]).expect("disjoint"));
    let alg = IdempotentAlgebra::new(BaseRing::Rationals, 2).expect("dimension");
    let id = vec![(0, 0), (1, 1)];
    let swap = vec![(0, 1), (1, 0)];
    PartialAction::new(g, alg, vec![vec![0, 1]; 4], vec![id.clone(), swap.clone(), id, swap]).expect("valid")
}
