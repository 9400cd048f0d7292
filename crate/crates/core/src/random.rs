//! Seeded random actions for property tests and fuzzing.
//!
//! Each connected component is `𝒜ₙ × G` acting globally and orthogonally
//! through a `G`-set `X` (a union of coset spaces): `(s,t,x)` sends `(y, s)`
//! to `(x·y, t)`. The result is then optionally restricted to a random
//! subset of indices, glued across objects (at most one index per object in
//! each glued class), and shuffled.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::PartialAction;
use crate::algebra::{BaseRing, IdempotentAlgebra};
use crate::constructions::standard_restriction;
use crate::groupoid::{FiniteGroupoid, Morphism};
use crate::subgroupoid::enumerate_wide_subgroupoids;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomConfig {
    pub max_morphisms: usize,
    pub max_dim: usize,
    pub max_components: usize,
    pub prob_restrict: f64,
    pub prob_glue: f64,
    /// Chance that an orbit of `X` is free.
    pub prob_free_orbit: f64,
    pub shuffle: bool,
    pub base: BaseRing,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_morphisms: 16,
            max_dim: 8,
            max_components: 3,
            prob_restrict: 0.5,
            prob_glue: 0.4,
            prob_free_orbit: 0.6,
            shuffle: true,
            base: BaseRing::Rationals,
        }
    }
}

impl RandomConfig {
    /// Global orthogonal actions only.
    pub fn global_orthogonal() -> Self {
        RandomConfig { prob_restrict: 0.0, prob_glue: 0.0, ..Self::default() }
    }

    /// Orthogonal, possibly partial.
    pub fn orthogonal() -> Self {
        RandomConfig { prob_glue: 0.0, ..Self::default() }
    }

    /// Global, possibly non-orthogonal.
    pub fn global() -> Self {
        RandomConfig { prob_restrict: 0.0, ..Self::default() }
    }
}

/// `S₃` as permutations of three points, identity first.
pub fn symmetric3() -> FiniteGroupoid {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    let names = ["1", "(12)", "(13)", "(23)", "(123)", "(132)"];
    let pos = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("closed");
    let mul: Vec<Vec<usize>> =
        perms.iter().map(|a| perms.iter().map(|b| pos([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
    FiniteGroupoid::group_from_table(&names, &mul).expect("S3 table")
}

fn small_groups() -> Vec<FiniteGroupoid> {
    vec![
        FiniteGroupoid::cyclic_group(1).expect("trivial"),
        FiniteGroupoid::cyclic_group(2).expect("Z2"),
        FiniteGroupoid::cyclic_group(3).expect("Z3"),
        FiniteGroupoid::cyclic_group(4).expect("Z4"),
        FiniteGroupoid::klein_four(),
        symmetric3(),
    ]
}

/// Left cosets `yK` of random subgroups `K`, each as an orbit number and a
/// sorted element list.
fn random_gset(rng: &mut ChaCha8Rng, group: &FiniteGroupoid, budget: usize, p_free: f64) -> Vec<(usize, Vec<usize>)> {
    let subgroups: Vec<Vec<usize>> = enumerate_wide_subgroupoids(group, 1 << 12)
        .expect("small group")
        .into_iter()
        .map(|h| h.iter().map(|m| m.0).collect())
        .collect();
    let k = group.len();
    let mut cosets = Vec::new();
    let mut orbit = 0;
    loop {
        let fitting: Vec<&Vec<usize>> = subgroups.iter().filter(|h| k / h.len() <= budget - cosets.len()).collect();
        if fitting.is_empty() {
            break;
        }
        let free = fitting.iter().find(|h| h.len() == 1).copied();
        let sub = match free {
            Some(f) if rng.gen_bool(p_free) => f,
            _ => *fitting.choose(rng).expect("nonempty"),
        };
        let mut seen = FixedBitSet::with_capacity(k);
        for y in 0..k {
            if seen.contains(y) {
                continue;
            }
            let mut coset: Vec<usize> =
                sub.iter().map(|&s| group.compose(Morphism(y), Morphism(s)).expect("group").0).collect();
            coset.sort_unstable();
            for &c in &coset {
                seen.insert(c);
            }
            cosets.push((orbit, coset));
        }
        orbit += 1;
        if cosets.len() >= budget || !rng.gen_bool(0.4) {
            break;
        }
    }
    cosets
}

struct Component {
    groupoid: FiniteGroupoid,
    n: usize,
    group: FiniteGroupoid,
    cosets: Vec<(usize, Vec<usize>)>,
}

/// A random validated action.
pub fn random_action(seed: u64, cfg: &RandomConfig) -> PartialAction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = small_groups();
    let mut comps: Vec<Component> = Vec::new();
    let (mut morphisms, mut dim) = (0, 0);
    let letters = ["a", "b", "c", "d", "e", "f", "g", "h"];
    while comps.len() < cfg.max_components.min(letters.len()) {
        let choices: Vec<(usize, &FiniteGroupoid)> = (1..=4)
            .flat_map(|n| groups.iter().map(move |g| (n, g)))
            .filter(|&(n, g)| morphisms + n * n * g.len() <= cfg.max_morphisms && dim + n <= cfg.max_dim)
            .collect();
        let Some(&(n, group)) = choices.choose(&mut rng) else { break };
        let objects: Vec<String> = (1..=n).map(|i| format!("{}{i}", letters[comps.len()])).collect();
        let groupoid =
            FiniteGroupoid::coarse_named(&objects).and_then(|c| c.product_with_group(group)).expect("small product");
        let cosets = random_gset(&mut rng, group, (cfg.max_dim - dim) / n, cfg.prob_free_orbit);
        morphisms += groupoid.len();
        dim += n * cosets.len();
        comps.push(Component { groupoid, n, group: group.clone(), cosets });
        if !rng.gen_bool(0.5) {
            break;
        }
    }
    let parts: Vec<&FiniteGroupoid> = comps.iter().map(|c| &c.groupoid).collect();
    let g = Arc::new(FiniteGroupoid::disjoint_union(&parts).expect("distinct names"));

    let mut support = vec![Vec::new(); g.len()];
    let mut images: Vec<Vec<Option<usize>>> = vec![vec![None; dim]; g.len()];
    let (mut moff, mut ioff) = (0, 0);
    for c in &comps {
        let k = c.group.len();
        let xs = c.cosets.len();
        let index = |y: usize, s: usize| ioff + s * xs + y;
        let coset_of = |orbit: usize, elements: &[usize]| -> usize {
            let mut e = elements.to_vec();
            e.sort_unstable();
            c.cosets.iter().position(|q| q.0 == orbit && q.1 == e).expect("cosets are permuted")
        };
        for s in 0..c.n {
            for t in 0..c.n {
                for x in 0..k {
                    let mi = moff + (s * c.n + t) * k + x;
                    support[mi] = (0..xs).map(|y| index(y, t)).collect();
                    for (y, (orbit, coset)) in c.cosets.iter().enumerate() {
                        let moved: Vec<usize> = coset
                            .iter()
                            .map(|&z| c.group.compose(Morphism(x), Morphism(z)).expect("group").0)
                            .collect();
                        images[mi][index(y, s)] = Some(index(coset_of(*orbit, &moved), t));
                    }
                }
            }
        }
        moff += c.groupoid.len();
        ioff += c.n * xs;
    }
    let algebra = IdempotentAlgebra::new(cfg.base, dim).expect("small dimension");
    let mut action = PartialAction::from_maps(g, algebra, support, &images).expect("coset actions are valid");

    if dim > 0 && rng.gen_bool(cfg.prob_restrict) {
        let mut keep = FixedBitSet::with_capacity(dim);
        for i in 0..dim {
            keep.set(i, rng.gen_bool(0.7));
        }
        if keep.is_clear() {
            keep.insert(rng.gen_range(0..dim));
        }
        action = standard_restriction(&action, &keep).expect("subset fits").0;
    }
    if rng.gen_bool(cfg.prob_glue) {
        action = glue(&mut rng, &action);
    }
    if cfg.shuffle {
        let mut order: Vec<usize> = (0..action.groupoid().len()).collect();
        order.shuffle(&mut rng);
        let mut relabel_idx: Vec<usize> = (0..action.dim()).collect();
        relabel_idx.shuffle(&mut rng);
        action = relabel(&action, &order, &relabel_idx);
    }
    action
}

/// Merges indices of an orthogonal action lying over different objects.
fn glue(rng: &mut ChaCha8Rng, alpha: &PartialAction) -> PartialAction {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let owner: Vec<usize> =
        (0..m).map(|i| g.objects().iter().position(|&e| alpha.support(e).contains(i)).expect("covering")).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0; m];
    for i in order {
        let open: Vec<usize> =
            (0..classes.len()).filter(|&c| classes[c].iter().all(|&j| owner[j] != owner[i])).collect();
        let target = match open.choose(rng) {
            Some(&c) if rng.gen_bool(0.5) => c,
            _ => {
                classes.push(Vec::new());
                classes.len() - 1
            }
        };
        classes[target].push(i);
        class_of[i] = target;
    }
    let dim = classes.len();
    let support = g
        .morphisms()
        .map(|x| {
            let mut s: Vec<usize> = alpha.support(x).ones().map(|i| class_of[i]).collect();
            s.sort_unstable();
            s
        })
        .collect();
    let images: Vec<Vec<Option<usize>>> = g
        .morphisms()
        .map(|x| {
            let mut row = vec![None; dim];
            for (i, j) in alpha.pairs(x) {
                row[class_of[i]] = Some(class_of[j]);
            }
            row
        })
        .collect();
    let algebra = IdempotentAlgebra { base: alpha.base(), dim };
    PartialAction::from_maps(alpha.groupoid_arc().clone(), algebra, support, &images).expect("gluing keeps the axioms")
}

/// Reorders morphisms (`order[new] = old`) and renames indices (`index[old] = new`).
pub fn relabel(alpha: &PartialAction, order: &[usize], index: &[usize]) -> PartialAction {
    let g = alpha.groupoid();
    let mut raw = g.to_raw();
    raw.morphisms = order.iter().map(|&i| raw.morphisms[i].clone()).collect();
    let h = Arc::new(FiniteGroupoid::from_raw(&raw).expect("reordered groupoid"));
    let old = |x: Morphism| g.find(h.name(x)).expect("same names");
    let support = h.morphisms().map(|x| alpha.support(old(x)).ones().map(|i| index[i]).collect()).collect();
    let perm =
        h.morphisms().map(|x| alpha.pairs(old(x)).into_iter().map(|(a, b)| (index[a], index[b])).collect()).collect();
    PartialAction::new(h, alpha.algebra(), support, perm).expect("relabelled action")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_is_a_group() {
        let s3 = symmetric3();
        assert_eq!(s3.len(), 6);
        assert_eq!(enumerate_wide_subgroupoids(&s3, 1000).unwrap().len(), 6);
    }

    #[test]
    fn deterministic_and_in_bounds() {
        let cfg = RandomConfig::default();
        for seed in 0..300 {
            let a = random_action(seed, &cfg);
            assert!(a.groupoid().len() <= 16);
            assert!(a.dim() <= 8);
            assert_eq!(a, random_action(seed, &cfg));
        }
    }

    #[test]
    fn variants_respect_shape() {
        for seed in 0..100 {
            let a = random_action(seed, &RandomConfig::global_orthogonal());
            assert!(a.is_global() && a.is_orthogonal());
            assert!(random_action(seed, &RandomConfig::orthogonal()).is_orthogonal());
            assert!(random_action(seed, &RandomConfig::global()).is_global());
        }
    }

    #[test]
    fn variety() {
        let cfg = RandomConfig::default();
        let actions: Vec<PartialAction> = (0..200).map(|s| random_action(s, &cfg)).collect();
        assert!(actions.iter().any(|a| !a.is_orthogonal()));
        assert!(actions.iter().any(|a| !a.is_global()));
        assert!(actions.iter().any(|a| a.groupoid().connected_components().len() > 1));
    }
}
