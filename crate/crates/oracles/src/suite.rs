//! Seeded property suite: every property draws actions from the random
//! generator and compares production results with the oracles above.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use groupoid_galois::action::identity_family;
use groupoid_galois::constructions::{
    find_isomorphism, globalize, globalize_with_order, orthogonalize, verify_globalization, GermOrder,
};
use groupoid_galois::correspondence::{is_strongly_galois, run_global, run_orthogonal, run_strong, sim_classes, trace};
use groupoid_galois::galois::{
    invariants, invariants_all, is_alpha_strong, is_galois, separability_witness, stabilizer,
};
use groupoid_galois::random::{random_action, RandomConfig};
use groupoid_galois::subgroupoid::{enumerate_wide_subgroupoids, join, WideSubgroupoid, DEFAULT_ENUMERATION_CAP};
use groupoid_galois::{Morphism, PartialAction, PartitionSubalgebra};

use crate::{
    alpha_strong_exhaustive, block_vectors, brute_force_wide_subgroupoids, galois_gram_oracle, invariants_kernel,
    same_span, span_intersection, stabilizer_by_definition, Vector, Q,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Hypotheses not met; the instance does not count.
    Skip,
    Fail(String),
}

pub struct Property {
    pub name: &'static str,
    pub config: fn() -> RandomConfig,
    pub check: fn(&PartialAction) -> Verdict,
}

impl Property {
    pub fn instance(&self, seed: u64) -> PartialAction {
        random_action(seed, &(self.config)())
    }

    pub fn run(&self, seed: u64) -> Verdict {
        (self.check)(&self.instance(seed))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertyRun {
    pub name: &'static str,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<(u64, String)>,
}

/// Runs seeds `start, start + 1, …` until `target` instances qualify or
/// `max_seeds` seeds have been drawn.
pub fn run_until(p: &Property, start: u64, target: usize, max_seeds: u64) -> PropertyRun {
    let mut out = PropertyRun { name: p.name, ..PropertyRun::default() };
    for seed in start..start.saturating_add(max_seeds) {
        if out.checked >= target {
            break;
        }
        match p.run(seed) {
            Verdict::Pass => out.checked += 1,
            Verdict::Skip => out.skipped += 1,
            Verdict::Fail(msg) => {
                out.checked += 1;
                out.failures.push((seed, msg));
            }
        }
    }
    out
}

/// Every property on seeds `start..start + instances`.
pub fn fuzz(start: u64, instances: u64) -> Vec<PropertyRun> {
    properties()
        .iter()
        .map(|p| {
            let mut out = PropertyRun { name: p.name, ..PropertyRun::default() };
            for seed in start..start.saturating_add(instances) {
                match p.run(seed) {
                    Verdict::Pass => out.checked += 1,
                    Verdict::Skip => out.skipped += 1,
                    Verdict::Fail(msg) => {
                        out.checked += 1;
                        out.failures.push((seed, msg));
                    }
                }
            }
            out
        })
        .collect()
}

pub fn property(name: &str) -> Option<&'static Property> {
    properties().iter().find(|p| p.name == name)
}

pub fn properties() -> &'static [Property] {
    const LIST: &[Property] = &[
        Property { name: "galois-gram", config: RandomConfig::default, check: galois_gram },
        Property { name: "invariants-kernel", config: RandomConfig::default, check: invariants_vs_kernel },
        Property { name: "alpha-strong-exhaustive", config: RandomConfig::default, check: alpha_strong_vs_exhaustive },
        Property { name: "enumeration-brute-force", config: RandomConfig::default, check: enumeration_vs_brute_force },
        Property { name: "inverse-and-image-clauses", config: RandomConfig::default, check: inverse_and_image_clauses },
        Property {
            name: "orthogonal-globalization-galois",
            config: RandomConfig::orthogonal,
            check: orthogonal_globalization_galois,
        },
        Property { name: "galois-separable-strong", config: RandomConfig::default, check: galois_separable_strong },
        Property { name: "shared-globalization", config: RandomConfig::default, check: shared_globalization },
        Property {
            name: "orthogonalization-keeps-galois",
            config: RandomConfig::default,
            check: orthogonalization_keeps_galois,
        },
        Property {
            name: "globalization-keeps-galois",
            config: RandomConfig::default,
            check: globalization_keeps_galois,
        },
        Property { name: "trace-is-invariants", config: RandomConfig::default, check: trace_is_invariants },
        Property { name: "join-invariance", config: RandomConfig::global, check: join_invariance },
        Property {
            name: "orthogonal-correspondence",
            config: RandomConfig::orthogonal,
            check: orthogonal_correspondence,
        },
        Property { name: "strong-correspondence", config: RandomConfig::default, check: strong_correspondence },
        Property { name: "global-correspondence", config: RandomConfig::global, check: global_correspondence },
        Property { name: "globalization", config: RandomConfig::default, check: globalization_contract },
        Property { name: "global-fixed-point", config: RandomConfig::global, check: global_fixed_point },
        Property { name: "globalization-uniqueness", config: RandomConfig::default, check: globalization_uniqueness },
        Property { name: "orthogonalization", config: RandomConfig::default, check: orthogonalization_contract },
    ];
    LIST
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Verdict::Fail(format!($($arg)+));
        }
    };
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Verdict::Fail(format!("{}: {err}", stringify!($e))),
        }
    };
}

fn wide(alpha: &PartialAction) -> Result<Vec<WideSubgroupoid>, String> {
    enumerate_wide_subgroupoids(alpha.groupoid(), DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())
}

fn galois(alpha: &PartialAction) -> Result<bool, String> {
    is_galois(alpha).map(|d| d.is_galois()).map_err(|e| e.to_string())
}

fn nonempty(alpha: &PartialAction) -> bool {
    alpha.groupoid().objects().iter().all(|&e| !alpha.support(e).is_clear())
}

fn label(alpha: &PartialAction, h: &WideSubgroupoid) -> String {
    h.describe(alpha.groupoid())
}

fn galois_gram(alpha: &PartialAction) -> Verdict {
    let fast = attempt!(galois(alpha));
    let oracle = galois_gram_oracle(alpha);
    ensure!(fast == oracle, "is_galois = {fast}, Gram system solvable = {oracle}");
    Verdict::Pass
}

fn invariants_vs_kernel(alpha: &PartialAction) -> Verdict {
    let m = alpha.dim();
    for h in attempt!(wide(alpha)) {
        let c = attempt!(invariants(alpha, &h));
        let kernel = invariants_kernel(alpha, h.members());
        ensure!(
            same_span(&block_vectors(c.blocks(), m), &kernel, m),
            "invariants of {} are {c}, kernel has dimension {}",
            label(alpha, &h),
            kernel.len()
        );
    }
    Verdict::Pass
}

fn alpha_strong_vs_exhaustive(alpha: &PartialAction) -> Verdict {
    let m = alpha.dim();
    let mut candidates = vec![PartitionSubalgebra::discrete(m), PartitionSubalgebra::indiscrete(m)];
    let pairs: Vec<Vec<usize>> = (0..m).step_by(2).map(|i| (i..(i + 2).min(m)).collect()).collect();
    candidates.push(attempt!(PartitionSubalgebra::from_blocks(m, &pairs)));
    for h in attempt!(wide(alpha)) {
        candidates.push(attempt!(invariants(alpha, &h)));
    }
    let mut seen = HashSet::new();
    for c in candidates.into_iter().filter(|c| seen.insert(c.clone())) {
        let fast = attempt!(is_alpha_strong(alpha, &c));
        let slow = alpha_strong_exhaustive(alpha, c.blocks());
        ensure!(fast == slow, "C = {c}: fast criterion {fast}, exhaustive {slow}");
    }
    Verdict::Pass
}

fn enumeration_vs_brute_force(alpha: &PartialAction) -> Verdict {
    let g = alpha.groupoid();
    if g.len() > 10 {
        return Verdict::Skip;
    }
    let fast: HashSet<FixedBitSet> = attempt!(wide(alpha)).into_iter().map(|h| h.members().clone()).collect();
    let slow: HashSet<FixedBitSet> = brute_force_wide_subgroupoids(g).into_iter().collect();
    ensure!(fast == slow, "enumeration found {}, brute force {}", fast.len(), slow.len());
    Verdict::Pass
}

fn inverse_and_image_clauses(alpha: &PartialAction) -> Verdict {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let map = |x: Morphism| {
        let mut v = vec![None; m];
        for (i, j) in alpha.pairs(x) {
            v[i] = Some(j);
        }
        v
    };
    let maps: Vec<Vec<Option<usize>>> = g.morphisms().map(map).collect();
    for x in g.morphisms() {
        let xi = g.inverse(x);
        for (i, j) in maps[x.0].iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j))) {
            ensure!(maps[xi.0][j] == Some(i), "π of {} is not inverse to that of {}", g.name(xi), g.name(x));
        }
    }
    for a in g.morphisms() {
        let a_inv = g.inverse(a);
        for b in g.morphisms() {
            let Some(ab) = g.compose(a, b) else { continue };
            let lhs: HashSet<usize> = alpha
                .support(a_inv)
                .ones()
                .filter(|&i| alpha.support(b).contains(i))
                .filter_map(|i| maps[a.0][i])
                .collect();
            let rhs: HashSet<usize> = alpha.support(a).ones().filter(|&i| alpha.support(ab).contains(i)).collect();
            ensure!(lhs == rhs, "image clause fails for {} and {}", g.name(a), g.name(b));
        }
    }
    ensure!(
        alpha.inverse_and_image_clauses_hold(),
        "inverse_and_image_clauses_hold rejects an action the oracle accepts"
    );
    Verdict::Pass
}

fn orthogonal_globalization_galois(alpha: &PartialAction) -> Verdict {
    if !alpha.is_orthogonal() {
        return Verdict::Skip;
    }
    let beta = attempt!(globalize(alpha)).action;
    let (a, b) = (attempt!(galois(alpha)), attempt!(galois(&beta)));
    ensure!(a == b, "α Galois {a}, globalization Galois {b}");
    Verdict::Pass
}

/// `stabilizer(α, A) = 𝒢₀`: only identities fix every element.
fn faithful(alpha: &PartialAction) -> Result<bool, String> {
    let s = stabilizer(alpha, &PartitionSubalgebra::discrete(alpha.dim())).map_err(|e| e.to_string())?;
    Ok(alpha.groupoid().morphisms().all(|x| s.contains(x) == alpha.groupoid().is_object(x)))
}

fn separable_and_strong(alpha: &PartialAction) -> Result<bool, String> {
    let a = PartitionSubalgebra::discrete(alpha.dim());
    let sep = separability_witness(&alpha.algebra(), &a, &invariants_all(alpha)).is_ok();
    let strong = is_alpha_strong(alpha, &a).map_err(|e| e.to_string())?;
    Ok(sep && strong)
}

/// Galois implies separable and α-strong everywhere; the converse is
/// asserted where only identities fix all of `A`.
fn galois_separable_strong(alpha: &PartialAction) -> Verdict {
    let gal = attempt!(galois(alpha));
    let rhs = attempt!(separable_and_strong(alpha));
    if gal {
        ensure!(rhs, "Galois but not separable and α-strong");
    }
    if attempt!(faithful(alpha)) {
        ensure!(gal == rhs, "faithful action: Galois {gal}, separable and α-strong {rhs}");
    }
    Verdict::Pass
}

/// Literal form of the separable-and-strong characterisation, with no
/// faithfulness hypothesis.
pub fn galois_separable_strong_unrestricted(alpha: &PartialAction) -> Verdict {
    let gal = attempt!(galois(alpha));
    let rhs = attempt!(separable_and_strong(alpha));
    ensure!(gal == rhs, "Galois {gal}, separable and α-strong {rhs}");
    Verdict::Pass
}

/// One globalization serves both `α` and its orthogonalization.
fn shared_globalization(alpha: &PartialAction) -> Verdict {
    let orth = attempt!(orthogonalize(alpha));
    let ga = attempt!(globalize(alpha));
    let ge = attempt!(globalize(&orth.action));
    ensure!(ga.report.all_passed(), "globalization of α: {}", ga.report);
    ensure!(ge.report.all_passed(), "globalization of ε: {}", ge.report);
    let g = alpha.groupoid();
    // ε-index k is the copy of α-index i over e, so φ^B_e(i) serves both.
    let mut via_alpha = vec![vec![None; orth.action.dim()]; g.len()];
    for (k, &(e, i)) in orth.tags.iter().enumerate() {
        via_alpha[e.0][k] = ga.embedding[e.0][i];
    }
    let r = verify_globalization(&orth.action, &ga.action, &via_alpha);
    ensure!(r.all_passed(), "globalization of α against ε: {r}");
    let mut via_eps = vec![vec![None; alpha.dim()]; g.len()];
    for &e in g.objects() {
        for i in alpha.support(e).ones() {
            via_eps[e.0][i] = orth.family[e.0][i].and_then(|k| ge.embedding[e.0][k]);
        }
    }
    let r = verify_globalization(alpha, &ge.action, &via_eps);
    ensure!(r.all_passed(), "globalization of ε against α: {r}");
    Verdict::Pass
}

fn orthogonalization_keeps_galois(alpha: &PartialAction) -> Verdict {
    if !attempt!(galois(alpha)) {
        return Verdict::Skip;
    }
    let orth = attempt!(orthogonalize(alpha));
    ensure!(attempt!(galois(&orth.action)), "α is Galois but ε is not");
    Verdict::Pass
}

fn globalization_keeps_galois(alpha: &PartialAction) -> Verdict {
    if !attempt!(galois(alpha)) {
        return Verdict::Skip;
    }
    let beta = attempt!(globalize(alpha)).action;
    ensure!(attempt!(galois(&beta)), "α is Galois but its globalization is not");
    Verdict::Pass
}

fn push(orth_tags: &[(Morphism, usize)], v: &[Q]) -> Vector {
    orth_tags.iter().map(|&(_, i)| v[i].clone()).collect()
}

/// `φ(A^{α|H}) = E^{ε|H} ∩ φ(A)` for every wide `H`, by linear algebra.
fn trace_is_invariants(alpha: &PartialAction) -> Verdict {
    let orth = attempt!(orthogonalize(alpha));
    let m = alpha.dim();
    let n = orth.action.dim();
    let image: Vec<Vector> =
        block_vectors(&(0..m).map(|i| vec![i]).collect::<Vec<_>>(), m).iter().map(|v| push(&orth.tags, v)).collect();
    for h in attempt!(wide(alpha)) {
        let lhs: Vec<Vector> = invariants_kernel(alpha, h.members()).iter().map(|v| push(&orth.tags, v)).collect();
        let rhs = span_intersection(&invariants_kernel(&orth.action, h.members()), &image, n);
        ensure!(same_span(&lhs, &rhs, n), "spans differ for {}", label(alpha, &h));
        let t = attempt!(trace(&orth, &h));
        let c = attempt!(invariants(alpha, &h));
        ensure!(t == c, "trace {t} differs from invariants {c} for {}", label(alpha, &h));
    }
    Verdict::Pass
}

/// Equal invariants for `H₁`, `H₂` carry over to the subgroupoid they generate.
fn join_invariance(beta: &PartialAction) -> Verdict {
    let g = beta.groupoid();
    let w = attempt!(wide(beta));
    let inv: Vec<PartitionSubalgebra> = attempt!(w.iter().map(|h| invariants(beta, h)).collect::<Result<Vec<_>, _>>());
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if inv[i] != inv[j] {
                continue;
            }
            let h = join(g, &w[i], &w[j]);
            let c = attempt!(invariants(beta, &h));
            ensure!(
                c == inv[i],
                "{} and {} share {}, their join has {c}",
                label(beta, &w[i]),
                label(beta, &w[j]),
                inv[i]
            );
        }
    }
    Verdict::Pass
}

fn orthogonal_correspondence(alpha: &PartialAction) -> Verdict {
    if !alpha.is_orthogonal() || !alpha.empty_supports().is_empty() || !attempt!(galois(alpha)) {
        return Verdict::Skip;
    }
    let table = attempt!(run_orthogonal(alpha, DEFAULT_ENUMERATION_CAP));
    ensure!(table.rows.len() == attempt!(wide(alpha)).len(), "table misses members of W");
    let mut seen = HashSet::new();
    for row in &table.rows {
        let stab = stabilizer_by_definition(alpha, row.subalgebra.blocks());
        ensure!(stab == *row.subgroupoid.members(), "𝒢_C ≠ H for {}", label(alpha, &row.subgroupoid));
        ensure!(seen.insert(row.subalgebra.clone()), "{} repeats", row.subalgebra);
    }
    Verdict::Pass
}

fn strong_correspondence(alpha: &PartialAction) -> Verdict {
    if !attempt!(is_strongly_galois(alpha, DEFAULT_ENUMERATION_CAP)).strongly_galois {
        return Verdict::Skip;
    }
    let orth = attempt!(orthogonalize(alpha));
    let table = attempt!(run_strong(alpha, DEFAULT_ENUMERATION_CAP));
    ensure!(table.rows.len() == attempt!(wide(alpha)).len(), "table misses members of W");
    let mut seen = HashSet::new();
    for row in &table.rows {
        let pushed = attempt!(orth.push_forward(&row.subalgebra));
        let stab = stabilizer_by_definition(&orth.action, pushed.blocks());
        ensure!(stab == *row.subgroupoid.members(), "𝒢_φ(C) ≠ H for {}", label(alpha, &row.subgroupoid));
        ensure!(seen.insert(row.subalgebra.clone()), "{} repeats", row.subalgebra);
    }
    Verdict::Pass
}

fn global_correspondence(beta: &PartialAction) -> Verdict {
    if !beta.is_global() || !nonempty(beta) || !attempt!(galois(beta)) {
        return Verdict::Skip;
    }
    let table = attempt!(run_global(beta, DEFAULT_ENUMERATION_CAP));
    let classes = attempt!(sim_classes(beta, DEFAULT_ENUMERATION_CAP));
    let distinct: HashSet<PartitionSubalgebra> =
        attempt!(attempt!(wide(beta)).iter().map(|h| invariants(beta, h)).collect::<Result<HashSet<_>, _>>());
    ensure!(table.rows.len() == distinct.len(), "{} rows for {} distinct invariants", table.rows.len(), distinct.len());
    for (row, class) in table.rows.iter().zip(&classes) {
        ensure!(row.subgroupoid == class.max, "row order differs from class order");
        for h in &class.members {
            let c = attempt!(invariants(beta, h));
            ensure!(c == row.subalgebra, "{} has {c}, its class maximum has {}", label(beta, h), row.subalgebra);
            ensure!(h.is_subset(&class.max), "{} is not below its class maximum", label(beta, h));
        }
    }
    Verdict::Pass
}

fn globalization_contract(alpha: &PartialAction) -> Verdict {
    let glob = attempt!(globalize(alpha));
    ensure!(glob.report.all_passed(), "{}", glob.report);
    let again = verify_globalization(alpha, &glob.action, &glob.embedding);
    ensure!(again.all_passed(), "{again}");
    Verdict::Pass
}

/// A global action is its own globalization; for orthogonal ones the germ
/// construction returns an isomorphic copy.
fn global_fixed_point(beta: &PartialAction) -> Verdict {
    if !beta.is_global() {
        return Verdict::Skip;
    }
    let r = verify_globalization(beta, beta, &identity_family(beta));
    ensure!(r.all_passed(), "identity embedding: {r}");
    if beta.is_orthogonal() {
        let glob = attempt!(globalize(beta));
        ensure!(find_isomorphism(&glob.action, beta).is_some(), "B is not isomorphic to A");
    }
    Verdict::Pass
}

fn globalization_uniqueness(alpha: &PartialAction) -> Verdict {
    if alpha.groupoid().len() > 8 || alpha.dim() > 6 {
        return Verdict::Skip;
    }
    let a = attempt!(globalize_with_order(alpha, GermOrder::Forward));
    let b = attempt!(globalize_with_order(alpha, GermOrder::Reverse));
    ensure!(a.class_counts() == b.class_counts(), "class counts {:?} vs {:?}", a.class_counts(), b.class_counts());
    ensure!(find_isomorphism(&a.action, &b.action).is_some(), "no isomorphism between the two globalizations");
    Verdict::Pass
}

fn orthogonalization_contract(alpha: &PartialAction) -> Verdict {
    let orth = attempt!(orthogonalize(alpha));
    let g = alpha.groupoid();
    let expected: usize = g.objects().iter().map(|&e| alpha.support(e).count_ones(..)).sum();
    ensure!(orth.action.dim() == expected, "E has {} minimal idempotents, expected {expected}", orth.action.dim());
    ensure!(orth.action.is_orthogonal(), "ε is not orthogonal");
    let eq = attempt!(groupoid_galois::action::check_equivalence(alpha, &orth.action, &orth.family));
    ensure!(eq, "ε is not equivalent to α");
    Verdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: HashSet<&str> = properties().iter().map(|p| p.name).collect();
        assert_eq!(names.len(), properties().len());
        assert!(property("trace-is-invariants").is_some());
    }

    #[test]
    fn seed_replay_is_deterministic() {
        for p in properties() {
            assert_eq!(p.run(3), p.run(3), "{}", p.name);
        }
    }

    #[test]
    fn zero_instances_give_empty_runs() {
        assert!(fuzz(0, 0).iter().all(|r| r.checked == 0 && r.skipped == 0 && r.failures.is_empty()));
    }
}
