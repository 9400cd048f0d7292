//! Orthogonalization, globalization and standard restriction.

use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::action::{check_equivalence, ActionError, IndexFamily, PartialAction};
use crate::algebra::{IdempotentAlgebra, RingElement};
use crate::groupoid::Morphism;
use crate::partition::{PartitionError, PartitionSubalgebra};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("constructed action failed validation: {0}")]
    ValidationFailed(ActionError),
    #[error("globalization failed verification: {0}")]
    GlobalizationVerificationFailed(GlobalizationReport),
    #[error("orthogonalization failed verification: {0}")]
    OrthogonalizationVerificationFailed(String),
    #[error("{0}")]
    InconsistentGerms(String),
    #[error("index set does not fit the action: {0}")]
    BadIndexSet(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Orthogonal action `ε` on `E = ∏_e A_e`, equivalent to the source action.
#[derive(Clone, Debug)]
pub struct Orthogonalization {
    pub action: PartialAction,
    /// E-index `k` is the copy of source index `tags[k].1` inside `A_{tags[k].0}`.
    pub tags: Vec<(Morphism, usize)>,
    /// `φ_e`, from source indices to E-indices.
    pub family: IndexFamily,
    source_dim: usize,
}

impl Orthogonalization {
    /// `φ(a) = (φ_e(a·1_e))_e`.
    pub fn phi(&self, a: &RingElement) -> Result<RingElement, ConstructionError> {
        if a.coeffs().len() != self.source_dim {
            return Err(ConstructionError::BadIndexSet("element of the wrong algebra".into()));
        }
        let alg = self.action.algebra();
        let coeffs = self.tags.iter().map(|&(_, i)| a.coeff(i).clone()).collect();
        alg.element(coeffs).map_err(|e| ConstructionError::ValidationFailed(e.into()))
    }

    /// `φ(A)` as a partition of E-indices: copies of one source index share a block.
    pub fn image_partition(&self) -> PartitionSubalgebra {
        let labels: Vec<usize> = self.tags.iter().map(|&(_, i)| i).collect();
        PartitionSubalgebra::from_labels(&labels)
    }

    /// `φ(C)` for a partition subalgebra `C` of the source.
    pub fn push_forward(&self, c: &PartitionSubalgebra) -> Result<PartitionSubalgebra, ConstructionError> {
        if c.dim() != self.source_dim {
            return Err(PartitionError::AlgebraMismatch(c.dim(), self.source_dim).into());
        }
        let labels: Vec<usize> = self.tags.iter().map(|&(_, i)| c.block_of(i)).collect();
        Ok(PartitionSubalgebra::from_labels(&labels))
    }

    /// `φ⁻¹(T)` for a subalgebra `T ⊆ φ(A)` of E.
    pub fn pull_back(&self, t: &PartitionSubalgebra) -> Result<PartitionSubalgebra, ConstructionError> {
        let image = self.image_partition();
        if !t.coarsens(&image) {
            return Err(PartitionError::NotCoarsening(t.render()).into());
        }
        let mut label = vec![usize::MAX; self.source_dim];
        for (k, &(_, i)) in self.tags.iter().enumerate() {
            label[i] = t.block_of(k);
        }
        Ok(PartitionSubalgebra::from_labels(&label))
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }
}

/// Builds `ε` with E-indices ordered by object, then by source index, and
/// checks it is orthogonal and equivalent to `alpha`.
pub fn orthogonalize(alpha: &PartialAction) -> Result<Orthogonalization, ConstructionError> {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let mut tags = Vec::new();
    let mut family: IndexFamily = vec![vec![None; m]; g.len()];
    for &e in g.objects() {
        for i in alpha.support(e).ones() {
            family[e.0][i] = Some(tags.len());
            tags.push((e, i));
        }
    }
    let dim = tags.len();
    let algebra = IdempotentAlgebra { base: alpha.base(), dim };
    let mut support = Vec::with_capacity(g.len());
    let mut images = Vec::with_capacity(g.len());
    for x in g.morphisms() {
        let (d, r) = (g.dom(x), g.ran(x));
        support.push(alpha.support(x).ones().map(|i| family[r.0][i].expect("S_g ⊆ S_r(g)")).collect());
        let mut row = vec![None; dim];
        for i in alpha.support(g.inverse(x)).ones() {
            let j = alpha.image(x, i).expect("validated");
            row[family[d.0][i].expect("S_g⁻¹ ⊆ S_d(g)")] = family[r.0][j];
        }
        images.push(row);
    }
    let action = PartialAction::from_maps(alpha.groupoid_arc().clone(), algebra, support, &images)
        .map_err(ConstructionError::ValidationFailed)?;
    if !action.is_orthogonal() {
        return Err(ConstructionError::OrthogonalizationVerificationFailed("result is not orthogonal".into()));
    }
    let equivalent = check_equivalence(alpha, &action, &family).map_err(ConstructionError::ValidationFailed)?;
    if !equivalent {
        return Err(ConstructionError::OrthogonalizationVerificationFailed(
            "result is not equivalent to the source".into(),
        ));
    }
    Ok(Orthogonalization { action, tags, family, source_dim: m })
}

/// Pass/fail for one globalization clause, with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Clause {
    fn pass() -> Self {
        Clause { passed: true, witness: None }
    }

    fn fail(w: String) -> Self {
        Clause { passed: false, witness: Some(w) }
    }

    fn first(failures: impl IntoIterator<Item = String>) -> Self {
        match failures.into_iter().next() {
            Some(w) => Self::fail(w),
            None => Self::pass(),
        }
    }
}

/// Clause-by-clause result of [`verify_globalization`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalizationReport {
    pub global: Clause,
    pub embeddings: Clause,
    pub g1: Clause,
    pub g2: Clause,
    pub g3: Clause,
    pub g4: Clause,
}

impl GlobalizationReport {
    pub fn all_passed(&self) -> bool {
        [&self.global, &self.embeddings, &self.g1, &self.g2, &self.g3, &self.g4].iter().all(|c| c.passed)
    }
}

impl fmt::Display for GlobalizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = [
            ("global", &self.global),
            ("embeddings", &self.embeddings),
            ("G1", &self.g1),
            ("G2", &self.g2),
            ("G3", &self.g3),
            ("G4", &self.g4),
        ];
        let failed: Vec<String> = items
            .iter()
            .filter(|(_, c)| !c.passed)
            .map(|(n, c)| format!("{n}: {}", c.witness.as_deref().unwrap_or("failed")))
            .collect();
        if failed.is_empty() {
            write!(f, "all clauses pass")
        } else {
            write!(f, "{}", failed.join("; "))
        }
    }
}

/// Checks that `beta` with index embeddings `phi` is a globalization of `alpha`.
///
/// Every clause is linear, so it is enough to test minimal idempotents.
pub fn verify_globalization(alpha: &PartialAction, beta: &PartialAction, phi: &IndexFamily) -> GlobalizationReport {
    let g = alpha.groupoid();
    let fail_all = |w: &str| GlobalizationReport {
        global: Clause::fail(w.to_string()),
        embeddings: Clause::fail(w.to_string()),
        g1: Clause::fail(w.to_string()),
        g2: Clause::fail(w.to_string()),
        g3: Clause::fail(w.to_string()),
        g4: Clause::fail(w.to_string()),
    };
    if g != beta.groupoid() {
        return fail_all("actions are over different groupoids");
    }
    let global = if beta.is_global() { Clause::pass() } else { Clause::fail("β is not global".into()) };

    let mut embed_failures = Vec::new();
    if phi.len() != g.len() {
        return GlobalizationReport { global, ..fail_all("embedding table has the wrong shape") };
    }
    for &e in g.objects() {
        let row = &phi[e.0];
        if row.len() != alpha.dim() {
            return GlobalizationReport { global, ..fail_all("embedding table has the wrong shape") };
        }
        let mut hit = FixedBitSet::with_capacity(beta.dim());
        for i in alpha.support(e).ones() {
            match row[i] {
                Some(j) if j < beta.dim() => {
                    if hit.put(j) {
                        embed_failures.push(format!("φ_{} is not injective at {}", g.name(e), i + 1));
                    }
                }
                _ => embed_failures.push(format!("φ_{} undefined at {}", g.name(e), i + 1)),
            }
        }
    }
    if !embed_failures.is_empty() {
        return GlobalizationReport {
            global,
            embeddings: Clause::first(embed_failures),
            ..fail_all("embeddings are not injective maps")
        };
    }
    let image = |e: Morphism, set: &FixedBitSet| -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(beta.dim());
        for i in set.ones() {
            out.insert(phi[e.0][i].expect("checked"));
        }
        out
    };
    let translate = |x: Morphism, set: &FixedBitSet| -> Option<FixedBitSet> {
        let mut out = FixedBitSet::with_capacity(beta.dim());
        for k in set.ones() {
            out.insert(beta.image(x, k)?);
        }
        Some(out)
    };
    let embedded: Vec<FixedBitSet> =
        g.morphisms().map(|e| if g.is_object(e) { image(e, alpha.support(e)) } else { FixedBitSet::new() }).collect();

    let g1 = Clause::first(g.objects().iter().filter_map(|&e| {
        embedded[e.0]
            .difference(beta.support(e))
            .next()
            .map(|k| format!("φ_{}(A_{}) ∌ B-index {} of B_{}", g.name(e), g.name(e), k + 1, g.name(e)))
    }));

    let g2 = Clause::first(g.morphisms().filter_map(|x| {
        let (d, r) = (g.dom(x), g.ran(x));
        let lhs = image(r, alpha.support(x));
        let Some(moved) = translate(x, &embedded[d.0]) else {
            return Some(format!("β_{} undefined on φ_{}(A_{})", g.name(x), g.name(d), g.name(d)));
        };
        let mut rhs = embedded[r.0].clone();
        rhs.intersect_with(&moved);
        (lhs != rhs).then(|| format!("φ(A_{}) ≠ φ(A_r) ∩ β_{}(φ(A_d))", g.name(x), g.name(x)))
    }));

    let g3 = Clause::first(g.morphisms().flat_map(|x| {
        let (d, r) = (g.dom(x), g.ran(x));
        alpha.support(g.inverse(x)).ones().filter_map(move |i| {
            let lhs = beta.image(x, phi[d.0][i].expect("checked"));
            let rhs = phi[r.0][alpha.image(x, i).expect("validated")];
            (lhs != rhs).then(|| format!("β_{} ∘ φ ≠ φ ∘ α_{} at index {}", g.name(x), g.name(x), i + 1))
        })
    }));

    let g4 = Clause::first(g.morphisms().filter_map(|x| {
        let r = g.ran(x);
        let mut sum = FixedBitSet::with_capacity(beta.dim());
        for h in g.morphisms().filter(|&h| g.ran(h) == r) {
            match translate(h, &embedded[g.dom(h).0]) {
                Some(s) => sum.union_with(&s),
                None => return Some(format!("β_{} undefined on φ(A_d)", g.name(h))),
            }
        }
        (sum != *beta.support(x)).then(|| format!("B_{} ≠ Σ_h β_h(φ(A_d(h)))", g.name(x)))
    }));

    GlobalizationReport { global, embeddings: Clause::pass(), g1, g2, g3, g4 }
}

/// Order in which germs are scanned; it only affects the numbering of `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GermOrder {
    #[default]
    Forward,
    Reverse,
}

/// Global action `β` on `B` together with its index embeddings.
#[derive(Clone, Debug)]
pub struct Globalization {
    pub action: PartialAction,
    /// `φ_e`, from source indices to B-indices.
    pub embedding: IndexFamily,
    /// Germs `(h, i)` making up each B-index.
    pub classes: Vec<Vec<(Morphism, usize)>>,
    pub report: GlobalizationReport,
}

impl Globalization {
    /// Number of B-indices lying over each object.
    pub fn class_counts(&self) -> Vec<usize> {
        let g = self.action.groupoid();
        g.objects().iter().map(|&e| self.action.support(e).count_ones(..)).collect()
    }
}

pub fn globalize(alpha: &PartialAction) -> Result<Globalization, ConstructionError> {
    globalize_with_order(alpha, GermOrder::Forward)
}

/// Germ construction: symbols `(h, i)` with `i ∈ S_{d(h)}` stand for
/// `β_h(eᵢ)`; `(h, i) ∼ (h', i')` when `k = h⁻¹h'` has `i' ∈ S_{k⁻¹}` and
/// `π_k(i') = i`. Classes are the minimal idempotents of `B`.
pub fn globalize_with_order(alpha: &PartialAction, order: GermOrder) -> Result<Globalization, ConstructionError> {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let mut offset = Vec::with_capacity(g.len() + 1);
    let mut germs: Vec<(Morphism, usize)> = Vec::new();
    for h in g.morphisms() {
        offset.push(germs.len());
        germs.extend(alpha.support(g.dom(h)).ones().map(|i| (h, i)));
    }
    let germ_id = |h: Morphism, i: usize| -> usize {
        let pos = alpha.support(g.dom(h)).ones().position(|x| x == i).expect("germ index in support");
        offset[h.0] + pos
    };
    let mut uf = UnionFind::<usize>::new(germs.len());
    for h in g.morphisms() {
        for h2 in g.morphisms().filter(|&h2| g.ran(h2) == g.ran(h)) {
            let k = g.compose(g.inverse(h), h2).expect("common range");
            for i2 in alpha.support(g.inverse(k)).ones() {
                let i = alpha.image(k, i2).expect("validated");
                uf.union(germ_id(h, i), germ_id(h2, i2));
            }
        }
    }

    // Number classes per object (in object order), by first appearance.
    let scan: Vec<usize> = match order {
        GermOrder::Forward => (0..germs.len()).collect(),
        GermOrder::Reverse => (0..germs.len()).rev().collect(),
    };
    let mut class_of_root = vec![usize::MAX; germs.len()];
    let mut classes: Vec<Vec<(Morphism, usize)>> = Vec::new();
    let mut object_support: Vec<Vec<usize>> = vec![Vec::new(); g.len()];
    for &e in g.objects() {
        for &k in &scan {
            let (h, _) = germs[k];
            if g.ran(h) != e {
                continue;
            }
            let root = uf.find(k);
            if class_of_root[root] == usize::MAX {
                class_of_root[root] = classes.len();
                object_support[e.0].push(classes.len());
                classes.push(Vec::new());
            }
        }
    }
    for (k, &germ) in germs.iter().enumerate() {
        classes[class_of_root[uf.find(k)]].push(germ);
    }
    let class_of = |h: Morphism, i: usize| class_of_root[uf.find(germ_id(h, i))];

    let dim = classes.len();
    let mut support = Vec::with_capacity(g.len());
    let mut images = Vec::with_capacity(g.len());
    for x in g.morphisms() {
        let (d, r) = (g.dom(x), g.ran(x));
        support.push(object_support[r.0].clone());
        let mut row: Vec<Option<usize>> = vec![None; dim];
        for &c in &object_support[d.0] {
            for &(h, i) in &classes[c] {
                let target = class_of(g.compose(x, h).expect("r(h) = d(g)"), i);
                match row[c] {
                    None => row[c] = Some(target),
                    Some(t) if t == target => {}
                    Some(_) => {
                        return Err(ConstructionError::InconsistentGerms(format!(
                            "germ class {} has two images under β_{}",
                            c + 1,
                            g.name(x)
                        )));
                    }
                }
            }
        }
        images.push(row);
    }
    let algebra = IdempotentAlgebra { base: alpha.base(), dim };
    let action = PartialAction::from_maps(alpha.groupoid_arc().clone(), algebra, support, &images)
        .map_err(ConstructionError::ValidationFailed)?;
    let mut embedding: IndexFamily = vec![vec![None; m]; g.len()];
    for &e in g.objects() {
        for i in alpha.support(e).ones() {
            embedding[e.0][i] = Some(class_of(e, i));
        }
    }
    let report = verify_globalization(alpha, &action, &embedding);
    if !report.all_passed() {
        return Err(ConstructionError::GlobalizationVerificationFailed(report));
    }
    Ok(Globalization { action, embedding, classes, report })
}

/// Restriction of a global `beta` to the ideal spanned by `subset`:
/// `S_g = S_{r(g)} ∩ π_g(S_{d(g)} ∩ S^β_{g⁻¹})` inside the subset.
///
/// Returns the action on the subset (renumbered in increasing order) and the
/// map from new indices to B-indices.
pub fn standard_restriction(
    beta: &PartialAction,
    subset: &FixedBitSet,
) -> Result<(PartialAction, Vec<usize>), ConstructionError> {
    if subset.len() != beta.dim() {
        return Err(ConstructionError::BadIndexSet(format!(
            "expected a set over {} indices, got {}",
            beta.dim(),
            subset.len()
        )));
    }
    let g = beta.groupoid();
    let back: Vec<usize> = subset.ones().collect();
    let mut fwd = vec![usize::MAX; beta.dim()];
    for (k, &i) in back.iter().enumerate() {
        fwd[i] = k;
    }
    let obj = |e: Morphism| -> FixedBitSet {
        let mut s = beta.support(e).clone();
        s.intersect_with(subset);
        s
    };
    let mut support = Vec::with_capacity(g.len());
    let mut images = Vec::with_capacity(g.len());
    let mut sets = Vec::with_capacity(g.len());
    for x in g.morphisms() {
        let (d, r) = (g.dom(x), g.ran(x));
        let mut moved = FixedBitSet::with_capacity(beta.dim());
        for i in obj(d).intersection(beta.support(g.inverse(x))) {
            moved.insert(beta.image(x, i).expect("validated"));
        }
        moved.intersect_with(&obj(r));
        sets.push(moved);
    }
    for x in g.morphisms() {
        support.push(sets[x.0].ones().map(|i| fwd[i]).collect::<Vec<_>>());
        let mut row = vec![None; back.len()];
        for i in sets[g.inverse(x).0].ones() {
            row[fwd[i]] = Some(fwd[beta.image(x, i).expect("validated")]);
        }
        images.push(row);
    }
    let algebra = IdempotentAlgebra { base: beta.base(), dim: back.len() };
    let action = PartialAction::from_maps(beta.groupoid_arc().clone(), algebra, support, &images)
        .map_err(ConstructionError::ValidationFailed)?;
    Ok((action, back))
}

/// An index bijection `ψ` with `ψ(S_g) = S'_g` and `ψ ∘ π_g = π'_g ∘ ψ`, if any.
pub fn find_isomorphism(a: &PartialAction, b: &PartialAction) -> Option<Vec<usize>> {
    let g = a.groupoid();
    if g != b.groupoid() || a.dim() != b.dim() {
        return None;
    }
    let m = a.dim();
    let signature = |act: &PartialAction, i: usize| -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(g.len());
        for x in g.morphisms() {
            if act.support(x).contains(i) {
                s.insert(x.0);
            }
        }
        s
    };
    let sa: Vec<FixedBitSet> = (0..m).map(|i| signature(a, i)).collect();
    let sb: Vec<FixedBitSet> = (0..m).map(|i| signature(b, i)).collect();
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; m];
    if search(a, b, &sa, &sb, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn search(
    a: &PartialAction,
    b: &PartialAction,
    sa: &[FixedBitSet],
    sb: &[FixedBitSet],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(i) = map.iter().position(|&x| x == usize::MAX) else {
        return true;
    };
    for j in 0..map.len() {
        if used[j] || sa[i] != sb[j] {
            continue;
        }
        let (saved_map, saved_used) = (map.clone(), used.clone());
        if propagate(a, b, sa, sb, map, used, i, j) && search(a, b, sa, sb, map, used) {
            return true;
        }
        *map = saved_map;
        *used = saved_used;
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn propagate(
    a: &PartialAction,
    b: &PartialAction,
    sa: &[FixedBitSet],
    sb: &[FixedBitSet],
    map: &mut [usize],
    used: &mut [bool],
    i: usize,
    j: usize,
) -> bool {
    let g = a.groupoid();
    let mut queue = vec![(i, j)];
    while let Some((x, y)) = queue.pop() {
        if map[x] == y {
            continue;
        }
        if map[x] != usize::MAX || used[y] || sa[x] != sb[y] {
            return false;
        }
        map[x] = y;
        used[y] = true;
        for h in g.morphisms() {
            match (a.image(h, x), b.image(h, y)) {
                (Some(x2), Some(y2)) => queue.push((x2, y2)),
                (None, None) => {}
                _ => return false,
            }
        }
    }
    true
}
