//! Partial groupoid actions in idempotent-permutation form.
//!
//! `A_g` is spanned by `{eᵢ : i ∈ S_g}` and `α_g(eᵢ) = e_{π_g(i)}` for
//! `i ∈ S_{g⁻¹}`, extended linearly.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, BaseRing, IdempotentAlgebra, RingElement};
use crate::groupoid::{FiniteGroupoid, Morphism};
use crate::subgroupoid::WideSubgroupoid;

const NONE: usize = usize::MAX;

/// One failed action axiom. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom")]
pub enum ActionViolation {
    IdealChain { g: String, index: usize },
    P1Identity { e: String, index: usize },
    P1Covering { index: usize },
    P2 { g: String, h: String, index: usize },
    P3 { g: String, h: String, index: usize },
    NotBijective { g: String, detail: String },
}

impl fmt::Display for ActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionViolation::IdealChain { g, index } => {
                write!(f, "ideal chain: index {index} lies in S_{g} but not in S_r({g})")
            }
            ActionViolation::P1Identity { e, index } => {
                write!(f, "(P1): π_{e} moves index {index}")
            }
            ActionViolation::P1Covering { index } => {
                write!(f, "(P1): index {index} lies in no object support")
            }
            ActionViolation::P2 { g, h, index } => {
                write!(f, "(P2) at ({g}, {h}): index {index} escapes S_(gh)⁻¹")
            }
            ActionViolation::P3 { g, h, index } => {
                write!(f, "(P3) at ({g}, {h}): π_g π_h and π_gh differ on index {index}")
            }
            ActionViolation::NotBijective { g, detail } => write!(f, "π_{g} is not a bijection: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("invalid partial action: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ActionViolation>),
    #[error("expected {expected} entries (one per morphism), got {got}")]
    Shape { expected: usize, got: usize },
    #[error("index {index} is out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("subgroupoid is not wide in this groupoid")]
    NotWide,
    #[error("index family is not a bijection of object supports: {0}")]
    BadFamily(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("actions are over different groupoids")]
    GroupoidMismatch,
}

/// The four structural predicates of an action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub orthogonal: bool,
    pub global: bool,
    pub unital: bool,
    pub preunital: bool,
}

/// Per-object index bijections `φ_e : S_e → S'_e`, indexed by morphism
/// (only object rows are read).
pub type IndexFamily = Vec<Vec<Option<usize>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAction {
    groupoid: Arc<FiniteGroupoid>,
    algebra: IdempotentAlgebra,
    support: Vec<FixedBitSet>,
    perm: Vec<Vec<usize>>,
}

impl PartialAction {
    /// Validates supports and permutation pairs (0-based `(from, to)`),
    /// both given per morphism in index order.
    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        algebra: IdempotentAlgebra,
        support: Vec<Vec<usize>>,
        perm: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self, ActionError> {
        let n = groupoid.len();
        let m = algebra.dim;
        if support.len() != n {
            return Err(ActionError::Shape { expected: n, got: support.len() });
        }
        if perm.len() != n {
            return Err(ActionError::Shape { expected: n, got: perm.len() });
        }
        let mut sets = Vec::with_capacity(n);
        for s in &support {
            let mut set = FixedBitSet::with_capacity(m);
            for &i in s {
                if i >= m {
                    return Err(ActionError::IndexOutOfRange { index: i + 1, dim: m });
                }
                set.insert(i);
            }
            sets.push(set);
        }
        let mut maps = Vec::with_capacity(n);
        let mut violations = Vec::new();
        for (g, pairs) in perm.iter().enumerate() {
            let gm = Morphism(g);
            let name = groupoid.name(gm).to_string();
            let src = &sets[groupoid.inverse(gm).0];
            let dst = &sets[g];
            let mut map = vec![NONE; m];
            let mut hit = FixedBitSet::with_capacity(m);
            for &(from, to) in pairs {
                if from >= m || to >= m {
                    return Err(ActionError::IndexOutOfRange { index: from.max(to) + 1, dim: m });
                }
                let detail = if !src.contains(from) {
                    Some(format!("{} is not in S_{}⁻¹", from + 1, name))
                } else if !dst.contains(to) {
                    Some(format!("{} is not in S_{}", to + 1, name))
                } else if map[from] != NONE {
                    Some(format!("{} is mapped twice", from + 1))
                } else if hit.put(to) {
                    Some(format!("{} is hit twice", to + 1))
                } else {
                    None
                };
                if let Some(detail) = detail {
                    violations.push(ActionViolation::NotBijective { g: name.clone(), detail });
                    continue;
                }
                map[from] = to;
            }
            if let Some(i) = src.ones().find(|&i| map[i] == NONE) {
                violations
                    .push(ActionViolation::NotBijective { g: name.clone(), detail: format!("{} has no image", i + 1) });
            } else if src.count_ones(..) != dst.count_ones(..) {
                violations.push(ActionViolation::NotBijective {
                    g: name.clone(),
                    detail: format!("|S_{name}⁻¹| differs from |S_{name}|"),
                });
            }
            maps.push(map);
        }
        if !violations.is_empty() {
            return Err(ActionError::Invalid(violations));
        }
        let action = PartialAction { groupoid, algebra, support: sets, perm: maps };
        let violations = action.axiom_violations();
        if violations.is_empty() {
            Ok(action)
        } else {
            Err(ActionError::Invalid(violations))
        }
    }

    /// Builds from a dense map: `images[g][i] = Some(π_g(i))` exactly for `i ∈ S_{g⁻¹}`.
    pub fn from_maps(
        groupoid: Arc<FiniteGroupoid>,
        algebra: IdempotentAlgebra,
        support: Vec<Vec<usize>>,
        images: &[Vec<Option<usize>>],
    ) -> Result<Self, ActionError> {
        let perm =
            images.iter().map(|row| row.iter().enumerate().filter_map(|(i, t)| t.map(|t| (i, t))).collect()).collect();
        Self::new(groupoid, algebra, support, perm)
    }

    fn axiom_violations(&self) -> Vec<ActionViolation> {
        let g = &*self.groupoid;
        let m = self.algebra.dim;
        let name = |x: Morphism| g.name(x).to_string();
        let mut out = Vec::new();
        for x in g.morphisms() {
            let r = g.ran(x);
            if let Some(i) = self.support[x.0].difference(&self.support[r.0]).next() {
                out.push(ActionViolation::IdealChain { g: name(x), index: i + 1 });
            }
        }
        let mut covered = FixedBitSet::with_capacity(m);
        for &e in g.objects() {
            covered.union_with(&self.support[e.0]);
            if let Some(i) = self.support[e.0].ones().find(|&i| self.perm[e.0][i] != i) {
                out.push(ActionViolation::P1Identity { e: name(e), index: i + 1 });
            }
        }
        if let Some(i) = (0..m).find(|&i| !covered.contains(i)) {
            out.push(ActionViolation::P1Covering { index: i + 1 });
        }
        for a in g.morphisms() {
            for b in g.morphisms() {
                let Some(ab) = g.compose(a, b) else { continue };
                let ab_inv = g.inverse(ab);
                let a_inv = g.inverse(a);
                // i ∈ π_b⁻¹(S_{a⁻¹} ∩ S_b), i.e. i ∈ S_{b⁻¹} with π_b(i) ∈ S_{a⁻¹}.
                for i in self.support[g.inverse(b).0].ones() {
                    let j = self.perm[b.0][i];
                    if !self.support[a_inv.0].contains(j) {
                        continue;
                    }
                    if !self.support[ab_inv.0].contains(i) {
                        out.push(ActionViolation::P2 { g: name(a), h: name(b), index: i + 1 });
                        continue;
                    }
                    if self.perm[a.0][j] != self.perm[ab.0][i] {
                        out.push(ActionViolation::P3 { g: name(a), h: name(b), index: i + 1 });
                    }
                }
            }
        }
        out
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn groupoid_arc(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn algebra(&self) -> IdempotentAlgebra {
        self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim
    }

    pub fn base(&self) -> BaseRing {
        self.algebra.base
    }

    /// `S_g`.
    pub fn support(&self, g: Morphism) -> &FixedBitSet {
        &self.support[g.0]
    }

    /// `π_g(i)` for `i ∈ S_{g⁻¹}`.
    #[inline]
    pub fn image(&self, g: Morphism, i: usize) -> Option<usize> {
        match self.perm[g.0][i] {
            NONE => None,
            j => Some(j),
        }
    }

    /// `π_g⁻¹(j)` for `j ∈ S_g`, read off `π_g` itself.
    pub fn preimage(&self, g: Morphism, j: usize) -> Option<usize> {
        self.perm[g.0].iter().position(|&t| t == j)
    }

    /// Permutation pairs `(from, to)` of `π_g`, 0-based, sorted by `from`.
    pub fn pairs(&self, g: Morphism) -> Vec<(usize, usize)> {
        (0..self.dim()).filter_map(|i| self.image(g, i).map(|j| (i, j))).collect()
    }

    /// Same structure over another base ring.
    pub fn with_base(&self, base: BaseRing) -> Self {
        PartialAction { algebra: IdempotentAlgebra { base, dim: self.algebra.dim }, ..self.clone() }
    }

    /// `α_g(a·1_{g⁻¹})`.
    pub fn apply(&self, g: Morphism, a: &RingElement) -> Result<RingElement, ActionError> {
        if a.algebra() != self.algebra {
            return Err(AlgebraError::AlgebraMismatch.into());
        }
        let mut out = self.algebra.zero();
        for i in self.support[self.groupoid.inverse(g).0].ones() {
            out.set_coeff(self.perm[g.0][i], a.coeff(i).clone());
        }
        Ok(out)
    }

    /// `1_g`.
    pub fn unit(&self, g: Morphism) -> RingElement {
        self.algebra.indicator(self.support[g.0].ones()).expect("support in range")
    }

    pub fn predicates(&self) -> Predicates {
        let g = &*self.groupoid;
        let mut seen = FixedBitSet::with_capacity(self.dim());
        let mut orthogonal = true;
        for &e in g.objects() {
            if !seen.is_disjoint(&self.support[e.0]) {
                orthogonal = false;
            }
            seen.union_with(&self.support[e.0]);
        }
        let global = g.morphisms().all(|x| self.support[x.0] == self.support[g.ran(x).0]);
        Predicates { orthogonal, global, unital: true, preunital: true }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.predicates().orthogonal
    }

    pub fn is_global(&self) -> bool {
        self.predicates().global
    }

    /// Morphisms with `S_g = ∅`.
    pub fn empty_supports(&self) -> Vec<Morphism> {
        self.groupoid.morphisms().filter(|g| self.support[g.0].is_clear()).collect()
    }

    /// Checks `π_g⁻¹ = π_{g⁻¹}` and `π_g(S_{g⁻¹} ∩ S_h) = S_g ∩ S_{gh}`.
    pub fn inverse_and_image_clauses_hold(&self) -> bool {
        let g = &*self.groupoid;
        for x in g.morphisms() {
            let xi = g.inverse(x);
            for i in self.support[xi.0].ones() {
                let j = self.perm[x.0][i];
                if j == NONE || self.perm[xi.0][j] != i {
                    return false;
                }
            }
        }
        for a in g.morphisms() {
            let a_inv = g.inverse(a);
            for b in g.morphisms() {
                let Some(ab) = g.compose(a, b) else { continue };
                let mut lhs = FixedBitSet::with_capacity(self.dim());
                for i in self.support[a_inv.0].intersection(&self.support[b.0]) {
                    lhs.insert(self.perm[a.0][i]);
                }
                let mut rhs = self.support[a.0].clone();
                rhs.intersect_with(&self.support[ab.0]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// The restriction to a wide subgroupoid, over the reindexed subgroupoid.
    pub fn restrict(&self, h: &WideSubgroupoid) -> Result<PartialAction, ActionError> {
        if h.members().len() != self.groupoid.len() || self.groupoid.objects().iter().any(|&e| !h.contains(e)) {
            return Err(ActionError::NotWide);
        }
        let (sub, back) = self.groupoid.subgroupoid(h.members()).map_err(|_| ActionError::NotWide)?;
        Ok(PartialAction {
            groupoid: Arc::new(sub),
            algebra: self.algebra,
            support: back.iter().map(|m| self.support[m.0].clone()).collect(),
            perm: back.iter().map(|m| self.perm[m.0].clone()).collect(),
        })
    }

    /// Supports as 0-based index lists.
    pub fn support_lists(&self) -> Vec<Vec<usize>> {
        self.support.iter().map(|s| s.ones().collect()).collect()
    }
}

/// Checks `φ_{r(g)}(S_g) = S'_g` and `φ_{r(g)} ∘ π_g = π'_g ∘ φ_{d(g)}` on `S_{g⁻¹}`.
pub fn check_equivalence(
    source: &PartialAction,
    target: &PartialAction,
    family: &IndexFamily,
) -> Result<bool, ActionError> {
    let g = source.groupoid();
    if g != target.groupoid() {
        return Err(ActionError::GroupoidMismatch);
    }
    if family.len() != g.len() {
        return Err(ActionError::BadFamily(format!("expected {} rows", g.len())));
    }
    for &e in g.objects() {
        let row = &family[e.0];
        if row.len() != source.dim() {
            return Err(ActionError::BadFamily(format!("row of `{}` has the wrong length", g.name(e))));
        }
        let mut hit = FixedBitSet::with_capacity(target.dim());
        for i in source.support(e).ones() {
            match row[i] {
                Some(j) if j < target.dim() && target.support(e).contains(j) && !hit.put(j) => {}
                _ => return Err(ActionError::BadFamily(format!("φ_{} is not a bijection at {}", g.name(e), i + 1))),
            }
        }
        if hit != *target.support(e) {
            return Err(ActionError::BadFamily(format!("φ_{} is not onto", g.name(e))));
        }
    }
    for x in g.morphisms() {
        let (d, r) = (g.dom(x), g.ran(x));
        let mapped: FixedBitSet = {
            let mut s = FixedBitSet::with_capacity(target.dim());
            for i in source.support(x).ones() {
                s.insert(family[r.0][i].expect("checked above"));
            }
            s
        };
        if mapped != *target.support(x) {
            return Ok(false);
        }
        for i in source.support(g.inverse(x)).ones() {
            let lhs = family[r.0][source.image(x, i).expect("validated")];
            let rhs = target.image(x, family[d.0][i].expect("checked above"));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The identity family of an action against itself.
pub fn identity_family(action: &PartialAction) -> IndexFamily {
    let g = action.groupoid();
    let mut family = vec![vec![None; action.dim()]; g.len()];
    for &e in g.objects() {
        for i in action.support(e).ones() {
            family[e.0][i] = Some(i);
        }
    }
    family
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BaseRing;

    /// Objects `d`, `r`; morphisms `g: d → r` and its inverse.
    fn two_arrows() -> Arc<FiniteGroupoid> {
        Arc::new(FiniteGroupoid::coarse_named(&["d", "r"]).unwrap())
    }

    fn example_global() -> PartialAction {
        let g = two_arrows();
        let d = g.find("d").unwrap();
        let r = g.find("r").unwrap();
        let fwd = g.find("(d,r)").unwrap();
        let back = g.find("(r,d)").unwrap();
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 3).unwrap();
        let mut support = vec![vec![]; 4];
        let mut perm = vec![vec![]; 4];
        support[d.0] = vec![0, 1];
        support[back.0] = vec![0, 1];
        support[r.0] = vec![1, 2];
        support[fwd.0] = vec![1, 2];
        perm[d.0] = vec![(0, 0), (1, 1)];
        perm[r.0] = vec![(1, 1), (2, 2)];
        perm[fwd.0] = vec![(0, 2), (1, 1)];
        perm[back.0] = vec![(2, 0), (1, 1)];
        PartialAction::new(g, alg, support, perm).unwrap()
    }

    #[test]
    fn global_nonorthogonal_example() {
        let a = example_global();
        let p = a.predicates();
        assert!(p.global && !p.orthogonal && p.unital);
        assert!(a.inverse_and_image_clauses_hold());
        let g = a.groupoid().find("(d,r)").unwrap();
        let x = a.algebra().from_integers(&[5, 7, 11]).unwrap();
        assert_eq!(a.apply(g, &x).unwrap(), a.algebra().from_integers(&[0, 7, 5]).unwrap());
    }

    #[test]
    fn broken_inverse_is_a_p3_violation() {
        let a = example_global();
        let g = a.groupoid_arc().clone();
        let back = g.find("(r,d)").unwrap();
        let mut perm: Vec<Vec<(usize, usize)>> = g.morphisms().map(|x| a.pairs(x)).collect();
        perm[back.0] = vec![(2, 1), (1, 0)];
        match PartialAction::new(g, a.algebra(), a.support_lists(), perm) {
            Err(ActionError::Invalid(v)) => {
                assert!(v.iter().any(|x| matches!(x, ActionViolation::P3 { .. })), "{v:?}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_violations() {
        let g = two_arrows();
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 2).unwrap();
        let d = g.find("d").unwrap();
        let r = g.find("r").unwrap();
        let mut support = vec![vec![]; 4];
        let mut perm = vec![vec![]; 4];
        support[d.0] = vec![0];
        perm[d.0] = vec![(0, 0)];
        let err = PartialAction::new(g.clone(), alg, support.clone(), perm.clone()).unwrap_err();
        assert_eq!(err, ActionError::Invalid(vec![ActionViolation::P1Covering { index: 2 }]));

        support[r.0] = vec![1];
        perm[r.0] = vec![(1, 0)];
        assert!(matches!(
            PartialAction::new(g.clone(), alg, support.clone(), perm.clone()),
            Err(ActionError::Invalid(v)) if matches!(v[0], ActionViolation::NotBijective { .. })
        ));
        perm[r.0] = vec![(1, 1)];
        let fwd = g.find("(d,r)").unwrap();
        let back = g.find("(r,d)").unwrap();
        support[fwd.0] = vec![0];
        support[back.0] = vec![0];
        perm[fwd.0] = vec![(0, 0)];
        perm[back.0] = vec![(0, 0)];
        assert!(matches!(
            PartialAction::new(g, alg, support, perm),
            Err(ActionError::Invalid(v)) if v.iter().any(|x| matches!(x, ActionViolation::IdealChain { .. }))
        ));
    }

    #[test]
    fn equivalence_checks() {
        let a = example_global();
        let fam = identity_family(&a);
        assert!(check_equivalence(&a, &a, &fam).unwrap());
        let mut bad = fam.clone();
        let d = a.groupoid().find("d").unwrap();
        bad[d.0].swap(0, 1);
        assert!(!check_equivalence(&a, &a, &bad).unwrap());
    }

    #[test]
    fn restriction() {
        let a = example_global();
        let g = a.groupoid();
        let full = WideSubgroupoid::full(g);
        assert_eq!(a.restrict(&full).unwrap(), a);
        let objs = a.restrict(&WideSubgroupoid::objects_only(g)).unwrap();
        assert_eq!(objs.groupoid().len(), 2);
        assert!(objs.groupoid().morphisms().all(|x| objs.pairs(x).iter().all(|(i, j)| i == j)));
    }
}
