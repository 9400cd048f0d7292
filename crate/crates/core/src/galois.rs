//! Invariants, Galois coordinates, stabilizers, α-strong and separability.

use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::action::PartialAction;
use crate::algebra::{AlgebraError, IdempotentAlgebra, RingElement, TensorSquare};
use crate::groupoid::{FiniteGroupoid, Morphism};
use crate::partition::{PartitionError, PartitionSubalgebra};
use crate::subgroupoid::{generated_wide_subgroupoid, WideSubgroupoid};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("subgroupoid does not belong to the acting groupoid")]
    NotWide,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

/// Pairs `(xᵢ, yᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisCoordinates {
    pub pairs: Vec<(RingElement, RingElement)>,
}

impl GaloisCoordinates {
    /// `xᵢ = yᵢ = eᵢ` for every index.
    pub fn standard(algebra: &IdempotentAlgebra) -> Self {
        let pairs = (0..algebra.dim)
            .map(|i| {
                let e = algebra.basis(i).expect("index in range");
                (e.clone(), e)
            })
            .collect();
        GaloisCoordinates { pairs }
    }

    /// `xᵢ = yᵢ = f_b` over the blocks of `c`.
    pub fn from_blocks(algebra: &IdempotentAlgebra, c: &PartitionSubalgebra) -> Result<Self, GaloisError> {
        let pairs = c.block_idempotents(algebra)?.into_iter().map(|f| (f.clone(), f)).collect();
        Ok(GaloisCoordinates { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `Σᵢ xᵢ α_g(yᵢ 1_{g⁻¹})`.
    pub fn evaluate(&self, alpha: &PartialAction, g: Morphism) -> Result<RingElement, GaloisError> {
        let mut sum = alpha.algebra().zero();
        for (x, y) in &self.pairs {
            let moved = alpha.apply(g, y).map_err(|_| AlgebraError::AlgebraMismatch)?;
            sum = sum.add(&x.mul(&moved)?)?;
        }
        Ok(sum)
    }
}

/// A fixed point `π_g(k) = k` with `g` not an identity; `index` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub g: String,
    pub index: usize,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "π_{} fixes index {}", self.g, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaloisDecision {
    Galois(GaloisCoordinates),
    NotGalois(Obstruction),
}

impl GaloisDecision {
    pub fn is_galois(&self) -> bool {
        matches!(self, GaloisDecision::Galois(_))
    }
}

/// `A^{α|H}`: indices `i` and `π_h(i)` share a block for every `h ∈ H`.
pub fn invariants(alpha: &PartialAction, h: &WideSubgroupoid) -> Result<PartitionSubalgebra, GaloisError> {
    let g = alpha.groupoid();
    if h.members().len() != g.len() {
        return Err(GaloisError::NotWide);
    }
    let mut uf = UnionFind::<usize>::new(alpha.dim());
    for x in h.iter() {
        for i in alpha.support(g.inverse(x)).ones() {
            uf.union(i, alpha.image(x, i).expect("validated"));
        }
    }
    Ok(PartitionSubalgebra::from_labels(&uf.into_labeling()))
}

/// `A^α`.
pub fn invariants_all(alpha: &PartialAction) -> PartitionSubalgebra {
    invariants(alpha, &WideSubgroupoid::full(alpha.groupoid())).expect("full groupoid is wide")
}

/// Checks `Σᵢ xᵢ α_g(yᵢ 1_{g⁻¹}) = δ_{g∈𝒢₀} 1_g` for every `g`.
pub fn verify_coordinates(alpha: &PartialAction, coords: &GaloisCoordinates) -> Result<bool, GaloisError> {
    let alg = alpha.algebra();
    if coords.pairs.iter().any(|(x, y)| x.algebra() != alg || y.algebra() != alg) {
        return Err(AlgebraError::AlgebraMismatch.into());
    }
    let g = alpha.groupoid();
    for x in g.morphisms() {
        let lhs = coords.evaluate(alpha, x)?;
        let expected = if g.is_object(x) { alpha.unit(x) } else { alg.zero() };
        if lhs != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First `(g, k)` in index order with `g ∉ 𝒢₀`, `k ∈ S_{g⁻¹}` and `π_g(k) = k`.
pub fn galois_obstruction(alpha: &PartialAction) -> Option<(Morphism, usize)> {
    let g = alpha.groupoid();
    g.morphisms()
        .filter(|&x| !g.is_object(x))
        .find_map(|x| alpha.support(g.inverse(x)).ones().find(|&k| alpha.image(x, k) == Some(k)).map(|k| (x, k)))
}

/// Galois iff no non-identity `π_g` has a fixed index; the witness is then
/// `{eᵢ, eᵢ}`, verified before it is returned.
pub fn is_galois(alpha: &PartialAction) -> Result<GaloisDecision, GaloisError> {
    if let Some((x, k)) = galois_obstruction(alpha) {
        return Ok(GaloisDecision::NotGalois(Obstruction { g: alpha.groupoid().name(x).to_string(), index: k + 1 }));
    }
    let coords = GaloisCoordinates::standard(&alpha.algebra());
    if !verify_coordinates(alpha, &coords)? {
        return Err(GaloisError::VerificationFailed("standard coordinates rejected".into()));
    }
    Ok(GaloisDecision::Galois(coords))
}

/// `𝒢_C` with a flag telling whether it is a wide subgroupoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerSet {
    pub members: FixedBitSet,
    pub is_wide_subgroupoid: bool,
}

impl StabilizerSet {
    pub fn contains(&self, g: Morphism) -> bool {
        self.members.contains(g.0)
    }

    pub fn as_subgroupoid(&self, g: &FiniteGroupoid) -> Option<WideSubgroupoid> {
        WideSubgroupoid::new(g, self.members.clone()).ok()
    }

    /// The wide subgroupoid generated by the members.
    pub fn closure(&self, g: &FiniteGroupoid) -> WideSubgroupoid {
        generated_wide_subgroupoid(g, self.members.ones().map(Morphism))
    }
}

/// `g ∈ 𝒢_C` iff `π_g` maps each `k ∈ S_{g⁻¹}` into the block of `k`.
///
/// Testing `α_g(f_b 1_{g⁻¹}) = f_b 1_g` on block idempotents is enough, and
/// for an idempotent-permutation action that reduces to the block condition.
pub fn stabilizer(alpha: &PartialAction, c: &PartitionSubalgebra) -> Result<StabilizerSet, GaloisError> {
    if c.dim() != alpha.dim() {
        return Err(PartitionError::AlgebraMismatch(c.dim(), alpha.dim()).into());
    }
    let g = alpha.groupoid();
    let mut members = FixedBitSet::with_capacity(g.len());
    for x in g.morphisms() {
        let keeps = alpha.support(g.inverse(x)).ones().all(|k| c.same_block(alpha.image(x, k).expect("validated"), k));
        members.set(x.0, keeps);
    }
    let is_wide_subgroupoid = WideSubgroupoid::new(g, members.clone()).is_ok();
    Ok(StabilizerSet { members, is_wide_subgroupoid })
}

/// A pair `(g, h)` and index at which no element of `C` separates
/// `α_g(a1_{g⁻¹})` from `α_h(a1_{h⁻¹})`. `index` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongFailure {
    pub g: String,
    pub h: String,
    pub index: usize,
}

impl fmt::Display for StrongFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no element of C separates {} and {} at index {}", self.g, self.h, self.index)
    }
}

/// α-strong test through single coordinates.
///
/// Coordinate `i` of `α_g(a1_{g⁻¹})` is `a_{π_g⁻¹(i)}` for `i ∈ S_g` and 0
/// otherwise, so some `a ∈ C` tells `g` from `h` at `i` exactly when the
/// blocks of `π_g⁻¹(i)` and `π_h⁻¹(i)` differ (or only one exists). A
/// witness at any index in the support of an idempotent works for it too,
/// and singletons are among the idempotents, so indices are enough.
pub fn alpha_strong_failure(
    alpha: &PartialAction,
    c: &PartitionSubalgebra,
) -> Result<Option<StrongFailure>, GaloisError> {
    let stab = stabilizer(alpha, c)?;
    let g = alpha.groupoid();
    let back = |x: Morphism, i: usize| alpha.preimage(x, i).map(|j| c.block_of(j));
    for x in g.morphisms() {
        for y in g.morphisms().filter(|&y| g.ran(y) == g.ran(x)) {
            let k = g.compose(g.inverse(x), y).expect("common range");
            if stab.contains(k) {
                continue;
            }
            let mut both = alpha.support(x).clone();
            both.union_with(alpha.support(y));
            if let Some(i) = both.ones().find(|&i| back(x, i) == back(y, i)) {
                return Ok(Some(StrongFailure { g: g.name(x).to_string(), h: g.name(y).to_string(), index: i + 1 }));
            }
        }
    }
    Ok(None)
}

pub fn is_alpha_strong(alpha: &PartialAction, c: &PartitionSubalgebra) -> Result<bool, GaloisError> {
    Ok(alpha_strong_failure(alpha, c)?.is_none())
}

/// `e = Σ_b f_b ⊗ f_b` over the blocks of `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparabilityIdempotent {
    pub blocks: Vec<Vec<usize>>,
    pub element: TensorSquare,
}

/// Builds the separability idempotent of `C` over `D ⊆ C` and checks, in
/// the free tensor square, `μ(e) = 1`, `(x⊗1 − 1⊗x)e = 0` for every block
/// idempotent `x` of `C`, and `e² = e`.
pub fn separability_witness(
    algebra: &IdempotentAlgebra,
    c: &PartitionSubalgebra,
    d: &PartitionSubalgebra,
) -> Result<SeparabilityIdempotent, GaloisError> {
    if c.dim() != algebra.dim {
        return Err(PartitionError::AlgebraMismatch(c.dim(), algebra.dim).into());
    }
    if !d.coarsens(c) {
        return Err(PartitionError::NotCoarsening(d.render()).into());
    }
    let fs = c.block_idempotents(algebra)?;
    let mut e = TensorSquare::zero(*algebra);
    for f in &fs {
        e = e.add(&TensorSquare::pure(f, f)?)?;
    }
    if e.multiply_out() != algebra.one() {
        return Err(GaloisError::VerificationFailed("μ(e) ≠ 1".into()));
    }
    let one = algebra.one();
    for f in &fs {
        let comm = TensorSquare::pure(f, &one)?.sub(&TensorSquare::pure(&one, f)?)?;
        if !comm.mul(&e)?.is_zero() {
            return Err(GaloisError::VerificationFailed("(x⊗1 − 1⊗x)e ≠ 0".into()));
        }
    }
    if e.mul(&e)? != e {
        return Err(GaloisError::VerificationFailed("e² ≠ e".into()));
    }
    Ok(SeparabilityIdempotent { blocks: c.blocks().to_vec(), element: e })
}

/// `{f_b, f_b}` over the blocks of `C`, checked to satisfy `Σ xᵢyᵢ = 1` and
/// `Σ xᵢ α_g(yᵢ1_{g⁻¹}) = 0` for every `g ∉ 𝒢_C`.
pub fn coordinates_vanishing_off_stabilizer(
    alpha: &PartialAction,
    c: &PartitionSubalgebra,
) -> Result<GaloisCoordinates, GaloisError> {
    let alg = alpha.algebra();
    let coords = GaloisCoordinates::from_blocks(&alg, c)?;
    let mut total = alg.zero();
    for (x, y) in &coords.pairs {
        total = total.add(&x.mul(y)?)?;
    }
    if total != alg.one() {
        return Err(GaloisError::VerificationFailed("Σ xᵢyᵢ ≠ 1".into()));
    }
    let stab = stabilizer(alpha, c)?;
    let g = alpha.groupoid();
    for x in g.morphisms().filter(|&x| !stab.contains(x)) {
        if !coords.evaluate(alpha, x)?.is_zero() {
            return Err(GaloisError::VerificationFailed(format!("coordinates do not vanish at {}", g.name(x))));
        }
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BaseRing;
    use std::sync::Arc;

    /// Objects `d`, `r`; `g: d → r` with supports `{0,1}` / `{1,2}`.
    fn example_global() -> PartialAction {
        let g = Arc::new(FiniteGroupoid::coarse_named(&["d", "r"]).unwrap());
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 3).unwrap();
        let (d, r) = (g.find("d").unwrap(), g.find("r").unwrap());
        let gm = g.find("(d,r)").unwrap();
        let gi = g.find("(r,d)").unwrap();
        let mut support = vec![vec![]; 4];
        let mut perm = vec![vec![]; 4];
        support[d.0] = vec![0, 1];
        support[gi.0] = vec![0, 1];
        support[r.0] = vec![1, 2];
        support[gm.0] = vec![1, 2];
        perm[d.0] = vec![(0, 0), (1, 1)];
        perm[r.0] = vec![(1, 1), (2, 2)];
        perm[gm.0] = vec![(0, 2), (1, 1)];
        perm[gi.0] = vec![(2, 0), (1, 1)];
        PartialAction::new(g, alg, support, perm).unwrap()
    }

    #[test]
    fn fixed_index_blocks_galois() {
        let a = example_global();
        match is_galois(&a).unwrap() {
            GaloisDecision::NotGalois(o) => assert_eq!(o, Obstruction { g: "(d,r)".into(), index: 2 }),
            other => panic!("expected obstruction, got {other:?}"),
        }
        let std = GaloisCoordinates::standard(&a.algebra());
        assert!(!verify_coordinates(&a, &std).unwrap());
        assert_eq!(invariants_all(&a).render(), "[1,3]");
    }

    #[test]
    fn stabilizer_of_whole_and_trivial() {
        let a = example_global();
        let g = a.groupoid();
        let all = stabilizer(&a, &PartitionSubalgebra::discrete(3)).unwrap();
        // π_g fixes index 2 but moves 1 to 3.
        assert_eq!(all.members.count_ones(..), 2);
        assert!(all.is_wide_subgroupoid);
        let top = stabilizer(&a, &PartitionSubalgebra::indiscrete(3)).unwrap();
        assert_eq!(top.members.count_ones(..), g.len());
    }

    #[test]
    fn separability_examples() {
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 4).unwrap();
        let c = PartitionSubalgebra::parse("[1,2][3,4]", 4).unwrap();
        let d = PartitionSubalgebra::indiscrete(4);
        let w = separability_witness(&alg, &c, &d).unwrap();
        assert_eq!(w.blocks, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(w.element.entry(0, 1), &BaseRing::Rationals.one());
        assert!(w.element.entry(0, 2).is_zero());
        assert!(separability_witness(&alg, &c, &c).is_ok());
        assert!(matches!(
            separability_witness(&alg, &d, &c),
            Err(GaloisError::Partition(PartitionError::NotCoarsening(_)))
        ));
    }

    #[test]
    fn trivial_group_action_is_strong_but_not_galois() {
        let g = Arc::new(FiniteGroupoid::cyclic_group(2).unwrap());
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 1).unwrap();
        let a = PartialAction::new(g, alg, vec![vec![0], vec![0]], vec![vec![(0, 0)], vec![(0, 0)]]).unwrap();
        assert!(!is_galois(&a).unwrap().is_galois());
        let whole = PartitionSubalgebra::discrete(1);
        assert!(is_alpha_strong(&a, &whole).unwrap());
        assert!(separability_witness(&alg, &whole, &invariants_all(&a)).is_ok());
    }

    #[test]
    fn strong_failure_reported() {
        // Regular action of the Klein group on four indices.
        let g = Arc::new(FiniteGroupoid::klein_four());
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 4).unwrap();
        let perm: Vec<Vec<(usize, usize)>> = (0..4).map(|x| (0..4).map(|i| (i, i ^ x)).collect()).collect();
        let a = PartialAction::new(g, alg, vec![vec![0, 1, 2, 3]; 4], perm).unwrap();
        assert!(is_galois(&a).unwrap().is_galois());
        let c = PartitionSubalgebra::parse("[1,2]", 4).unwrap();
        let failure = alpha_strong_failure(&a, &c).unwrap().unwrap();
        assert_eq!(failure, StrongFailure { g: "1".into(), h: "g".into(), index: 1 });
        let c2 = PartitionSubalgebra::parse("[1,2][3,4]", 4).unwrap();
        assert!(is_alpha_strong(&a, &c2).unwrap());
        let v = coordinates_vanishing_off_stabilizer(&a, &c2).unwrap();
        assert_eq!(v.len(), 2);
    }
}
