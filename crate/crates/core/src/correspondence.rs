//! Runners for the three correspondences and the strongly Galois test.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::action::PartialAction;
use crate::constructions::{orthogonalize, ConstructionError, Orthogonalization};
use crate::galois::{
    alpha_strong_failure, invariants, invariants_all, is_galois, separability_witness, stabilizer, GaloisDecision,
    GaloisError, Obstruction,
};
use crate::groupoid::FiniteGroupoid;
use crate::partition::PartitionSubalgebra;
use crate::subgroupoid::{enumerate_wide_subgroupoids, generated_wide_subgroupoid, SubgroupoidError, WideSubgroupoid};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CorrespondenceError {
    #[error("action is not orthogonal")]
    NotOrthogonal,
    #[error("action is not global")]
    NotGlobal,
    #[error("action is not Galois: {0}")]
    NotGalois(Obstruction),
    #[error("support of `{0}` is empty")]
    EmptySupport(String),
    #[error("action is not strongly Galois: {0}")]
    NotStronglyGalois(StrongReason),
    #[error("theorem violated: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Subgroupoid(#[from] SubgroupoidError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

impl CorrespondenceError {
    /// True for failed hypotheses, as opposed to violations and internal errors.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            CorrespondenceError::NotOrthogonal
                | CorrespondenceError::NotGlobal
                | CorrespondenceError::NotGalois(_)
                | CorrespondenceError::EmptySupport(_)
                | CorrespondenceError::NotStronglyGalois(_)
                | CorrespondenceError::Subgroupoid(SubgroupoidError::CapExceeded(_))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Orthogonal,
    Strong,
    Global,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Orthogonal => "orthogonal",
            Mode::Strong => "strong",
            Mode::Global => "global",
        };
        f.write_str(s)
    }
}

/// Checks made on one row. `None` means the check is not part of the theorem
/// for this mode and was not run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowFlags {
    pub separable: Option<bool>,
    pub alpha_strong: Option<bool>,
    pub stabilizer_equals_h: bool,
    pub stabilizer_is_subgroupoid: bool,
    /// The inverse map went through the generated closure of `𝒢_{φ(C)}`.
    pub closure_used: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub subgroupoid: WideSubgroupoid,
    pub subalgebra: PartitionSubalgebra,
    pub flags: RowFlags,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceTable {
    pub mode: Mode,
    pub groupoid: Arc<FiniteGroupoid>,
    pub dim: usize,
    pub rows: Vec<Row>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    subgroupoid: String,
    members: Vec<&'a str>,
    subalgebra: String,
    blocks: Vec<Vec<usize>>,
    flags: &'a RowFlags,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    mode: Mode,
    dim: usize,
    rows: Vec<JsonRow<'a>>,
}

impl CorrespondenceTable {
    /// One line `H ↔ C` per row.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&row.subgroupoid.describe(&self.groupoid));
            out.push_str(" ↔ ");
            out.push_str(&row.subalgebra.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| JsonRow {
                subgroupoid: r.subgroupoid.describe(&self.groupoid),
                members: r.subgroupoid.names(&self.groupoid),
                subalgebra: r.subalgebra.render(),
                blocks: r.subalgebra.blocks_one_based(),
                flags: &r.flags,
            })
            .collect();
        serde_json::to_value(JsonTable { mode: self.mode, dim: self.dim, rows }).expect("table serializes")
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn row_for(&self, h: &WideSubgroupoid) -> Option<&Row> {
        self.rows.iter().find(|r| &r.subgroupoid == h)
    }
}

fn require_nonempty(alpha: &PartialAction) -> Result<(), CorrespondenceError> {
    match alpha.empty_supports().first() {
        Some(&x) => Err(CorrespondenceError::EmptySupport(alpha.groupoid().name(x).to_string())),
        None => Ok(()),
    }
}

fn require_galois(alpha: &PartialAction) -> Result<(), CorrespondenceError> {
    match is_galois(alpha)? {
        GaloisDecision::Galois(_) => Ok(()),
        GaloisDecision::NotGalois(o) => Err(CorrespondenceError::NotGalois(o)),
    }
}

fn violation(msg: String) -> CorrespondenceError {
    CorrespondenceError::TheoremViolation(msg)
}

/// Orthogonal, Galois, nonempty supports: `H ↦ A^{α|H}` with inverse `C ↦ 𝒢_C`.
pub fn run_orthogonal(alpha: &PartialAction, cap: usize) -> Result<CorrespondenceTable, CorrespondenceError> {
    if !alpha.is_orthogonal() {
        return Err(CorrespondenceError::NotOrthogonal);
    }
    require_nonempty(alpha)?;
    require_galois(alpha)?;
    let g = alpha.groupoid();
    let w = enumerate_wide_subgroupoids(g, cap)?;
    let base = invariants_all(alpha);
    let algebra = alpha.algebra();
    let mut seen: HashMap<PartitionSubalgebra, WideSubgroupoid> = HashMap::new();
    let mut rows = Vec::with_capacity(w.len());
    for h in w {
        let c = invariants(alpha, &h)?;
        let label = h.describe(g);
        if let Err(e) = separability_witness(&algebra, &c, &base) {
            return Err(violation(format!("A^(α|{label}) is not separable: {e}")));
        }
        if let Some(f) = alpha_strong_failure(alpha, &c)? {
            return Err(violation(format!("A^(α|{label}) is not α-strong: {f}")));
        }
        let stab = stabilizer(alpha, &c)?;
        if stab.members != *h.members() {
            return Err(violation(format!("stabilizer of A^(α|{label}) differs from it")));
        }
        if let Some(other) = seen.insert(c.clone(), h.clone()) {
            return Err(violation(format!("{} and {label} have the same invariants {c}", other.describe(g))));
        }
        rows.push(Row {
            subgroupoid: h,
            subalgebra: c,
            flags: RowFlags {
                separable: Some(true),
                alpha_strong: Some(true),
                stabilizer_equals_h: true,
                stabilizer_is_subgroupoid: stab.is_wide_subgroupoid,
                closure_used: false,
            },
        });
    }
    Ok(CorrespondenceTable { mode: Mode::Orthogonal, groupoid: alpha.groupoid_arc().clone(), dim: alpha.dim(), rows })
}

/// Why an action is not strongly Galois.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum StrongReason {
    EmptySupport {
        object: String,
    },
    NotGalois {
        obstruction: Obstruction,
    },
    /// Two members of `W` with equal traces `E^{ε|H} ∩ φ(A)`.
    Collision {
        first: String,
        second: String,
        subalgebra: String,
    },
}

impl fmt::Display for StrongReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrongReason::EmptySupport { object } => write!(f, "support of object `{object}` is empty"),
            StrongReason::NotGalois { obstruction } => write!(f, "not Galois ({obstruction})"),
            StrongReason::Collision { first, second, subalgebra } => {
                write!(f, "{first} and {second} both give {subalgebra}")
            }
        }
    }
}

/// `φ⁻¹(E^{ε|H} ∩ φ(A))`.
pub fn trace(orth: &Orthogonalization, h: &WideSubgroupoid) -> Result<PartitionSubalgebra, CorrespondenceError> {
    let inv = invariants(&orth.action, h)?;
    let joined = inv.meet_as_intersection(&orth.image_partition()).map_err(GaloisError::from)?;
    Ok(orth.pull_back(&joined)?)
}

/// Outcome of the strongly Galois test with the first failing condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongReport {
    pub strongly_galois: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<StrongReason>,
}

pub fn is_strongly_galois(alpha: &PartialAction, cap: usize) -> Result<StrongReport, CorrespondenceError> {
    let g = alpha.groupoid();
    let fail = |reason| Ok(StrongReport { strongly_galois: false, reason: Some(reason) });
    if let Some(&e) = g.objects().iter().find(|&&e| alpha.support(e).is_clear()) {
        return fail(StrongReason::EmptySupport { object: g.name(e).to_string() });
    }
    if let GaloisDecision::NotGalois(obstruction) = is_galois(alpha)? {
        return fail(StrongReason::NotGalois { obstruction });
    }
    let orth = orthogonalize(alpha)?;
    let w = enumerate_wide_subgroupoids(g, cap)?;
    let traces = w.iter().map(|h| trace(&orth, h)).collect::<Result<Vec<_>, _>>()?;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if traces[i] == traces[j] {
                return fail(StrongReason::Collision {
                    first: w[i].describe(g),
                    second: w[j].describe(g),
                    subalgebra: traces[i].to_string(),
                });
            }
        }
    }
    Ok(StrongReport { strongly_galois: true, reason: None })
}

/// Strongly Galois: `H ↦ φ⁻¹(E^{ε|H} ∩ φ(A))` with inverse `C ↦ 𝒢_{φ(C)}`.
pub fn run_strong(alpha: &PartialAction, cap: usize) -> Result<CorrespondenceTable, CorrespondenceError> {
    let report = is_strongly_galois(alpha, cap)?;
    if let Some(reason) = report.reason {
        return Err(CorrespondenceError::NotStronglyGalois(reason));
    }
    let g = alpha.groupoid();
    let orth = orthogonalize(alpha)?;
    let base = invariants_all(alpha);
    let algebra = alpha.algebra();
    let w = enumerate_wide_subgroupoids(g, cap)?;
    let mut rows = Vec::with_capacity(w.len());
    for h in w {
        let label = h.describe(g);
        let c = trace(&orth, &h)?;
        let direct = invariants(alpha, &h)?;
        if direct != c {
            return Err(violation(format!(
                "φ(A^(α|{label})) = {} but E^(ε|{label}) ∩ φ(A) pulls back to {c}",
                orth.push_forward(&direct)?
            )));
        }
        let stab = stabilizer(&orth.action, &orth.push_forward(&c)?)?;
        if stab.members != *h.members() {
            return Err(violation(format!("𝒢_φ(C) differs from {label} for C = {c}")));
        }
        rows.push(Row {
            subgroupoid: h,
            flags: RowFlags {
                separable: Some(separability_witness(&algebra, &c, &base).is_ok()),
                alpha_strong: None,
                stabilizer_equals_h: true,
                stabilizer_is_subgroupoid: stab.is_wide_subgroupoid,
                closure_used: false,
            },
            subalgebra: c,
        });
    }
    Ok(CorrespondenceTable { mode: Mode::Strong, groupoid: alpha.groupoid_arc().clone(), dim: alpha.dim(), rows })
}

/// Members of `W` sharing one invariant subalgebra, and their join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimClass {
    pub members: Vec<WideSubgroupoid>,
    pub invariants: PartitionSubalgebra,
    pub max: WideSubgroupoid,
}

/// Groups `W` by invariants. Classes are ordered by their maximum.
pub fn sim_classes(beta: &PartialAction, cap: usize) -> Result<Vec<SimClass>, CorrespondenceError> {
    if !beta.is_global() {
        return Err(CorrespondenceError::NotGlobal);
    }
    let g = beta.groupoid();
    let w = enumerate_wide_subgroupoids(g, cap)?;
    let mut order: Vec<PartitionSubalgebra> = Vec::new();
    let mut groups: HashMap<PartitionSubalgebra, Vec<WideSubgroupoid>> = HashMap::new();
    for h in w {
        let c = invariants(beta, &h)?;
        groups
            .entry(c.clone())
            .or_insert_with(|| {
                order.push(c);
                Vec::new()
            })
            .push(h);
    }
    let mut classes = Vec::with_capacity(order.len());
    for c in order {
        let members = groups.remove(&c).expect("grouped above");
        let max = generated_wide_subgroupoid(g, members.iter().flat_map(|h| h.iter()));
        if invariants(beta, &max)? != c {
            return Err(violation(format!("join {} leaves the class with invariants {c}", max.describe(g))));
        }
        if let Some(h) = members.iter().find(|h| !h.is_subset(&max)) {
            return Err(violation(format!("{} is not below the join of its class", h.describe(g))));
        }
        classes.push(SimClass { members, invariants: c, max });
    }
    classes.sort_by(|a, b| a.max.cmp(&b.max));
    Ok(classes)
}

/// Global, Galois, nonempty supports: `W^max ∋ H ↦ A^{β|H}` with inverse
/// `C ↦ (𝒢_{φ(C)})^max`.
pub fn run_global(beta: &PartialAction, cap: usize) -> Result<CorrespondenceTable, CorrespondenceError> {
    if !beta.is_global() {
        return Err(CorrespondenceError::NotGlobal);
    }
    require_nonempty(beta)?;
    require_galois(beta)?;
    let g = beta.groupoid();
    let classes = sim_classes(beta, cap)?;
    let orth = orthogonalize(beta)?;
    let base = invariants_all(beta);
    let algebra = beta.algebra();
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(classes.len());
    for class in &classes {
        let label = class.max.describe(g);
        let c = trace(&orth, &class.max)?;
        if c != class.invariants {
            return Err(violation(format!("trace of {label} differs from its invariants")));
        }
        if !seen.insert(c.clone()) {
            return Err(violation(format!("{c} appears twice")));
        }
        let stab = stabilizer(&orth.action, &orth.push_forward(&c)?)?;
        let closure_used = !stab.is_wide_subgroupoid;
        let start = stab.closure(g);
        let back = classes
            .iter()
            .find(|k| k.members.contains(&start))
            .ok_or_else(|| violation(format!("𝒢_φ(C) for C = {c} is not in W")))?;
        if back.max != class.max {
            return Err(violation(format!("C = {c} maps back to {} instead of {label}", back.max.describe(g))));
        }
        rows.push(Row {
            subgroupoid: class.max.clone(),
            flags: RowFlags {
                separable: Some(separability_witness(&algebra, &c, &base).is_ok()),
                alpha_strong: None,
                stabilizer_equals_h: stab.members == *class.max.members(),
                stabilizer_is_subgroupoid: stab.is_wide_subgroupoid,
                closure_used,
            },
            subalgebra: c,
        });
    }
    Ok(CorrespondenceTable { mode: Mode::Global, groupoid: beta.groupoid_arc().clone(), dim: beta.dim(), rows })
}

pub fn run(alpha: &PartialAction, mode: Mode, cap: usize) -> Result<CorrespondenceTable, CorrespondenceError> {
    match mode {
        Mode::Orthogonal => run_orthogonal(alpha, cap),
        Mode::Strong => run_strong(alpha, cap),
        Mode::Global => run_global(alpha, cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BaseRing, IdempotentAlgebra};
    use crate::subgroupoid::DEFAULT_ENUMERATION_CAP;

    fn two_swaps() -> PartialAction {
        let z2a = FiniteGroupoid::group_from_table(&["f1", "g"], &[vec![0, 1], vec![1, 0]]).unwrap();
        let z2b = FiniteGroupoid::group_from_table(&["f2", "h"], &[vec![0, 1], vec![1, 0]]).unwrap();
        let u = Arc::new(FiniteGroupoid::disjoint_union(&[&z2a, &z2b]).unwrap());
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 2).unwrap();
        let swap = vec![(0, 1), (1, 0)];
        let id = vec![(0, 0), (1, 1)];
        PartialAction::new(u, alg, vec![vec![0, 1]; 4], vec![id.clone(), swap.clone(), id, swap]).unwrap()
    }

    #[test]
    fn two_swaps_collide() {
        let a = two_swaps();
        let report = is_strongly_galois(&a, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(
            report.reason,
            Some(StrongReason::Collision {
                first: "𝒢₀ ∪ {g}".into(),
                second: "𝒢₀ ∪ {h}".into(),
                subalgebra: "[1,2]".into()
            })
        );
        let classes = sim_classes(&a, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[1].members.len(), 3);
        let t = run_global(&a, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(t.render_text(), "𝒢₀ ↔ A\n𝒢 ↔ [1,2]\n");
        assert!(matches!(run_strong(&a, DEFAULT_ENUMERATION_CAP), Err(CorrespondenceError::NotStronglyGalois(_))));
        assert_eq!(run_orthogonal(&a, DEFAULT_ENUMERATION_CAP), Err(CorrespondenceError::NotOrthogonal));
    }

    #[test]
    fn discrete_trivial_action() {
        let g = Arc::new(FiniteGroupoid::discrete(&["a", "b"]).unwrap());
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 2).unwrap();
        let a = PartialAction::new(g, alg, vec![vec![0], vec![1]], vec![vec![(0, 0)], vec![(1, 1)]]).unwrap();
        let t = run_orthogonal(&a, 10).unwrap();
        assert_eq!(t.render_text(), "𝒢₀ ↔ A\n");
        assert_eq!(
            run_strong(&a, 10).unwrap().rows,
            t.rows
                .iter()
                .map(|r| Row { flags: RowFlags { alpha_strong: None, ..r.flags.clone() }, ..r.clone() })
                .collect::<Vec<_>>()
        );
    }
}
