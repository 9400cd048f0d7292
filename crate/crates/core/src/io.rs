//! JSON documents for groupoids, actions and ring elements.
//!
//! All indices in documents are 1-based.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, IndexFamily, PartialAction};
use crate::algebra::{AlgebraError, BaseRing, IdempotentAlgebra, RingElement, MAX_DIM};
use crate::groupoid::{FiniteGroupoid, GroupoidError, RawGroupoid, MAX_MORPHISMS};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unknown groupoid reference `{0}`")]
    UnknownGroupoidRef(String),
    #[error("`{0}` is not a morphism of the groupoid")]
    UnknownMorphism(String),
    #[error("index {index} is out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{0} morphisms exceeds the limit of {MAX_MORPHISMS}")]
    TooLarge(usize),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

/// A groupoid given inline or by a builder reference such as `coarse:3`,
/// `cyclic:4`, `klein4`, `discrete:2`, `coarse:2xklein4` or `coarse:2xcyclic:3`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum GroupoidSpec {
    Ref(String),
    Inline(RawGroupoid),
}

impl GroupoidSpec {
    pub fn resolve(&self) -> Result<FiniteGroupoid, IoError> {
        match self {
            GroupoidSpec::Ref(s) => resolve_ref(s),
            GroupoidSpec::Inline(raw) => Ok(FiniteGroupoid::from_raw(raw)?),
        }
    }
}

fn count(s: &str, whole: &str) -> Result<usize, IoError> {
    match s.parse::<usize>() {
        Ok(n) if (1..=MAX_MORPHISMS).contains(&n) => Ok(n),
        Ok(n) if n > MAX_MORPHISMS => Err(IoError::TooLarge(n)),
        _ => Err(IoError::UnknownGroupoidRef(whole.to_string())),
    }
}

fn group_ref(s: &str, whole: &str) -> Result<(FiniteGroupoid, usize), IoError> {
    if s == "klein4" {
        return Ok((FiniteGroupoid::klein_four(), 4));
    }
    if let Some(k) = s.strip_prefix("cyclic:") {
        let k = count(k, whole)?;
        return Ok((FiniteGroupoid::cyclic_group(k)?, k));
    }
    Err(IoError::UnknownGroupoidRef(whole.to_string()))
}

fn resolve_ref(s: &str) -> Result<FiniteGroupoid, IoError> {
    let t = s.trim();
    if let Some(n) = t.strip_prefix("discrete:") {
        let n = count(n, t)?;
        let names: Vec<String> = (1..=n).map(|i| format!("o{i}")).collect();
        return Ok(FiniteGroupoid::discrete(&names)?);
    }
    if let Some(rest) = t.strip_prefix("coarse:") {
        let (n, group) = match rest.split_once('x') {
            Some((n, g)) => (n, Some(g)),
            None => (rest, None),
        };
        let n = count(n, t)?;
        let k = match group {
            Some("klein4") => 4,
            Some(g) => match g.strip_prefix("cyclic:") {
                Some(k) => count(k, t)?,
                None => return Err(IoError::UnknownGroupoidRef(t.to_string())),
            },
            None => 1,
        };
        let total = n.saturating_mul(n).saturating_mul(k);
        if total > MAX_MORPHISMS {
            return Err(IoError::TooLarge(total));
        }
        let coarse = FiniteGroupoid::coarse(n)?;
        return match group {
            Some(g) => Ok(coarse.product_with_group(&group_ref(g, t)?.0)?),
            None => Ok(coarse),
        };
    }
    Ok(group_ref(t, t)?.0)
}

/// The action document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawAction {
    pub groupoid: GroupoidSpec,
    pub m: usize,
    #[serde(default)]
    pub base: BaseRing,
    /// `S_g` per morphism name. Missing entries are empty.
    #[serde(default)]
    pub support: BTreeMap<String, Vec<usize>>,
    /// `π_g` as `[from, to]` pairs. A missing entry for an object is the identity on `S_e`.
    #[serde(default)]
    pub perm: BTreeMap<String, Vec<[usize; 2]>>,
}

impl RawAction {
    pub fn build(&self) -> Result<PartialAction, IoError> {
        let g = Arc::new(self.groupoid.resolve()?);
        if self.m > MAX_DIM {
            return Err(AlgebraError::BadDimension(self.m).into());
        }
        let algebra = IdempotentAlgebra::new(self.base, self.m)?;
        let lookup = |name: &str| g.find(name).ok_or_else(|| IoError::UnknownMorphism(name.to_string()));
        let zero_based = |i: usize| {
            if i == 0 || i > self.m {
                Err(IoError::IndexOutOfRange { index: i, dim: self.m })
            } else {
                Ok(i - 1)
            }
        };
        let mut support = vec![Vec::new(); g.len()];
        for (name, list) in &self.support {
            let x = lookup(name)?;
            support[x.0] = list.iter().map(|&i| zero_based(i)).collect::<Result<_, _>>()?;
        }
        let mut perm: Vec<Option<Vec<(usize, usize)>>> = vec![None; g.len()];
        for (name, pairs) in &self.perm {
            let x = lookup(name)?;
            perm[x.0] =
                Some(pairs.iter().map(|&[a, b]| Ok((zero_based(a)?, zero_based(b)?))).collect::<Result<_, IoError>>()?);
        }
        let perm = g
            .morphisms()
            .map(|x| match perm[x.0].take() {
                Some(p) => p,
                None if g.is_object(x) => support[x.0].iter().map(|&i| (i, i)).collect(),
                None => Vec::new(),
            })
            .collect();
        Ok(PartialAction::new(g.clone(), algebra, support, perm)?)
    }

    /// Document for an action, with the groupoid written inline.
    pub fn from_action(alpha: &PartialAction) -> Self {
        let g = alpha.groupoid();
        let mut support = BTreeMap::new();
        let mut perm = BTreeMap::new();
        for x in g.morphisms() {
            let s: Vec<usize> = alpha.support(x).ones().map(|i| i + 1).collect();
            if !s.is_empty() {
                support.insert(g.name(x).to_string(), s);
            }
            if !g.is_object(x) {
                let pairs: Vec<[usize; 2]> = alpha.pairs(x).into_iter().map(|(a, b)| [a + 1, b + 1]).collect();
                if !pairs.is_empty() {
                    perm.insert(g.name(x).to_string(), pairs);
                }
            }
        }
        RawAction { groupoid: GroupoidSpec::Inline(g.to_raw()), m: alpha.dim(), base: alpha.base(), support, perm }
    }
}

pub fn parse_groupoid(text: &str) -> Result<FiniteGroupoid, IoError> {
    let spec: GroupoidSpec = serde_json::from_str(text)?;
    spec.resolve()
}

pub fn parse_action(text: &str) -> Result<PartialAction, IoError> {
    let raw: RawAction = serde_json::from_str(text)?;
    raw.build()
}

/// Element of `algebra` from a JSON array of scalars: strings like `"3/2"`
/// or integers.
pub fn parse_element(text: &str, algebra: &IdempotentAlgebra) -> Result<RingElement, IoError> {
    let items: Vec<serde_json::Value> = serde_json::from_str(text)?;
    if items.len() != algebra.dim {
        return Err(AlgebraError::BadDimension(items.len()).into());
    }
    let coeffs = items
        .iter()
        .map(|v| match v {
            serde_json::Value::String(s) => algebra.base.parse_scalar(s),
            serde_json::Value::Number(n) => algebra.base.parse_scalar(&n.to_string()),
            other => Err(AlgebraError::BadScalar(other.to_string())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(algebra.element(coeffs)?)
}

pub fn element_to_json(x: &RingElement) -> serde_json::Value {
    serde_json::Value::from(x.to_strings())
}

pub fn action_to_json(alpha: &PartialAction) -> String {
    let mut s = serde_json::to_string_pretty(&RawAction::from_action(alpha)).expect("action serializes");
    s.push('\n');
    s
}

/// `{object: {source_index: target_index}}`, 1-based.
pub fn family_to_json(g: &FiniteGroupoid, family: &IndexFamily) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    for &e in g.objects() {
        let mut row = serde_json::Map::new();
        for (i, t) in family[e.0].iter().enumerate() {
            if let Some(t) = t {
                row.insert((i + 1).to_string(), serde_json::Value::from(t + 1));
            }
        }
        out.insert(g.name(e).to_string(), serde_json::Value::Object(row));
    }
    serde_json::Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refs_resolve() {
        assert_eq!(resolve_ref("coarse:3").unwrap().len(), 9);
        assert_eq!(resolve_ref("coarse:2xklein4").unwrap().len(), 16);
        assert_eq!(resolve_ref("coarse:2xcyclic:3").unwrap().len(), 12);
        assert_eq!(resolve_ref("cyclic:5").unwrap().len(), 5);
        assert_eq!(resolve_ref("discrete:4").unwrap().objects().len(), 4);
        assert!(matches!(resolve_ref("coarse:100"), Err(IoError::TooLarge(_))));
        assert!(matches!(resolve_ref("cyclic:100000000000"), Err(IoError::TooLarge(_))));
        assert!(matches!(resolve_ref("coarse:0"), Err(IoError::UnknownGroupoidRef(_))));
        assert!(matches!(resolve_ref("torus"), Err(IoError::UnknownGroupoidRef(_))));
    }

    #[test]
    fn action_round_trip() {
        let text = r#"{"groupoid": "cyclic:2", "m": 3, "support": {"1": [1,2,3], "c": [1,2]},
                       "perm": {"c": [[1,2],[2,1]]}}"#;
        let a = parse_action(text).unwrap();
        assert_eq!(a.dim(), 3);
        let again = parse_action(&action_to_json(&a)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn action_errors() {
        let trivial =
            r#"{"groupoid": "cyclic:2", "m": 2, "support": {"1": [1,2], "c": [1,2]}, "perm": {"c": [[1,1],[2,2]]}}"#;
        assert!(parse_action(trivial).is_ok());
        let missing = r#"{"groupoid": "cyclic:2", "m": 2, "support": {"1": [1,2], "c": [1,2]}}"#;
        assert!(matches!(parse_action(missing), Err(IoError::Action(_))));
        let zero = r#"{"groupoid": "cyclic:2", "m": 2, "support": {"1": [0]}}"#;
        assert!(matches!(parse_action(zero), Err(IoError::IndexOutOfRange { index: 0, .. })));
        let name = r#"{"groupoid": "cyclic:2", "m": 2, "support": {"z": [1]}}"#;
        assert!(matches!(parse_action(name), Err(IoError::UnknownMorphism(_))));
        assert!(matches!(parse_action("{"), Err(IoError::Json(_))));
        let extra = r#"{"groupoid": "cyclic:2", "m": 1, "support": {"1": [1]}, "colour": 1}"#;
        assert!(matches!(parse_action(extra), Err(IoError::Json(_))));
    }

    #[test]
    fn elements() {
        let alg = IdempotentAlgebra::new(BaseRing::Rationals, 3).unwrap();
        let x = parse_element(r#"["3/2", 0, -1]"#, &alg).unwrap();
        assert_eq!(element_to_json(&x), serde_json::json!(["3/2", "0", "-1"]));
        assert!(parse_element("[1]", &alg).is_err());
        assert!(parse_element(r#"[true, 1, 1]"#, &alg).is_err());
        let f5 = IdempotentAlgebra::new(BaseRing::PrimeField(5), 2).unwrap();
        assert_eq!(parse_element("[7, 1]", &f5).unwrap().to_strings(), vec!["2", "1"]);
    }
}
