//! Wide subgroupoids: closure, generation and exhaustive enumeration.

use std::cmp::Ordering;
use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::groupoid::{FiniteGroupoid, Morphism};

/// Default limit on the number of closures computed during enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SubgroupoidError {
    #[error("set does not contain object `{0}`")]
    NotWide(String),
    #[error("set is not closed: {0}")]
    NotClosed(String),
    #[error("set refers to morphisms outside the groupoid")]
    OutOfRange,
    #[error("enumeration exceeded the cap of {0} candidate sets")]
    CapExceeded(usize),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
}

/// A wide subgroupoid, stored as a membership mask over the parent's morphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WideSubgroupoid {
    members: FixedBitSet,
}

impl Ord for WideSubgroupoid {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members
            .count_ones(..)
            .cmp(&other.members.count_ones(..))
            .then_with(|| self.members.ones().cmp(other.members.ones()))
    }
}

impl PartialOrd for WideSubgroupoid {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl WideSubgroupoid {
    /// Checks wideness and closure of `members` inside `g`.
    pub fn new(g: &FiniteGroupoid, members: FixedBitSet) -> Result<Self, SubgroupoidError> {
        if members.len() != g.len() {
            return Err(SubgroupoidError::OutOfRange);
        }
        for &e in g.objects() {
            if !members.contains(e.0) {
                return Err(SubgroupoidError::NotWide(g.name(e).to_string()));
            }
        }
        for a in members.ones() {
            let am = Morphism(a);
            if !members.contains(g.inverse(am).0) {
                return Err(SubgroupoidError::NotClosed(format!("inverse of `{}` missing", g.name(am))));
            }
            for b in members.ones() {
                if let Some(c) = g.compose(am, Morphism(b)) {
                    if !members.contains(c.0) {
                        return Err(SubgroupoidError::NotClosed(format!(
                            "`{}`·`{}` missing",
                            g.name(am),
                            g.name(Morphism(b))
                        )));
                    }
                }
            }
        }
        Ok(WideSubgroupoid { members })
    }

    pub fn from_names<S: AsRef<str>>(g: &FiniteGroupoid, names: &[S]) -> Result<Self, SubgroupoidError> {
        let mut set = FixedBitSet::with_capacity(g.len());
        for n in names {
            let m = g.find(n.as_ref()).ok_or_else(|| SubgroupoidError::UnknownMorphism(n.as_ref().to_string()))?;
            set.insert(m.0);
        }
        for &e in g.objects() {
            set.insert(e.0);
        }
        Self::new(g, set)
    }

    /// The set of identities.
    pub fn objects_only(g: &FiniteGroupoid) -> Self {
        let mut members = FixedBitSet::with_capacity(g.len());
        for &e in g.objects() {
            members.insert(e.0);
        }
        WideSubgroupoid { members }
    }

    pub fn full(g: &FiniteGroupoid) -> Self {
        let mut members = FixedBitSet::with_capacity(g.len());
        members.insert_range(..);
        WideSubgroupoid { members }
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, m: Morphism) -> bool {
        self.members.contains(m.0)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Morphism> + '_ {
        self.members.ones().map(Morphism)
    }

    pub fn is_subset(&self, other: &WideSubgroupoid) -> bool {
        self.members.is_subset(&other.members)
    }

    /// `𝒢₀`, `𝒢`, or `𝒢₀ ∪ {…}` listing the non-identity members by name.
    pub fn describe(&self, g: &FiniteGroupoid) -> String {
        let extra: Vec<&str> = self.iter().filter(|&m| !g.is_object(m)).map(|m| g.name(m)).collect();
        if extra.is_empty() {
            "𝒢₀".to_string()
        } else if self.len() == g.len() {
            "𝒢".to_string()
        } else {
            format!("𝒢₀ ∪ {{{}}}", extra.join(","))
        }
    }

    pub fn names<'a>(&self, g: &'a FiniteGroupoid) -> Vec<&'a str> {
        self.iter().map(|m| g.name(m)).collect()
    }
}

/// Closes `set` under inverses and defined composition, in place.
fn close(g: &FiniteGroupoid, set: &mut FixedBitSet) {
    let mut members: Vec<usize> = set.ones().collect();
    let mut queue = members.clone();
    while let Some(x) = queue.pop() {
        let xm = Morphism(x);
        let inv = g.inverse(xm).0;
        if !set.put(inv) {
            members.push(inv);
            queue.push(inv);
        }
        let mut k = 0;
        while k < members.len() {
            let y = Morphism(members[k]);
            for c in [g.compose(xm, y), g.compose(y, xm)].into_iter().flatten() {
                if !set.put(c.0) {
                    members.push(c.0);
                    queue.push(c.0);
                }
            }
            k += 1;
        }
    }
}

/// Least wide subgroupoid containing `generators`.
pub fn generated_wide_subgroupoid(
    g: &FiniteGroupoid,
    generators: impl IntoIterator<Item = Morphism>,
) -> WideSubgroupoid {
    let mut set = FixedBitSet::with_capacity(g.len());
    for &e in g.objects() {
        set.insert(e.0);
    }
    for m in generators {
        set.insert(m.0);
    }
    close(g, &mut set);
    WideSubgroupoid { members: set }
}

/// Wide subgroupoid generated by the union of two.
pub fn join(g: &FiniteGroupoid, a: &WideSubgroupoid, b: &WideSubgroupoid) -> WideSubgroupoid {
    let mut set = a.members.clone();
    set.union_with(&b.members);
    close(g, &mut set);
    WideSubgroupoid { members: set }
}

/// Every wide subgroupoid, sorted by size then lexicographically by index.
///
/// Works outward from `𝒢₀`, adding one morphism at a time and closing;
/// `cap` bounds the number of closures computed.
pub fn enumerate_wide_subgroupoids(g: &FiniteGroupoid, cap: usize) -> Result<Vec<WideSubgroupoid>, SubgroupoidError> {
    let start = WideSubgroupoid::objects_only(g);
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(start.members.clone());
    let mut frontier = vec![start.members.clone()];
    let mut found = vec![start];
    let mut candidates = 0usize;
    while let Some(current) = frontier.pop() {
        for x in 0..g.len() {
            if current.contains(x) || g.inverse(Morphism(x)).0 < x {
                continue;
            }
            candidates += 1;
            if candidates > cap {
                return Err(SubgroupoidError::CapExceeded(cap));
            }
            let mut next = current.clone();
            next.insert(x);
            close(g, &mut next);
            if seen.insert(next.clone()) {
                frontier.push(next.clone());
                found.push(WideSubgroupoid { members: next });
            }
        }
    }
    found.sort();
    Ok(found)
}
