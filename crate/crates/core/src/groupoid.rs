//! Finite groupoids stored as dense composition tables.
//!
//! Morphisms are indexed `0..n`. Objects are identified with their identity
//! morphisms, so `dom` and `ran` return identity morphisms. The product `g·h`
//! is defined iff `dom(g) == ran(h)`, and means "first `h`, then `g`".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest groupoid accepted from external input.
pub const MAX_MORPHISMS: usize = 512;

const UNDEFINED: u32 = u32::MAX;

/// Dense index of a morphism inside one [`FiniteGroupoid`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Morphism(pub usize);

impl Morphism {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One failed groupoid axiom, with the offending morphisms named.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    DuplicateMorphism { id: String },
    UnknownMorphism { id: String },
    UnknownObject { id: String },
    MissingInverse { morphism: String },
    BadInverse { morphism: String, inverse: String },
    CompositionDomainMismatch { left: String, right: String },
    MissingComposite { left: String, right: String },
    ConflictingComposite { left: String, right: String },
    BadIdentity { object: String, morphism: String },
    NonAssociative { f: String, g: String, h: String },
    TooLarge { morphisms: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateMorphism { id } => write!(f, "duplicate morphism id `{id}`"),
            Violation::UnknownMorphism { id } => write!(f, "unknown morphism `{id}`"),
            Violation::UnknownObject { id } => write!(f, "`{id}` is not an object"),
            Violation::MissingInverse { morphism } => write!(f, "no inverse given for `{morphism}`"),
            Violation::BadInverse { morphism, inverse } => {
                write!(f, "`{inverse}` is not an inverse of `{morphism}`")
            }
            Violation::CompositionDomainMismatch { left, right } => {
                write!(f, "composite `{left}`·`{right}` has mismatched domain/range")
            }
            Violation::MissingComposite { left, right } => {
                write!(f, "composite `{left}`·`{right}` is composable but undefined")
            }
            Violation::ConflictingComposite { left, right } => {
                write!(f, "composite `{left}`·`{right}` given twice with different results")
            }
            Violation::BadIdentity { object, morphism } => {
                write!(f, "identity `{object}` does not act neutrally on `{morphism}`")
            }
            Violation::NonAssociative { f: a, g, h } => {
                write!(f, "(`{a}`·`{g}`)·`{h}` differs from `{a}`·(`{g}`·`{h}`)")
            }
            Violation::TooLarge { morphisms } => {
                write!(f, "{morphisms} morphisms exceeds the limit of {MAX_MORPHISMS}")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("invalid groupoid: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("{0} is not an object")]
    NotAnObject(Morphism),
    #[error("groupoid is not connected")]
    NotConnected,
    #[error("coarse groupoid needs at least one object")]
    EmptyCoarse,
    #[error("groupoid is not coarse")]
    NotCoarse,
    #[error("groupoid is not a group (it has {0} objects)")]
    NotAGroup(usize),
    #[error("morphism names collide: `{0}`")]
    NameCollision(String),
    #[error("decomposition failed to preserve composition at {0}·{1}")]
    DecompositionMismatch(Morphism, Morphism),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Serialized morphism entry of the groupoid JSON document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawMorphism {
    pub id: String,
    pub dom: String,
    pub ran: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv: Option<String>,
}

/// Unvalidated groupoid table, exactly as it appears in JSON.
///
/// Composites with an identity on either side may be omitted; they are
/// implied. Any other absent pair is undefined.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawGroupoid {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    names: Vec<String>,
    dom: Vec<usize>,
    ran: Vec<usize>,
    inv: Vec<usize>,
    table: Vec<u32>,
    objects: Vec<Morphism>,
    is_object: Vec<bool>,
    by_name: HashMap<String, usize>,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.dom == other.dom
            && self.ran == other.ran
            && self.inv == other.inv
            && self.table == other.table
    }
}

impl Eq for FiniteGroupoid {}

/// A connected component: its objects and all its morphisms, both sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub objects: Vec<Morphism>,
    pub morphisms: Vec<Morphism>,
}

/// `G ≅ A_n × H` for a connected `G`, with the explicit morphism bijection.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub n: usize,
    pub base: Morphism,
    /// Objects in the order used for the coarse factor.
    pub objects: Vec<Morphism>,
    /// `transport[k]` goes from `base` to `objects[k]`.
    pub transport: Vec<Morphism>,
    pub isotropy: FiniteGroupoid,
    /// Isotropy morphism `i` of `isotropy` is `isotropy_embedding[i]` in `G`.
    pub isotropy_embedding: Vec<Morphism>,
    pub product: FiniteGroupoid,
    /// Morphism `g` of `G` is `to_product[g]` of `product`.
    pub to_product: Vec<Morphism>,
}

impl FiniteGroupoid {
    /// Validates a raw table. Every violation found is reported.
    pub fn from_raw(raw: &RawGroupoid) -> Result<Self, GroupoidError> {
        let mut violations = Vec::new();
        let mut names: Vec<String> = Vec::new();
        let mut by_name: HashMap<String, usize> = HashMap::new();
        let declared = raw.morphisms.len() + raw.objects.len();
        if declared > 2 * MAX_MORPHISMS || raw.compose.len() > MAX_MORPHISMS * MAX_MORPHISMS {
            return Err(GroupoidError::Invalid(vec![Violation::TooLarge { morphisms: declared }]));
        }
        for m in &raw.morphisms {
            if by_name.contains_key(&m.id) {
                violations.push(Violation::DuplicateMorphism { id: m.id.clone() });
                continue;
            }
            by_name.insert(m.id.clone(), names.len());
            names.push(m.id.clone());
        }
        // Objects not listed among the morphisms become bare identities.
        let mut object_set = BTreeSet::new();
        for o in &raw.objects {
            if !object_set.insert(o.clone()) {
                violations.push(Violation::DuplicateMorphism { id: o.clone() });
                continue;
            }
            if !by_name.contains_key(o) {
                by_name.insert(o.clone(), names.len());
                names.push(o.clone());
            }
        }
        let n = names.len();
        if n > MAX_MORPHISMS {
            return Err(GroupoidError::Invalid(vec![Violation::TooLarge { morphisms: n }]));
        }
        let mut is_object = vec![false; n];
        for o in &raw.objects {
            if let Some(&i) = by_name.get(o) {
                is_object[i] = true;
            }
        }

        let mut dom = vec![usize::MAX; n];
        let mut ran = vec![usize::MAX; n];
        let mut inv = vec![usize::MAX; n];
        for (i, flag) in is_object.iter().enumerate() {
            if *flag {
                dom[i] = i;
                ran[i] = i;
                inv[i] = i;
            }
        }
        let lookup_object = |id: &str, violations: &mut Vec<Violation>| -> Option<usize> {
            match by_name.get(id) {
                Some(&i) if is_object[i] => Some(i),
                _ => {
                    violations.push(Violation::UnknownObject { id: id.to_string() });
                    None
                }
            }
        };
        let mut seen = vec![false; n];
        for m in &raw.morphisms {
            let Some(&i) = by_name.get(&m.id) else { continue };
            if seen[i] {
                continue;
            }
            seen[i] = true;
            let d = lookup_object(&m.dom, &mut violations);
            let r = lookup_object(&m.ran, &mut violations);
            if is_object[i] && (d != Some(i) || r != Some(i)) {
                violations.push(Violation::BadIdentity { object: m.id.clone(), morphism: m.id.clone() });
            }
            if let (Some(d), Some(r)) = (d, r) {
                dom[i] = d;
                ran[i] = r;
            }
            match &m.inv {
                Some(v) => match by_name.get(v) {
                    Some(&j) => inv[i] = j,
                    None => violations.push(Violation::UnknownMorphism { id: v.clone() }),
                },
                None if is_object[i] => inv[i] = i,
                None => violations.push(Violation::MissingInverse { morphism: m.id.clone() }),
            }
        }
        if !violations.is_empty() || dom.contains(&usize::MAX) {
            return Err(GroupoidError::Invalid(violations));
        }

        let mut table = vec![UNDEFINED; n * n];
        for [l, r, res] in &raw.compose {
            let (Some(&a), Some(&b), Some(&c)) = (by_name.get(l), by_name.get(r), by_name.get(res)) else {
                for id in [l, r, res] {
                    if !by_name.contains_key(id) {
                        violations.push(Violation::UnknownMorphism { id: id.clone() });
                    }
                }
                continue;
            };
            if dom[a] != ran[b] || dom[c] != dom[b] || ran[c] != ran[a] {
                violations.push(Violation::CompositionDomainMismatch { left: l.clone(), right: r.clone() });
                continue;
            }
            let slot = &mut table[a * n + b];
            if *slot != UNDEFINED && *slot as usize != c {
                violations.push(Violation::ConflictingComposite { left: l.clone(), right: r.clone() });
            }
            *slot = c as u32;
        }
        // Implied identity composites.
        for g in 0..n {
            let (d, r) = (dom[g], ran[g]);
            if table[g * n + d] == UNDEFINED {
                table[g * n + d] = g as u32;
            }
            if table[r * n + g] == UNDEFINED {
                table[r * n + g] = g as u32;
            }
        }
        if !violations.is_empty() {
            return Err(GroupoidError::Invalid(violations));
        }
        let objects = (0..n).filter(|&i| is_object[i]).map(Morphism).collect();
        let g = FiniteGroupoid { names, dom, ran, inv, table, objects, is_object, by_name };
        let violations = g.axiom_violations();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GroupoidError::Invalid(violations))
        }
    }

    /// Builds from dense data; `compose(a, b)` is consulted only for composable pairs.
    pub(crate) fn from_parts(
        names: Vec<String>,
        objects: &[usize],
        dom: Vec<usize>,
        ran: Vec<usize>,
        inv: Vec<usize>,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, GroupoidError> {
        let n = names.len();
        let mut by_name = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), i).is_some() {
                return Err(GroupoidError::NameCollision(name.clone()));
            }
        }
        let mut is_object = vec![false; n];
        for &o in objects {
            is_object[o] = true;
        }
        let mut table = vec![UNDEFINED; n * n];
        for a in 0..n {
            for b in 0..n {
                if dom[a] == ran[b] {
                    table[a * n + b] = compose(a, b) as u32;
                }
            }
        }
        let objects = (0..n).filter(|&i| is_object[i]).map(Morphism).collect();
        let g = FiniteGroupoid { names, dom, ran, inv, table, objects, is_object, by_name };
        let violations = g.axiom_violations();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GroupoidError::Invalid(violations))
        }
    }

    fn axiom_violations(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        let name = |i: usize| self.names[i].clone();
        for a in 0..n {
            for b in 0..n {
                let defined = self.table[a * n + b] != UNDEFINED;
                let composable = self.dom[a] == self.ran[b];
                if defined && !composable {
                    out.push(Violation::CompositionDomainMismatch { left: name(a), right: name(b) });
                } else if !defined && composable {
                    out.push(Violation::MissingComposite { left: name(a), right: name(b) });
                } else if defined {
                    let c = self.table[a * n + b] as usize;
                    if self.dom[c] != self.dom[b] || self.ran[c] != self.ran[a] {
                        out.push(Violation::CompositionDomainMismatch { left: name(a), right: name(b) });
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for g in 0..n {
            let (d, r) = (self.dom[g], self.ran[g]);
            if !self.is_object[d] || !self.is_object[r] {
                out.push(Violation::UnknownObject { id: name(d) });
                continue;
            }
            if self.table[g * n + d] as usize != g {
                out.push(Violation::BadIdentity { object: name(d), morphism: name(g) });
            }
            if self.table[r * n + g] as usize != g {
                out.push(Violation::BadIdentity { object: name(r), morphism: name(g) });
            }
            let v = self.inv[g];
            if v >= n
                || self.dom[v] != r
                || self.ran[v] != d
                || self.table[v * n + g] as usize != d
                || self.table[g * n + v] as usize != r
            {
                let inverse = if v < n { name(v) } else { "?".to_string() };
                out.push(Violation::BadInverse { morphism: name(g), inverse });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for f in 0..n {
            for g in 0..n {
                if self.dom[f] != self.ran[g] {
                    continue;
                }
                let fg = self.table[f * n + g] as usize;
                for h in 0..n {
                    if self.dom[g] != self.ran[h] {
                        continue;
                    }
                    let gh = self.table[g * n + h] as usize;
                    if self.table[fg * n + h] != self.table[f * n + gh] {
                        out.push(Violation::NonAssociative { f: name(f), g: name(g), h: name(h) });
                    }
                }
            }
        }
        out
    }

    pub fn to_raw(&self) -> RawGroupoid {
        let n = self.len();
        let objects = self.objects.iter().map(|o| self.name(*o).to_string()).collect();
        let morphisms = (0..n)
            .map(|i| RawMorphism {
                id: self.names[i].clone(),
                dom: self.names[self.dom[i]].clone(),
                ran: self.names[self.ran[i]].clone(),
                inv: Some(self.names[self.inv[i]].clone()),
            })
            .collect();
        let mut compose = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let c = self.table[a * n + b];
                if c != UNDEFINED && !self.is_object[a] && !self.is_object[b] {
                    compose.push([self.names[a].clone(), self.names[b].clone(), self.names[c as usize].clone()]);
                }
            }
        }
        RawGroupoid { objects, morphisms, compose }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn morphisms(&self) -> impl Iterator<Item = Morphism> + '_ {
        (0..self.len()).map(Morphism)
    }

    pub fn objects(&self) -> &[Morphism] {
        &self.objects
    }

    #[inline]
    pub fn is_object(&self, g: Morphism) -> bool {
        self.is_object[g.0]
    }

    #[inline]
    pub fn dom(&self, g: Morphism) -> Morphism {
        Morphism(self.dom[g.0])
    }

    #[inline]
    pub fn ran(&self, g: Morphism) -> Morphism {
        Morphism(self.ran[g.0])
    }

    #[inline]
    pub fn inverse(&self, g: Morphism) -> Morphism {
        Morphism(self.inv[g.0])
    }

    /// `g·h` (apply `h` first), defined iff `dom(g) == ran(h)`.
    #[inline]
    pub fn compose(&self, g: Morphism, h: Morphism) -> Option<Morphism> {
        match self.table[g.0 * self.len() + h.0] {
            UNDEFINED => None,
            c => Some(Morphism(c as usize)),
        }
    }

    pub fn name(&self, g: Morphism) -> &str {
        &self.names[g.0]
    }

    pub fn find(&self, name: &str) -> Option<Morphism> {
        self.by_name.get(name).map(|&i| Morphism(i))
    }

    /// Morphisms with range `e`, in index order.
    pub fn into_object(&self, e: Morphism) -> Vec<Morphism> {
        self.morphisms().filter(|&g| self.ran(g) == e).collect()
    }

    /// Morphisms from `src` to `dst`.
    pub fn hom(&self, src: Morphism, dst: Morphism) -> Vec<Morphism> {
        self.morphisms().filter(|&g| self.dom(g) == src && self.ran(g) == dst).collect()
    }

    pub fn connected_components(&self) -> Vec<Component> {
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(self.len());
        for g in self.morphisms() {
            uf.union(self.dom(g).0, self.ran(g).0);
        }
        let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
        for &o in &self.objects {
            let root = uf.find(o.0);
            groups
                .entry(root)
                .or_insert_with(|| Component { objects: Vec::new(), morphisms: Vec::new() })
                .objects
                .push(o);
        }
        for g in self.morphisms() {
            let root = uf.find(self.dom(g).0);
            groups.get_mut(&root).expect("every morphism has an object").morphisms.push(g);
        }
        let mut out: Vec<Component> = groups.into_values().collect();
        out.sort_by_key(|c| c.objects[0]);
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// The full subgroupoid on `members`, reindexed in increasing order.
    /// Returns the new groupoid and the map back to `self`.
    pub fn subgroupoid(&self, members: &FixedBitSet) -> Result<(FiniteGroupoid, Vec<Morphism>), GroupoidError> {
        let back: Vec<usize> = members.ones().filter(|&i| i < self.len()).collect();
        let mut fwd = vec![usize::MAX; self.len()];
        for (k, &i) in back.iter().enumerate() {
            fwd[i] = k;
        }
        let missing = |i: usize| fwd[i] == usize::MAX;
        for &i in &back {
            if missing(self.dom[i]) || missing(self.ran[i]) || missing(self.inv[i]) {
                return Err(GroupoidError::Invalid(vec![Violation::UnknownMorphism { id: self.names[i].clone() }]));
            }
            for &j in &back {
                if let Some(c) = self.compose(Morphism(i), Morphism(j)) {
                    if missing(c.0) {
                        return Err(GroupoidError::Invalid(vec![Violation::MissingComposite {
                            left: self.names[i].clone(),
                            right: self.names[j].clone(),
                        }]));
                    }
                }
            }
        }
        let names = back.iter().map(|&i| self.names[i].clone()).collect();
        let objects: Vec<usize> = back.iter().filter(|&&i| self.is_object[i]).map(|&i| fwd[i]).collect();
        let dom = back.iter().map(|&i| fwd[self.dom[i]]).collect();
        let ran = back.iter().map(|&i| fwd[self.ran[i]]).collect();
        let inv = back.iter().map(|&i| fwd[self.inv[i]]).collect();
        let sub = FiniteGroupoid::from_parts(names, &objects, dom, ran, inv, |a, b| {
            fwd[self.compose(Morphism(back[a]), Morphism(back[b])).expect("composable").0]
        })?;
        Ok((sub, back.into_iter().map(Morphism).collect()))
    }

    /// The isotropy group at `e`, as a one-object groupoid.
    pub fn isotropy_group(&self, e: Morphism) -> Result<FiniteGroupoid, GroupoidError> {
        Ok(self.isotropy_with_embedding(e)?.0)
    }

    pub fn isotropy_with_embedding(&self, e: Morphism) -> Result<(FiniteGroupoid, Vec<Morphism>), GroupoidError> {
        if e.0 >= self.len() || !self.is_object(e) {
            return Err(GroupoidError::NotAnObject(e));
        }
        let members: FixedBitSet = self
            .morphisms()
            .filter(|&g| self.dom(g) == e && self.ran(g) == e)
            .map(|g| g.0)
            .collect_with_len(self.len());
        self.subgroupoid(&members)
    }

    /// `G ≅ A_n × G(e)` for connected `G`, with `e` the first object.
    pub fn connected_decomposition(&self) -> Result<Decomposition, GroupoidError> {
        if self.objects.is_empty() || !self.is_connected() {
            return Err(GroupoidError::NotConnected);
        }
        let objects = self.objects.clone();
        let base = objects[0];
        let transport: Vec<Morphism> =
            objects.iter().map(|&o| if o == base { base } else { self.hom(base, o)[0] }).collect();
        let (isotropy, isotropy_embedding) = self.isotropy_with_embedding(base)?;
        let object_names: Vec<String> = objects.iter().map(|&o| self.name(o).to_string()).collect();
        let coarse = FiniteGroupoid::coarse_named(&object_names)?;
        let product = coarse.product_with_group(&isotropy)?;

        let n = objects.len();
        let k = isotropy.len();
        let position = |o: Morphism| objects.iter().position(|&x| x == o).expect("object");
        let mut iso_index = vec![usize::MAX; self.len()];
        for (i, &g) in isotropy_embedding.iter().enumerate() {
            iso_index[g.0] = i;
        }
        let mut to_product = Vec::with_capacity(self.len());
        for g in self.morphisms() {
            let s = position(self.dom(g));
            let t = position(self.ran(g));
            // τ_t⁻¹ · g · τ_s lies in the isotropy group at the base object.
            let inner = self
                .compose(self.inverse(transport[t]), g)
                .and_then(|x| self.compose(x, transport[s]))
                .expect("transport morphisms compose");
            let x = iso_index[inner.0];
            to_product.push(Morphism((s * n + t) * k + x));
        }
        for a in self.morphisms() {
            for b in self.morphisms() {
                let lhs = self.compose(a, b).map(|c| to_product[c.0]);
                let rhs = product.compose(to_product[a.0], to_product[b.0]);
                if lhs != rhs {
                    return Err(GroupoidError::DecompositionMismatch(a, b));
                }
            }
        }
        Ok(Decomposition { n, base, objects, transport, isotropy, isotropy_embedding, product, to_product })
    }

    /// Checks that `map` is a composition-preserving bijection onto `other`.
    pub fn is_isomorphism(&self, other: &FiniteGroupoid, map: &[Morphism]) -> bool {
        if self.len() != other.len() || map.len() != self.len() {
            return false;
        }
        let mut hit = vec![false; other.len()];
        for m in map {
            if m.0 >= other.len() || std::mem::replace(&mut hit[m.0], true) {
                return false;
            }
        }
        self.morphisms().all(|a| {
            self.morphisms().all(|b| self.compose(a, b).map(|c| map[c.0]) == other.compose(map[a.0], map[b.0]))
        })
    }

    // ---- builders -------------------------------------------------------

    /// Coarse groupoid on objects `o1..on`.
    pub fn coarse(n: usize) -> Result<Self, GroupoidError> {
        let names: Vec<String> = (1..=n).map(|i| format!("o{i}")).collect();
        Self::coarse_named(&names)
    }

    /// Coarse groupoid with the given object names. Morphism `(s,t)` goes
    /// from `s` to `t` and has index `s·n + t`.
    pub fn coarse_named<S: AsRef<str>>(objects: &[S]) -> Result<Self, GroupoidError> {
        let n = objects.len();
        if n == 0 {
            return Err(GroupoidError::EmptyCoarse);
        }
        let idx = |s: usize, t: usize| s * n + t;
        let mut names = Vec::with_capacity(n * n);
        let (mut dom, mut ran, mut inv) = (Vec::new(), Vec::new(), Vec::new());
        for s in 0..n {
            for t in 0..n {
                names.push(if s == t {
                    objects[s].as_ref().to_string()
                } else {
                    format!("({},{})", objects[s].as_ref(), objects[t].as_ref())
                });
                dom.push(idx(s, s));
                ran.push(idx(t, t));
                inv.push(idx(t, s));
            }
        }
        let object_ids: Vec<usize> = (0..n).map(|s| idx(s, s)).collect();
        // (s,t)·(u,v) = (u,t) when s = v.
        Self::from_parts(names, &object_ids, dom, ran, inv, |a, b| idx(b / n, a % n))
    }

    /// The discrete groupoid: only identities.
    pub fn discrete<S: AsRef<str>>(objects: &[S]) -> Result<Self, GroupoidError> {
        let names: Vec<String> = objects.iter().map(|s| s.as_ref().to_string()).collect();
        let n = names.len();
        let ids: Vec<usize> = (0..n).collect();
        Self::from_parts(names, &ids, ids.clone(), ids.clone(), ids.clone(), |a, _| a)
    }

    /// A group from its multiplication table; element 0 must be the identity.
    /// `mul[a][b]` is `a·b`.
    pub fn group_from_table<S: AsRef<str>>(elements: &[S], mul: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        let n = elements.len();
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let bad = || {
            GroupoidError::Invalid(vec![Violation::MissingInverse {
                morphism: names.first().cloned().unwrap_or_default(),
            }])
        };
        if n == 0 || mul.len() != n || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(bad());
        }
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| mul[a][b] == 0 && mul[b][a] == 0) {
                Some(b) => inv.push(b),
                None => {
                    return Err(GroupoidError::Invalid(vec![Violation::MissingInverse { morphism: names[a].clone() }]))
                }
            }
        }
        Self::from_parts(names, &[0], vec![0; n], vec![0; n], inv, |a, b| mul[a][b])
    }

    /// ℤ/n with elements named `1, c, c^2, …`.
    pub fn cyclic_group(n: usize) -> Result<Self, GroupoidError> {
        if n == 0 {
            return Err(GroupoidError::EmptyCoarse);
        }
        let names: Vec<String> = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "c".to_string(),
                _ => format!("c^{k}"),
            })
            .collect();
        let mul: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::group_from_table(&names, &mul)
    }

    /// ℤ₂ × ℤ₂ with elements `1, g, h, gh`.
    pub fn klein_four() -> Self {
        // Encode g = 1, h = 2, gh = 3 as bit vectors; product is xor.
        let mul: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self::group_from_table(&["1", "g", "h", "gh"], &mul).expect("klein four group")
    }

    /// `self × group`, where `self` must be coarse and `group` one-object.
    /// Morphism `(a, x)` has index `a·|group| + x`.
    pub fn product_with_group(&self, group: &FiniteGroupoid) -> Result<Self, GroupoidError> {
        if group.objects.len() != 1 {
            return Err(GroupoidError::NotAGroup(group.objects.len()));
        }
        for &s in &self.objects {
            for &t in &self.objects {
                if self.hom(s, t).len() != 1 {
                    return Err(GroupoidError::NotCoarse);
                }
            }
        }
        let k = group.len();
        let one = group.objects[0].0;
        let n = self.len() * k;
        let mut names = Vec::with_capacity(n);
        let (mut dom, mut ran, mut inv, mut objects) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for a in 0..self.len() {
            for x in 0..k {
                let am = Morphism(a);
                if self.is_object[a] && x == one {
                    names.push(self.names[a].clone());
                    objects.push(a * k + x);
                } else {
                    names.push(format!("({},{},{})", self.name(self.dom(am)), self.name(self.ran(am)), group.names[x]));
                }
                dom.push(self.dom[a] * k + one);
                ran.push(self.ran[a] * k + one);
                inv.push(self.inv[a] * k + group.inv[x]);
            }
        }
        Self::from_parts(names, &objects, dom, ran, inv, |p, q| {
            let (a, x) = (p / k, p % k);
            let (b, y) = (q / k, q % k);
            let c = self.compose(Morphism(a), Morphism(b)).expect("composable").0;
            let z = group.compose(Morphism(x), Morphism(y)).expect("group").0;
            c * k + z
        })
    }

    /// Disjoint union, preserving names and concatenating indices.
    pub fn disjoint_union(parts: &[&FiniteGroupoid]) -> Result<Self, GroupoidError> {
        let mut names = Vec::new();
        let (mut dom, mut ran, mut inv, mut objects, mut offsets) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for part in parts {
            let off = names.len();
            offsets.push(off);
            names.extend(part.names.iter().cloned());
            dom.extend(part.dom.iter().map(|x| x + off));
            ran.extend(part.ran.iter().map(|x| x + off));
            inv.extend(part.inv.iter().map(|x| x + off));
            objects.extend(part.objects.iter().map(|o| o.0 + off));
        }
        let owner = |i: usize| offsets.iter().rposition(|&o| o <= i).expect("offset");
        Self::from_parts(names, &objects, dom, ran, inv, |a, b| {
            let p = owner(a);
            let off = offsets[p];
            parts[p].compose(Morphism(a - off), Morphism(b - off)).expect("composable").0 + off
        })
    }
}

pub(crate) trait CollectWithLen {
    fn collect_with_len(self, len: usize) -> FixedBitSet;
}

impl<I: Iterator<Item = usize>> CollectWithLen for I {
    fn collect_with_len(self, len: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(len);
        for i in self {
            set.insert(i);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s8_groupoid() -> FiniteGroupoid {
        FiniteGroupoid::coarse_named(&["f1", "f2"]).unwrap().product_with_group(&FiniteGroupoid::klein_four()).unwrap()
    }

    #[test]
    fn coarse_counts() {
        let a1 = FiniteGroupoid::coarse(1).unwrap();
        assert_eq!(a1.len(), 1);
        let a2 = FiniteGroupoid::coarse(2).unwrap();
        assert_eq!(a2.len(), 4);
        assert_eq!(a2.objects().len(), 2);
        let a3 = FiniteGroupoid::coarse(3).unwrap();
        assert_eq!(a3.len(), 9);
        for &e in a3.objects() {
            assert_eq!(a3.isotropy_group(e).unwrap().len(), 1);
        }
        assert_eq!(FiniteGroupoid::coarse(0).unwrap_err(), GroupoidError::EmptyCoarse);
    }

    #[test]
    fn coarse_composition_rule() {
        let a2 = FiniteGroupoid::coarse(2).unwrap();
        let o1 = a2.find("o1").unwrap();
        let o2 = a2.find("o2").unwrap();
        let x = a2.find("(o1,o2)").unwrap();
        let y = a2.find("(o2,o1)").unwrap();
        assert_eq!(a2.dom(x), o1);
        assert_eq!(a2.ran(x), o2);
        assert_eq!(a2.compose(y, x), Some(o1));
        assert_eq!(a2.compose(x, y), Some(o2));
        assert_eq!(a2.compose(x, x), None);
    }

    #[test]
    fn s8_product_has_sixteen_morphisms() {
        let g = s8_groupoid();
        assert_eq!(g.len(), 16);
        assert_eq!(g.objects().len(), 2);
        assert_eq!(g.connected_components().len(), 1);
        let f1 = g.find("f1").unwrap();
        let iso = g.isotropy_group(f1).unwrap();
        assert_eq!(iso.len(), 4);
        // every element squares to the identity: ℤ₂ × ℤ₂
        for x in iso.morphisms() {
            assert_eq!(iso.compose(x, x), Some(iso.objects()[0]));
        }
        assert!(g.find("(f1,f2,gh)").is_some());
        let gen = g.find("(f1,f1,g)").unwrap();
        assert_eq!(g.dom(gen), f1);
    }

    #[test]
    fn product_sizes() {
        let a2 = FiniteGroupoid::coarse(2).unwrap();
        let z2 = FiniteGroupoid::cyclic_group(2).unwrap();
        assert_eq!(a2.product_with_group(&z2).unwrap().len(), 8);
        let a1 = FiniteGroupoid::coarse(1).unwrap();
        let v = FiniteGroupoid::klein_four();
        let p = a1.product_with_group(&v).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.is_isomorphism(&v, &p.morphisms().collect::<Vec<_>>()));
        assert_eq!(v.product_with_group(&z2).unwrap_err(), GroupoidError::NotCoarse);
    }

    #[test]
    fn components_of_unions_and_discrete() {
        let z2a = FiniteGroupoid::group_from_table(&["f1", "g"], &[vec![0, 1], vec![1, 0]]).unwrap();
        let z2b = FiniteGroupoid::group_from_table(&["f2", "h"], &[vec![0, 1], vec![1, 0]]).unwrap();
        let u = FiniteGroupoid::disjoint_union(&[&z2a, &z2b]).unwrap();
        assert_eq!(u.connected_components().len(), 2);
        let d = FiniteGroupoid::discrete(&["a", "b", "c"]).unwrap();
        assert_eq!(d.connected_components().len(), 3);
        for &e in d.objects() {
            assert_eq!(d.isotropy_group(e).unwrap().len(), 1);
        }
        let g = d.find("a").unwrap();
        let not_obj = u.find("g").unwrap();
        assert_eq!(u.isotropy_group(not_obj).unwrap_err(), GroupoidError::NotAnObject(not_obj));
        assert!(d.is_object(g));
    }

    #[test]
    fn decomposition_of_s8_groupoid() {
        let g = s8_groupoid();
        let dec = g.connected_decomposition().unwrap();
        assert_eq!(dec.n, 2);
        assert_eq!(dec.isotropy.len(), 4);
        assert!(g.is_isomorphism(&dec.product, &dec.to_product));

        let v = FiniteGroupoid::klein_four();
        let dec = v.connected_decomposition().unwrap();
        assert_eq!(dec.n, 1);
        assert!(dec.to_product.iter().enumerate().all(|(i, m)| m.0 == i));

        let a3 = FiniteGroupoid::coarse(3).unwrap();
        let dec = a3.connected_decomposition().unwrap();
        assert_eq!((dec.n, dec.isotropy.len()), (3, 1));

        let d = FiniteGroupoid::discrete(&["a", "b"]).unwrap();
        assert_eq!(d.connected_decomposition().unwrap_err(), GroupoidError::NotConnected);
    }

    #[test]
    fn raw_round_trip_and_missing_inverse() {
        let a2 = FiniteGroupoid::coarse(2).unwrap();
        let raw = a2.to_raw();
        let back = FiniteGroupoid::from_raw(&raw).unwrap();
        assert_eq!(back, a2);

        let mut broken = raw.clone();
        let k = broken.morphisms.iter().position(|m| m.id == "(o1,o2)").unwrap();
        broken.morphisms[k].inv = None;
        match FiniteGroupoid::from_raw(&broken) {
            Err(GroupoidError::Invalid(v)) => {
                assert!(v.contains(&Violation::MissingInverse { morphism: "(o1,o2)".into() }))
            }
            other => panic!("expected MissingInverse, got {other:?}"),
        }
    }

    #[test]
    fn raw_detects_domain_mismatch_and_nonassociativity() {
        let mut raw = FiniteGroupoid::coarse(2).unwrap().to_raw();
        raw.compose.push(["(o1,o2)".into(), "(o1,o2)".into(), "o1".into()]);
        match FiniteGroupoid::from_raw(&raw) {
            Err(GroupoidError::Invalid(v)) => {
                assert!(v.iter().any(|x| matches!(x, Violation::CompositionDomainMismatch { .. })))
            }
            other => panic!("{other:?}"),
        }

        // ℤ₃-shaped table where a·a is wrongly set to the identity.
        let raw = RawGroupoid {
            objects: vec!["e".into()],
            morphisms: vec![
                RawMorphism { id: "a".into(), dom: "e".into(), ran: "e".into(), inv: Some("b".into()) },
                RawMorphism { id: "b".into(), dom: "e".into(), ran: "e".into(), inv: Some("a".into()) },
            ],
            compose: vec![
                ["a".into(), "a".into(), "e".into()],
                ["a".into(), "b".into(), "e".into()],
                ["b".into(), "a".into(), "e".into()],
                ["b".into(), "b".into(), "a".into()],
            ],
        };
        match FiniteGroupoid::from_raw(&raw) {
            Err(GroupoidError::Invalid(v)) => {
                assert!(v.iter().any(|x| matches!(x, Violation::NonAssociative { .. })), "{v:?}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_inverse_and_inverse_domains() {
        let g = s8_groupoid();
        for m in g.morphisms() {
            assert_eq!(g.inverse(g.inverse(m)), m);
            assert_eq!(g.dom(g.inverse(m)), g.ran(m));
        }
    }
}
