//! Per-object enumerations of `𝒢(−,e)` and the conjugation condition on them.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::groupoid::{FiniteGroupoid, GroupoidError, Morphism};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EnumerationError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("no enumeration given for object `{0}`")]
    MissingObject(String),
    #[error("enumeration of `{0}` is not a listing of the morphisms into it")]
    EnumerationInconsistent(String),
    #[error("objects `{0}` and `{1}` in one component have enumerations of different length")]
    LengthMismatch(String, String),
}

/// An ordering `g_{e,1}, …, g_{e,n_e}` of the morphisms with range `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalEnumeration {
    pub object: Morphism,
    pub list: Vec<Morphism>,
    /// `(q, r)` with `j = q·n + r + 1`, one entry per position.
    pub qr: Vec<(usize, usize)>,
}

/// Enumeration of `𝒢(−,e)` built from the decomposition `𝒢 ≅ 𝒜ₙ × H`.
///
/// With objects `e_1..e_n` and `H = {h_0 = 1, …}`, position `j = q·n + r + 1`
/// holds `(e_s, e_i, h_q)` where `s = σ^r(i)` and `σ(i) = i − 1` cyclically.
pub fn canonical_enumeration(g: &FiniteGroupoid, e: Morphism) -> Result<CanonicalEnumeration, EnumerationError> {
    if e.0 >= g.len() || !g.is_object(e) {
        return Err(GroupoidError::NotAnObject(e).into());
    }
    let dec = g.connected_decomposition()?;
    let n = dec.n;
    let i = dec.objects.iter().position(|&o| o == e).expect("object of a connected groupoid");
    let m = dec.isotropy.len();
    let one = dec.isotropy.objects()[0];
    let mut elements: Vec<Morphism> = vec![one];
    elements.extend(dec.isotropy.morphisms().filter(|&x| x != one));
    let mut list = Vec::with_capacity(n * m);
    let mut qr = Vec::with_capacity(n * m);
    for q in 0..m {
        for r in 0..n {
            let s = (i + n - r) % n;
            let x = dec.isotropy_embedding[elements[q].0];
            // τ_i · x · τ_s⁻¹ goes from e_s to e_i.
            let mor = g
                .compose(dec.transport[i], x)
                .and_then(|y| g.compose(y, g.inverse(dec.transport[s])))
                .expect("transports compose");
            list.push(mor);
            qr.push((q, r));
        }
    }
    Ok(CanonicalEnumeration { object: e, list, qr })
}

/// Canonical enumerations for every object, built component by component.
pub fn canonical_family(g: &FiniteGroupoid) -> Result<Vec<CanonicalEnumeration>, EnumerationError> {
    let mut out = Vec::with_capacity(g.objects().len());
    for comp in g.connected_components() {
        let mut members = FixedBitSet::with_capacity(g.len());
        for m in &comp.morphisms {
            members.insert(m.0);
        }
        let (sub, back) = g.subgroupoid(&members)?;
        for &e in &comp.objects {
            let local = sub.find(g.name(e)).expect("object survives restriction");
            let en = canonical_enumeration(&sub, local)?;
            out.push(CanonicalEnumeration { object: e, list: en.list.iter().map(|m| back[m.0]).collect(), qr: en.qr });
        }
    }
    out.sort_by_key(|en| en.object);
    Ok(out)
}

/// True iff for every `g` and every position `i`,
/// `g_{r(g),i}⁻¹ · g · g_{d(g),i} ∈ 𝒢₀` forces `g ∈ 𝒢₀`.
pub fn check_condition_superfluous(
    g: &FiniteGroupoid,
    family: &[CanonicalEnumeration],
) -> Result<bool, EnumerationError> {
    let mut lists: Vec<Option<&[Morphism]>> = vec![None; g.len()];
    for en in family {
        if en.object.0 >= g.len() || !g.is_object(en.object) {
            return Err(EnumerationError::EnumerationInconsistent(format!("{}", en.object)));
        }
        let expected: BTreeSet<Morphism> = g.into_object(en.object).into_iter().collect();
        let given: BTreeSet<Morphism> = en.list.iter().copied().collect();
        if given.len() != en.list.len() || given != expected {
            return Err(EnumerationError::EnumerationInconsistent(g.name(en.object).to_string()));
        }
        lists[en.object.0] = Some(&en.list);
    }
    for &e in g.objects() {
        if lists[e.0].is_none() {
            return Err(EnumerationError::MissingObject(g.name(e).to_string()));
        }
    }
    for m in g.morphisms() {
        let (d, r) = (g.dom(m), g.ran(m));
        let (ld, lr) = (lists[d.0].unwrap(), lists[r.0].unwrap());
        if ld.len() != lr.len() {
            return Err(EnumerationError::LengthMismatch(g.name(d).to_string(), g.name(r).to_string()));
        }
        if g.is_object(m) {
            continue;
        }
        for (a, b) in lr.iter().zip(ld) {
            let conj =
                g.compose(g.inverse(*a), m).and_then(|x| g.compose(x, *b)).expect("enumerated morphisms compose");
            if g.is_object(conj) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2_z2() -> FiniteGroupoid {
        FiniteGroupoid::coarse(2).unwrap().product_with_group(&FiniteGroupoid::cyclic_group(2).unwrap()).unwrap()
    }

    #[test]
    fn first_entry_is_identity_and_lengths_match() {
        let g = a2_z2();
        for &e in g.objects() {
            let en = canonical_enumeration(&g, e).unwrap();
            assert_eq!(en.list[0], e);
            assert_eq!(en.list.len(), 4);
            assert_eq!(en.qr[0], (0, 0));
        }
    }

    #[test]
    fn canonical_family_satisfies_condition() {
        let g = a2_z2();
        let fam = canonical_family(&g).unwrap();
        assert!(check_condition_superfluous(&g, &fam).unwrap());

        let s3 = FiniteGroupoid::group_from_table(&["1", "r", "r2", "s", "sr", "sr2"], &s3_table()).unwrap();
        let g = FiniteGroupoid::coarse(2).unwrap().product_with_group(&s3).unwrap();
        let fam = canonical_family(&g).unwrap();
        assert!(check_condition_superfluous(&g, &fam).unwrap());
    }

    pub(crate) fn s3_table() -> Vec<Vec<usize>> {
        // Elements r^a s^b encoded as index b*3 + a, with s r s = r^-1.
        let enc = |a: usize, b: usize| b * 3 + a;
        let mut t = vec![vec![0; 6]; 6];
        for x in 0..6 {
            for y in 0..6 {
                let (a1, b1) = (x % 3, x / 3);
                let (a2, b2) = (y % 3, y / 3);
                // r^a1 s^b1 r^a2 s^b2 = r^(a1 ± a2) s^(b1+b2)
                let a = if b1 == 0 { (a1 + a2) % 3 } else { (a1 + 3 - a2) % 3 };
                t[x][y] = enc(a, (b1 + b2) % 2);
            }
        }
        t
    }

    #[test]
    fn adversarial_enumeration_violates_condition() {
        let g = a2_z2();
        let mut fam = canonical_family(&g).unwrap();
        let f1 = g.find("o1").unwrap();
        let f2 = g.find("o2").unwrap();
        // Put a morphism out of o1 in position 2 of both lists.
        let into_f1 = g.find("(o1,o1,c)").unwrap();
        let into_f2 = g.find("(o1,o2,1)").unwrap();
        for en in fam.iter_mut() {
            let target = if en.object == f1 { into_f1 } else { into_f2 };
            let pos = en.list.iter().position(|&m| m == target).unwrap();
            en.list.swap(1, pos);
        }
        assert!(fam.iter().any(|en| en.object == f2));
        assert!(!check_condition_superfluous(&g, &fam).unwrap());
    }

    #[test]
    fn inconsistent_family_is_rejected() {
        let g = a2_z2();
        let mut fam = canonical_family(&g).unwrap();
        fam[0].list.pop();
        assert!(matches!(check_condition_superfluous(&g, &fam), Err(EnumerationError::EnumerationInconsistent(_))));
        let v = FiniteGroupoid::klein_four();
        let fam = vec![CanonicalEnumeration { object: v.objects()[0], list: v.morphisms().collect(), qr: vec![] }];
        assert!(check_condition_superfluous(&v, &fam).unwrap());
    }

    #[test]
    fn disconnected_groupoid_requires_per_component_family() {
        let d = FiniteGroupoid::discrete(&["a", "b"]).unwrap();
        assert!(matches!(
            canonical_enumeration(&d, d.objects()[0]),
            Err(EnumerationError::Groupoid(GroupoidError::NotConnected))
        ));
        let fam = canonical_family(&d).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(check_condition_superfluous(&d, &fam).unwrap());
    }
}
