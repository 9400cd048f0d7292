//! Entry points shared by the fuzz targets and the corpus replay test.
//!
//! Each one feeds arbitrary text to a parser and, when it is accepted,
//! checks that the value survives a serialize/parse round trip. Panics are
//! the only failure signal.

use crate::algebra::{BaseRing, IdempotentAlgebra};
use crate::io::{action_to_json, element_to_json, parse_action, parse_element, parse_groupoid};
use crate::partition::{parse_brackets, PartitionSubalgebra};

/// Largest index for which a parsed partition is also built.
const MAX_PARTITION_DIM: usize = 4096;

pub fn groupoid(text: &str) {
    if let Ok(g) = parse_groupoid(text) {
        let doc = serde_json::to_string(&g.to_raw()).expect("raw groupoid serializes");
        let again = parse_groupoid(&doc).expect("serialized groupoid parses");
        assert_eq!(again, g);
    }
}

pub fn action(text: &str) {
    if let Ok(alpha) = parse_action(text) {
        let again = parse_action(&action_to_json(&alpha)).expect("serialized action parses");
        assert_eq!(again, alpha);
    }
}

pub fn brackets(text: &str) {
    let Ok(blocks) = parse_brackets(text) else { return };
    let m = blocks.iter().flatten().copied().max().unwrap_or(0);
    if m > MAX_PARTITION_DIM {
        return;
    }
    if let Ok(p) = PartitionSubalgebra::parse(text, m) {
        assert_eq!(PartitionSubalgebra::parse(&p.to_string(), m).as_ref(), Ok(&p));
    }
}

pub fn element(text: &str) {
    for base in [BaseRing::Rationals, BaseRing::PrimeField(7)] {
        for dim in 1..=4 {
            let alg = IdempotentAlgebra::new(base, dim).expect("small dimension");
            if let Ok(x) = parse_element(text, &alg) {
                let doc = element_to_json(&x).to_string();
                assert_eq!(parse_element(&doc, &alg).as_ref(), Ok(&x));
            }
        }
    }
}

pub fn base_ring(text: &str) {
    if let Ok(b) = text.parse::<BaseRing>() {
        assert_eq!(b.to_string().parse::<BaseRing>().as_ref(), Ok(&b));
    }
}
