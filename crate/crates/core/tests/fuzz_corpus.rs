use std::path::PathBuf;

use groupoid_galois::fuzzing;

fn replay(target: &str, harness: fn(&str)) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let bytes = std::fs::read(entry.unwrap().path()).unwrap();
        if let Ok(text) = std::str::from_utf8(&bytes) {
            harness(text);
        }
        seen += 1;
    }
    assert!(seen > 0, "empty corpus {}", dir.display());
}

#[test]
fn corpus_seeds_replay_cleanly() {
    replay("parse_groupoid", fuzzing::groupoid);
    replay("parse_action", fuzzing::action);
    replay("parse_brackets", fuzzing::brackets);
    replay("parse_element", fuzzing::element);
    replay("parse_base_ring", fuzzing::base_ring);
}

#[test]
fn malformed_inputs_are_rejected_without_panics() {
    let junk = [
        "",
        "{",
        "[",
        "]",
        "[1,",
        "[[]]",
        "[0]",
        "[1,…]",
        "[…,3]",
        "[1,…,99999999999]",
        "null",
        "\"coarse:99999\"",
        "\"cyclic:0\"",
        "{\"groupoid\":\"klein4\",\"m\":0}",
        "[\"1/0\"]",
        "[\"x\"]",
        "Fp:4",
        "Fp:",
        "Fp:-3",
        "\u{0}",
        "[18446744073709551616]",
    ];
    for s in junk {
        fuzzing::groupoid(s);
        fuzzing::action(s);
        fuzzing::brackets(s);
        fuzzing::element(s);
        fuzzing::base_ring(s);
    }
}

proptest::proptest! {
    #[test]
    fn bracket_like_strings(s in r"[\[\]0-9,… .A]{0,40}") {
        fuzzing::brackets(&s);
    }

    #[test]
    fn element_like_strings(s in r#"\[("?-?[0-9/]{0,6}"?,?){0,5}\]"#) {
        fuzzing::element(&s);
    }

    #[test]
    fn arbitrary_text(s in r"\PC{0,64}") {
        fuzzing::groupoid(&s);
        fuzzing::action(&s);
        fuzzing::base_ring(&s);
    }
}
