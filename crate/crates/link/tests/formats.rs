use oar_core::graph::Vocabulary;
use oar_core::rng::rng_from;
use oar_core::worldgen::{generate_scene, SceneConfig};
use oar_link::corpus::parse_corpus;
use oar_link::{load_corpus, parse_graph, serialize_graph, Error};
use rand::Rng;
use std::io::Write;

#[test]
fn thousand_graph_round_trip() {
    let v = Vocabulary::builtin();
    for seed in 0..1000u64 {
        let mut g = generate_scene(&SceneConfig { seed, ..SceneConfig::default() }, &v);
        let mut rng = rng_from(seed ^ 0xabc);
        for n in &mut g.nodes {
            n.confidence = rng.random();
        }
        for e in &mut g.edges {
            e.confidence = rng.random();
        }
        let text = serialize_graph(&g);
        assert!(!text.contains('\n'));
        assert_eq!(parse_graph(&text).unwrap(), g, "seed {seed}");
    }
}

#[test]
fn corpus_examples() {
    let v = Vocabulary::builtin();
    assert!(parse_corpus("", &v).unwrap().is_empty());
    let line = r#"{"nodes":[{"slot":0,"category":1,"attribute":null,"confidence":1.0}],"edges":[]}"#;
    let three = format!("{line}\n{line}\n{line}\n");
    assert_eq!(parse_corpus(&three, &v).unwrap().len(), 3);
    let bad = format!("{line}\n{{\"nodes\":[\n{line}\n");
    assert_eq!(parse_corpus(&bad, &v).unwrap_err().0, 2);
    let incompatible = r#"{"nodes":[{"slot":0,"category":1,"attribute":94,"confidence":1.0}],"edges":[]}"#;
    if !v.attribute_allowed(1, 94) {
        let e = parse_corpus(&format!("{line}\n{incompatible}\n"), &v).unwrap_err();
        assert_eq!(e.0, 2);
        assert!(e.1.to_string().contains("incompatible attribute"));
    }
}

#[test]
fn corpus_file_errors() {
    let v = Vocabulary::builtin();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, r#"{{"nodes":[],"edges":[]}}"#).unwrap();
    writeln!(f, "not json").unwrap();
    match load_corpus(f.path(), &v) {
        Err(e @ Error::Corpus { line: 2, .. }) => {
            assert_eq!(e.exit_code(), 1);
            assert!(e.to_string().contains("line 2"));
        }
        other => panic!("{other:?}"),
    }
    let missing = load_corpus(std::path::Path::new("/nonexistent/corpus.jsonl"), &v).unwrap_err();
    assert_eq!(missing.exit_code(), 2);
}
