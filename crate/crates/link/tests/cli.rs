use std::path::Path;
use std::process::{Command, Output};

use oar_core::graph::Vocabulary;
use oar_link::codebook_io::load_codebook;
use oar_link::vocab_io::read_vocabulary;

fn oar_link(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oar-link"))
        .args(args)
        .current_dir(dir)
        .env_remove("OAR_LINK_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn run_writes_csv_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"snr_db":[0,"inf"],"trials":3,"output":"res"}"#).unwrap();
    let o = oar_link(&["run", "--config", "c.json", "--jsonl", "--threads", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("res/summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(2).unwrap().starts_with("p1,\"semantic_adaptive\",inf,3,"));
    let jsonl = std::fs::read_to_string(dir.path().join("res/trials.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 6);
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(first["mask"], serde_json::json!([1, 0, 0]));
    assert_eq!(first["symbols_sent"], 960);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&oar_link(&["run", "--config", "missing.json"], p)), 2);
    std::fs::write(p.join("bad.json"), r#"{"trials":0}"#).unwrap();
    assert_eq!(code(&oar_link(&["run", "--config", "bad.json"], p)), 1);
    std::fs::write(p.join("junk.json"), "{").unwrap();
    assert_eq!(code(&oar_link(&["run", "--config", "junk.json"], p)), 1);
    assert_eq!(code(&oar_link(&["frobnicate"], p)), 1);
    std::fs::write(p.join("ok.json"), r#"{"snr_db":[1],"trials":1}"#).unwrap();
    std::fs::write(p.join("blocker"), "x").unwrap();
    assert_eq!(code(&oar_link(&["run", "--config", "ok.json", "--out", "blocker/out"], p)), 2);
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_oar-link"))
        .args(["run", "--config", "ok.json"])
        .current_dir(p)
        .env("OAR_LINK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 1);
}

#[test]
fn env_threads_override_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("c.json"), r#"{"snr_db":[5],"trials":4}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_oar-link"))
        .args(["run", "--config", "c.json", "--threads", "0", "--out", "a"])
        .current_dir(p)
        .env("OAR_LINK_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let b = oar_link(&["run", "--config", "c.json", "--threads", "1", "--out", "b"], p);
    assert_eq!(code(&b), 0);
    assert_eq!(std::fs::read(p.join("a/summary.csv")).unwrap(), std::fs::read(p.join("b/summary.csv")).unwrap());
}

#[test]
fn generators() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&oar_link(&["gen-vocab", "--out", "v.json"], p)), 0);
    assert_eq!(read_vocabulary(&p.join("v.json")).unwrap(), Vocabulary::builtin());
    assert_eq!(code(&oar_link(&["gen-codebook", "--seed", "4", "--out", "cb.bin", "--vocab", "v.json"], p)), 0);
    let cb = load_codebook(&p.join("cb.bin")).unwrap();
    assert_eq!(cb.params().seed, 4);
    assert_eq!(cb.entity_codewords().rows(), 150);
    assert_eq!(code(&oar_link(&["gen-vocab", "--out", "nodir/v.json"], p)), 2);

    std::fs::write(p.join("c.json"), r#"{"snr_db":["inf"],"trials":2,"codebook":"cb.bin","vocab":"v.json"}"#).unwrap();
    assert_eq!(code(&oar_link(&["run", "--config", "c.json", "--out", "r"], p)), 0);
}

#[test]
fn ged_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let g1 = r#"{"nodes":[{"slot":0,"category":0,"attribute":null,"confidence":1.0},{"slot":1,"category":1,"attribute":null,"confidence":1.0},{"slot":2,"category":2,"attribute":null,"confidence":1.0}],"edges":[{"subject":0,"object":1,"predicate":0,"confidence":1.0},{"subject":1,"object":2,"predicate":0,"confidence":1.0}]}"#;
    let g2 = r#"{"nodes":[{"slot":4,"category":0,"attribute":null,"confidence":1.0},{"slot":9,"category":1,"attribute":null,"confidence":1.0}],"edges":[{"subject":4,"object":9,"predicate":0,"confidence":1.0}]}"#;
    std::fs::write(p.join("g1.json"), g1).unwrap();
    std::fs::write(p.join("g2.json"), g2).unwrap();
    let o = oar_link(&["ged", "g1.json", "g2.json"], p);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["raw"], 2.0);
    assert_eq!(v["normalized"], 0.4);
    assert_eq!(v["exact"], true);

    std::fs::write(p.join("ok.jsonl"), format!("{g1}\n{g2}\n")).unwrap();
    let o = oar_link(&["validate", "ok.jsonl"], p);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("2 graphs ok"));
    std::fs::write(p.join("bad.jsonl"), format!("{g1}\n{{\"nodes\":[1]}}\n")).unwrap();
    let o = oar_link(&["validate", "bad.jsonl"], p);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&oar_link(&["validate", "none.jsonl"], p)), 2);
}
