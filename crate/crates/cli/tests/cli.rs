use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use thln::faults::{FaultSet, SurvivingView};
use thln::topology::ThlnGraph;
use thln::validate::{classify_path, PathClass};

fn thln(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thln")).args(args).env_remove("THLN_BUDGET").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes an n=8 graph and six faults into `dir`.
fn instance(dir: &Path) -> (String, String) {
    let g = dir.join("g.json");
    let f = dir.join("f.json");
    let o = thln(&[
        "generate",
        "--n",
        "8",
        "--seed",
        "7",
        "--out",
        path_str(&g),
        "--faults",
        "6",
        "--faults-out",
        path_str(&f),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    (path_str(&g).to_string(), path_str(&f).to_string())
}

#[test]
fn generate_is_reproducible() {
    let a = thln(&["generate", "--variant", "random", "--n", "8", "--seed", "7"]);
    let b = thln(&["generate", "--variant", "random", "--n", "8", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let g = ThlnGraph::from_json(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(g.node_count(), 256);
}

#[test]
fn generate_rejects_bad_dimension() {
    assert_eq!(code(&thln(&["generate", "--n", "2"])), 2);
    assert_eq!(code(&thln(&["generate", "--n", "4", "--variant", "nope"])), 2);
}

#[test]
fn generate_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let o = thln(&["generate", "--n", "4", "--variant", "locally-twisted", "--dot", path_str(&dot)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("graph thln {") && text.contains("label=\"0101\""));
}

#[test]
fn embed_result_validates() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = instance(dir.path());
    let o = thln(&["embed", "--graph", &g, "--faults", &f, "-s", "3", "-t", "200"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(code(&o), 0, "{doc}");
    let status = doc["status"].as_str().unwrap();
    assert!(status == "hamiltonian" || status == "near-hamiltonian");
    let graph = ThlnGraph::from_json(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let faults = FaultSet::from_json(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let view = SurvivingView::new(&graph, &faults).unwrap();
    let path: Vec<u32> = serde_json::from_value(doc["path"].clone()).unwrap();
    let class = classify_path(&view, 3, 200, &path);
    assert!(class.is_valid());
    assert_eq!(class == PathClass::Hamiltonian, status == "hamiltonian");
    assert!(doc["trace"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn embed_rejects_too_many_faults() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let f = dir.path().join("f.json");
    let o = thln(&[
        "generate",
        "--n",
        "8",
        "--out",
        path_str(&g),
        "--faults",
        "7",
        "--unsafe",
        "--faults-out",
        path_str(&f),
    ]);
    assert_eq!(code(&o), 0);
    let args = ["embed", "--graph", path_str(&g), "--faults", path_str(&f), "-s", "3", "-t", "200"];
    let o = thln(&args);
    assert_eq!(code(&o), 3);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["status"], "error");

    let mut unsafe_args = args.to_vec();
    unsafe_args.push("--unsafe");
    let o = thln(&unsafe_args);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    if code(&o) == 0 {
        assert_eq!(doc["status"], "out-of-contract");
    }
}

#[test]
fn embed_reports_neighbor_condition() {
    let dir = tempfile::tempdir().unwrap();
    let (g, _) = instance(dir.path());
    let graph = ThlnGraph::from_json(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let s = 0;
    let t = graph.neighbors(s)[0];
    let nodes: Vec<u32> = graph.neighbors(s)[1..].to_vec();
    let f = dir.path().join("iso.json");
    std::fs::write(&f, FaultSet::from_parts(nodes, []).to_json()).unwrap();
    let o = thln(&["embed", "--graph", &g, "--faults", path_str(&f), "-s", "0", "-t", &t.to_string(), "--unsafe"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("neighbor condition"));
}

#[test]
fn embed_budget_exhaustion_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = instance(dir.path());
    let o = thln(&["embed", "--graph", &g, "--faults", &f, "-s", "3", "-t", "200", "--budget", "5"]);
    assert_eq!(code(&o), 4);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["error"], "budget-exhausted");
}

#[test]
fn budget_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = instance(dir.path());
    let o = Command::new(env!("CARGO_BIN_EXE_thln"))
        .args(["embed", "--graph", &g, "--faults", &f, "-s", "3", "-t", "200"])
        .env("THLN_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn stress_run_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let args = ["stress", "--n", "8", "--faults", "6", "--trials", "12", "--seed", "1"];
    let mut with_csv = args.to_vec();
    with_csv.extend(["--csv", path_str(&csv)]);
    let a = thln(&with_csv);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["successes"], 12);
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 13);
    assert_eq!(a.stdout, thln(&args).stdout);
}

#[test]
fn stress_edge_cases() {
    let o = thln(&["stress", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["trials"], 0);
    assert_eq!(code(&thln(&["stress", "--n", "8", "--faults", "7", "--trials", "1"])), 2);
    assert_eq!(code(&thln(&["stress", "--n", "3", "--trials", "1"])), 2);
}

#[test]
fn check_passes_and_mutant_fails() {
    let o = thln(&["check", "--suite", "topology-sweep", "--suite", "path-pairs-n4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let suites = doc["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 2);
    assert_eq!(suites[1]["passed"], 100);

    let m = thln(&["check", "--mutant", "--suite", "topology-sweep"]);
    assert_eq!(code(&m), 1);
    let doc: Value = serde_json::from_slice(&m.stdout).unwrap();
    assert!(doc["suites"][0]["failure"].as_str().unwrap().contains("regularity"));
    assert_eq!(code(&thln(&["check", "--suite", "bogus"])), 2);
}

#[test]
fn export_round_trips_json() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = instance(dir.path());
    let o = thln(&["export", "--graph", &g, "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(o.stdout, std::fs::read(&g).unwrap());
    let d = thln(&["export", "--graph", &g, "--faults", &f]);
    assert!(String::from_utf8_lossy(&d.stdout).contains("fillcolor=red"));
    assert_eq!(code(&thln(&["export", "--graph", "/nonexistent.json"])), 2);
}
