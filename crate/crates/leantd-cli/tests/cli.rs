use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn leantd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leantd")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn graph(&self, name: &str, n: usize, edges: &[(usize, usize)]) -> PathBuf {
        let mut text = format!("p {n} {}\n", edges.len());
        for (u, v) in edges {
            text += &format!("e {u} {v}\n");
        }
        self.write(name, &text)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cycle(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

fn complete(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

#[test]
fn ecc_on_c5_is_one_class() {
    let f = Files::new();
    let c5 = f.graph("c5.graph", 5, &cycle(5));
    let out = leantd(&["ecc", "-k", "2", s(&c5), "--verify"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0 1 2 3 4\n");
}

#[test]
fn vconn_on_path_returns_middle_vertex() {
    let f = Files::new();
    let path3 = f.graph("path3.graph", 3, &[(0, 1), (1, 2)]);
    let out = leantd(&["vconn", "-k", "2", s(&path3), "--verify"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\n");
    let c5 = f.graph("c5.graph", 5, &cycle(5));
    assert_eq!(stdout(&leantd(&["vconn", "-k", "2", s(&c5)])), "none\n");
}

#[test]
fn lean_on_k4_is_single_bag() {
    let f = Files::new();
    let k4 = f.graph("k4.graph", 4, &complete(4));
    let out = leantd(&["lean", "-k", "2", s(&k4), "--verify"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["bags"], json!([[0, 1, 2, 3]]));
    assert_eq!(doc["verification"]["passed"], json!(true));
}

#[test]
fn input_errors_exit_1() {
    let f = Files::new();
    let c5 = f.graph("c5.graph", 5, &cycle(5));
    let loop_ = f.write("loop.graph", "p 2 1\ne 0 0\n");
    let dup = f.write("dup.graph", "p 2 2\ne 0 1\ne 1 0\n");
    for args in [
        vec!["lean", "-k", "0", s(&c5)],
        vec!["lean", "-k", "2", s(&loop_)],
        vec!["ecc", "-k", "2", s(&dup)],
        vec!["lean", "-k", "3", "--unbreakable-s", "2", s(&c5)],
        vec!["vconn", "-k", "2", "/nonexistent/graph"],
        vec!["bogus"],
    ] {
        let out = leantd(&args);
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&leantd(&["--help"])), 0);
}

#[test]
fn tampered_artifacts_exit_2_with_counterexample() {
    let f = Files::new();
    let path3 = f.graph("path3.graph", 3, &[(0, 1), (1, 2)]);
    // One bag over a path is not 2-lean: the middle vertex splits it.
    let td = json!({"k": 2, "n": 3, "engine": "direct", "root": null, "bags": [[0, 1, 2]], "edges": []});
    let td_path = f.write("td.json", &td.to_string());
    let out = leantd(&["verify", s(&path3), s(&td_path)]);
    assert_eq!(code(&out), 2);
    let dump: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(dump["verification"], json!("failed"));

    let c4 = f.graph("c4.graph", 4, &cycle(4));
    let gh_out = leantd(&["ghtree", "-k", "3", s(&c4)]);
    assert_eq!(code(&gh_out), 0);
    let mut gh: Value = serde_json::from_str(&stdout(&gh_out)).unwrap();
    // Claim a 2-cut of C4 is a single vertex.
    gh["edges"][0]["alpha"] = json!({"vertices": [0], "edges": []});
    let gh_path = f.write("gh.json", &gh.to_string());
    assert_eq!(code(&leantd(&["verify", s(&c4), s(&gh_path)])), 2);

    let k4 = f.graph("k4.graph", 4, &complete(4));
    let sp_out = leantd(&["sparsify", "-k", "2", s(&k4)]);
    let mut sp: Value = serde_json::from_str(&stdout(&sp_out)).unwrap();
    sp["edges"].as_array_mut().unwrap().pop();
    sp["forest_index"].as_array_mut().unwrap().pop();
    sp["edges"].as_array_mut().unwrap().pop();
    sp["forest_index"].as_array_mut().unwrap().pop();
    let sp_path = f.write("sp.json", &sp.to_string());
    assert_eq!(code(&leantd(&["verify", s(&k4), s(&sp_path)])), 2);
}

/// Two K4s sharing vertex 3, plus a path 6–7–8–9–2 closing a long cycle.
fn sample(f: &Files) -> PathBuf {
    let mut edges = complete(4);
    edges.extend(complete(4).into_iter().map(|(u, v)| (u + 3, v + 3)));
    edges.extend([(6, 7), (7, 8), (8, 9), (9, 2)]);
    f.graph("sample.graph", 10, &edges)
}

fn runs() -> Vec<Vec<&'static str>> {
    vec![
        vec!["sparsify", "-k", "2"],
        vec!["lean", "-k", "2"],
        vec!["lean", "-k", "3", "--trace"],
        vec!["lean", "-k", "2", "--via-bodlaender", "--threshold", "2"],
        vec!["lean", "-k", "2", "--unbreakable-s", "3"],
        vec!["ghtree", "-k", "3"],
        vec!["ghtree", "-k", "2", "--via-bodlaender", "--no-sparsify"],
    ]
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let g = sample(&f);
    for args in runs().into_iter().chain([vec!["ecc", "-k", "2"], vec!["vconn", "-k", "3"]]) {
        let mut full = args.clone();
        full.push(s(&g));
        let a = leantd(&full);
        let b = leantd(&full);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn emitted_documents_reverify() {
    let f = Files::new();
    let g = sample(&f);
    for (i, args) in runs().into_iter().enumerate() {
        let artifact = f.0.path().join(format!("out{i}.json"));
        let mut full = args.clone();
        full.extend([s(&g), "--verify", "-o", s(&artifact)]);
        let out = leantd(&full);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let doc: Value = serde_json::from_str(&fs::read_to_string(&artifact).unwrap()).unwrap();
        assert_eq!(doc["verification"]["passed"], json!(true), "{args:?}");
        let again = leantd(&["verify", s(&g), s(&artifact)]);
        assert_eq!(code(&again), 0, "{args:?}: {}", String::from_utf8_lossy(&again.stderr));
        let report: Value = serde_json::from_str(&stdout(&again)).unwrap();
        assert_eq!(report["passed"], json!(true));
    }
}

#[test]
fn terminal_file_restricts_gamma() {
    let f = Files::new();
    let g = sample(&f);
    let terms = f.write("terms.txt", "0 5 8\n");
    let out = leantd(&["ghtree", "-k", "2", "--terminals", s(&terms), s(&g), "--verify"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let keys: Vec<&String> = doc["gamma"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["0", "5", "8"]);
}

#[test]
fn corpus_writes_parseable_graphs() {
    let f = Files::new();
    let dir = f.0.path().join("corpus");
    let out = leantd(&["corpus", "--exhaustive", "4", "--dir", s(&dir)]);
    assert_eq!(code(&out), 0);
    let files: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(files.len(), 1 + 2 + 4 + 11);
    for p in &files {
        assert_eq!(code(&leantd(&["ecc", "-k", "1", p, "--verify"])), 0, "{p}");
    }
}
