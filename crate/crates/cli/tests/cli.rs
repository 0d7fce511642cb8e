use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    json: Value,
}

fn tes(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_tes"))
        .args(args)
        .env_remove("TES_BUDGET")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().expect("exit code"),
        json: serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}")),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const K5: &str = "0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";

#[test]
fn bound_on_k5_and_p3() {
    let dir = TempDir::new().unwrap();
    let r = tes(&["bound", s(&write(&dir, "k5.txt", K5))]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["lower_bound"], 4);
    assert_eq!(r.json["conjectured"], 5);
    let r = tes(&["bound", s(&write(&dir, "p3.txt", "0 1\n1 2\n"))]);
    assert_eq!(
        (
            r.json["lower_bound"].as_u64(),
            r.json["conjectured"].as_u64()
        ),
        (Some(2), Some(2))
    );
}

#[test]
fn malformed_graph_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [("a", "0 x\n"), ("b", "0 0\n"), ("c", "0 1\n1 0\n")] {
        let r = tes(&["bound", s(&write(&dir, name, text))]);
        assert_eq!(r.code, 2, "{text:?}");
        assert_eq!(r.json["status"], "error");
    }
    let r = tes(&["bound", s(&dir.path().join("missing"))]);
    assert_eq!(r.code, 2);
}

#[test]
fn exact_k5_certificate_verifies() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "k5.txt", K5);
    let cert = dir.path().join("cert.json");
    let r = tes(&["exact", s(&g), "--out", s(&cert)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["tes"], 5);
    let r = tes(&["verify", s(&g), s(&cert)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["ok"], true);
}

#[test]
fn exact_triangle_and_tiny_budget() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.txt", "0 1\n1 2\n0 2\n");
    assert_eq!(tes(&["exact", s(&tri)]).json["tes"], 2);
    let k5 = write(&dir, "k5.txt", K5);
    let r = tes(&["exact", s(&k5), "--budget", "1"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json["kind"], "indeterminate");
}

#[test]
fn tampered_certificate_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "k5.txt", K5);
    let cert = dir.path().join("cert.json");
    tes(&["exact", s(&g), "--out", s(&cert)]);
    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let vw: Vec<u64> = file["vertex_weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    let t = file["t"].as_u64().unwrap();
    // Give some later edge the total sum of edge 0, keeping its value in range.
    let edges = file["edge_weights"].as_array().unwrap().clone();
    let sum = |e: &Value| {
        let (u, v, x) = (
            e[0].as_u64().unwrap(),
            e[1].as_u64().unwrap(),
            e[2].as_u64().unwrap(),
        );
        (vw[u as usize] + vw[v as usize], x)
    };
    let target_sum = sum(&edges[0]).0 + sum(&edges[0]).1;
    let (k, x) = edges
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(k, e)| {
            let (vs, _) = sum(e);
            (target_sum > vs && target_sum - vs <= t).then(|| (k, target_sum - vs))
        })
        .expect("some edge can collide");
    file["edge_weights"][k][2] = x.into();
    let bad = write(&dir, "bad.json", &file.to_string());
    let r = tes(&["verify", s(&g), s(&bad)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json["ok"], false);
    assert!(r.json["witness"].is_array());
}

#[test]
fn mismatched_sizes_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "k5.txt", K5);
    let cert = dir.path().join("cert.json");
    tes(&["exact", s(&g), "--out", s(&cert)]);
    let other = write(&dir, "p3.txt", "0 1\n1 2\n");
    assert_eq!(tes(&["verify", s(&other), s(&cert)]).code, 2);
    let junk = write(&dir, "junk.json", "{\"vertex_weights\": [1]}");
    assert_eq!(tes(&["verify", s(&g), s(&junk)]).code, 2);
}

#[test]
fn construct_tree_reaches_bound() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("tree.txt");
    assert_eq!(
        tes(&[
            "generate",
            "tree",
            "--n",
            "101",
            "--seed",
            "4",
            "--out",
            s(&g)
        ])
        .code,
        0
    );
    let w = dir.path().join("w.json");
    let report = dir.path().join("r.json");
    let r = tes(&["construct", s(&g), "--out", s(&w), "--report", s(&report)]);
    assert_eq!(r.code, 0, "{}", r.json);
    assert_eq!(r.json["strength"], 34);
    assert!(report.exists());
    let v = tes(&["verify", s(&g), s(&w)]);
    assert_eq!((v.code, v.json["t"].as_u64()), (0, Some(34)));
}

#[test]
fn construct_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    tes(&[
        "generate",
        "capped-degree",
        "--n",
        "300",
        "--m",
        "400",
        "--cap",
        "6",
        "--out",
        s(&g),
    ]);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(tes(&["construct", s(&g), "--out", s(&a)]).code, 0);
    assert_eq!(tes(&["construct", s(&g), "--out", s(&b)]).code, 0);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn impossible_case4_on_a_star_is_indeterminate() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("star.txt");
    tes(&["generate", "star", "--n", "30", "--out", s(&g)]);
    let r = tes(&["construct", s(&g), "--method", "case4"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json["status"], "error");
}

#[test]
fn corpus_small_graphs_all_match() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    let r = tes(&["corpus", "--max-vertices", "4", "--out", s(&out)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["mismatches"].as_array().unwrap().len(), 0);
    let mut rd = csv::Reader::from_path(&out).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len() as u64, r.json["graphs"].as_u64().unwrap());
    assert!(rows.iter().all(|row| &row[7] == "true"));
}

#[test]
fn corpus_with_one_vertex_is_header_only() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    assert_eq!(
        tes(&["corpus", "--max-vertices", "1", "--out", s(&out)]).code,
        0
    );
    assert_eq!(
        std::fs::read_to_string(out).unwrap().trim(),
        "graph_id,n,m,max_degree,lower_bound,conjectured,tes,matches"
    );
}

#[test]
fn appendix_tables() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("a.csv");
    let r = tes(&["appendix", "--which", "A", "--out", s(&out)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["entries"], 120);
    assert!(r.json["max_abs_deviation"].as_f64().unwrap() <= 1e-6);
    let rows = csv::Reader::from_path(&out).unwrap().records().count();
    assert_eq!(rows, 20);

    let r = tes(&["appendix", "--which", "azuma"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["below_one"], true);
    assert!(r.json["bound"].as_f64().unwrap() < 1.0);

    let r = tes(&["appendix", "--which", "delta", "--eps-mode", "small-degree"]);
    assert_eq!(r.code, 0);
    let delta = r.json["delta"].as_array().unwrap();
    assert_eq!(delta.len(), 20);
    assert_eq!(delta[0].as_f64(), Some(0.094));
    assert_eq!(r.json["invalid"].as_array().unwrap().len(), 0);
}

/// A tripartition satisfying all five conditions (`C` is the remaining vertices).
const LEMMA_EDGES: &str = "0 7\n0 8\n0 16\n0 23\n0 24\n0 30\n0 31\n1 9\n1 19\n1 22\n1 27\n2 3\n2 6\n2 7\n2 8\n2 9\n2 12\n2 19\n2 21\n2 28\n2 30\n2 31\n2 33\n2 35\n3 8\n3 9\n3 11\n3 12\n3 14\n3 21\n3 24\n3 29\n4 7\n4 13\n4 15\n4 16\n4 18\n4 22\n4 23\n4 24\n4 27\n4 31\n6 17\n7 13\n7 32\n8 14\n8 34\n10 28\n20 32\n24 34\n30 34\n31 35\n";

#[test]
fn lemma_builds_a_guarding_weighting() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &format!("# vertices 36\n{LEMMA_EDGES}"));
    let c: Vec<usize> = (5..36).collect();
    let part = serde_json::json!({ "a1": [0, 1, 2], "a2": [3, 4], "c": c });
    let p = write(&dir, "part.json", &part.to_string());
    let w = dir.path().join("w.json");
    let r = tes(&["lemma", s(&g), s(&p), "--out", s(&w)]);
    assert_eq!(r.code, 0, "{}", r.json);
    assert_eq!(r.json["order"].as_array().unwrap().len(), 31);
    let v = tes(&["verify", s(&g), s(&w)]);
    assert_eq!((v.code, &v.json["kind"]), (0, &Value::from("vertex")));

    let c: Vec<usize> = (5..36).chain([2]).collect();
    let short = serde_json::json!({ "a1": [0, 1], "a2": [3, 4], "c": c });
    let p = write(&dir, "short.json", &short.to_string());
    let r = tes(&["lemma", s(&g), s(&p)]);
    assert_eq!(r.code, 1, "{}", r.json);
    assert_eq!(r.json["condition"], 1);
}

#[test]
fn generate_writes_parseable_graphs() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("k.txt");
    let r = tes(&["generate", "complete", "--n", "6", "--out", s(&g)]);
    assert_eq!(
        (r.json["m"].as_u64(), r.json["max_degree"].as_u64()),
        (Some(15), Some(5))
    );
    assert_eq!(tes(&["bound", s(&g)]).json["m"], 15);
}
