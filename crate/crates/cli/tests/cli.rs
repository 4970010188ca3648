use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cheeger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cheeger"))
        .args(args)
        .env_remove("CHEEGER_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn without_timestamp(text: &[u8]) -> Value {
    let mut v: Value = serde_json::from_slice(text).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn generated_tree_then_cheeger_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tree.json");
    let out = cheeger(&[
        "gen",
        "--family",
        "tree",
        "--k",
        "2",
        "--radius",
        "4",
        "--out",
        path(&graph),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 31);
    assert_eq!(doc["family"]["kind"], "k_regular_tree");

    let report = dir.path().join("report.json");
    let out = cheeger(&["verify", "--suite", "cheeger", "--out", path(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["result"]["passed"], true);
    assert_eq!(report["seed"], 0);
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"vertices\": [").unwrap();
    for cmd in [
        "cheeger",
        "lambda0",
        "curvature",
        "growth",
        "potential",
        "metric",
    ] {
        let out = cheeger(&[cmd, "--graph", path(&bad)]);
        assert_eq!(code(&out), 2, "{cmd}");
    }
    let out = cheeger(&["cheeger", "--graph", path(&dir.path().join("missing.json"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn negative_weight_is_rejected_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    std::fs::write(
        &graph,
        r#"{"vertices":[{"id":0,"m":1.0},{"id":1,"m":1.0}],
            "edges":[{"u":0,"v":1,"b":-1.0}]}"#,
    )
    .unwrap();
    let out = cheeger(&["lambda0", "--graph", path(&graph)]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exact_enumeration_over_capacity_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("path.json");
    let out = cheeger(&[
        "gen",
        "--family",
        "path",
        "--radius",
        "29",
        "--out",
        path(&graph),
    ]);
    assert_eq!(code(&out), 0);
    let out = cheeger(&["cheeger", "--graph", path(&graph), "--exact"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));

    // The heuristics still run on the same set.
    let out = cheeger(&["cheeger", "--graph", path(&graph), "--sweep"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let graph = dir.path().join(name);
        let gen = cheeger(&[
            "--seed",
            seed,
            "gen",
            "--family",
            "random",
            "--vertices",
            "9",
            "--potential",
            "0.1,1",
            "--out",
            path(&graph),
        ]);
        assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
        let pot = cheeger(&["--seed", seed, "potential", "--graph", path(&graph)]);
        assert_eq!(code(&pot), 0, "{}", String::from_utf8_lossy(&pot.stderr));
        (
            std::fs::read(&graph).unwrap(),
            without_timestamp(&pot.stdout),
        )
    };
    let a = run("a.json", "17");
    let b = run("b.json", "17");
    let c = run("c.json", "18");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}

#[test]
fn csv_outputs_carry_seed_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tree.json");
    let table = dir.path().join("growth.csv");
    assert_eq!(
        code(&cheeger(&[
            "gen",
            "--family",
            "tree",
            "--k",
            "3",
            "--radius",
            "5",
            "--out",
            path(&graph)
        ])),
        0
    );
    let out = cheeger(&[
        "--seed",
        "5",
        "growth",
        "--graph",
        path(&graph),
        "--radii",
        "1,2,3",
        "--csv",
        path(&table),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&table).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "# seed=5");
    assert_eq!(lines[1], "r,inf_value");
    assert_eq!(lines.len(), 5);
}

#[test]
fn failing_growth_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tree.json");
    assert_eq!(
        code(&cheeger(&[
            "gen",
            "--family",
            "tree",
            "--k",
            "2",
            "--radius",
            "8",
            "--out",
            path(&graph)
        ])),
        0
    );
    // alpha is far below 5 on a binary tree, so claiming 5 must fail.
    let out = cheeger(&["growth", "--graph", path(&graph), "--alpha-lower", "5"]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["certificate"]["passed"], false);
}

#[test]
fn unknown_suite_is_an_input_error() {
    assert_eq!(code(&cheeger(&["verify", "--suite", "nonsense"])), 2);
}
