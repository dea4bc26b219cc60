use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const EXAMPLE: &str = "b :- not a. c :- not b. a :- c. d :- not d.\n";

fn paraco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paraco")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_paraco"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn paracoherent_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "ex.lp", EXAMPLE);
    for algorithm in ["filtering", "gc", "minimize", "split", "weak"] {
        let out = paraco(&["--format", "json", "paracoherent", &file, "--algorithm", algorithm]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["status"], "solved");
        assert_eq!(v["semantics"], "sst");
        assert_eq!(v["gap"], serde_json::json!(["gap_k_d"]));
        assert!(v["stats"]["solver_calls"].as_u64().unwrap() >= 1);
    }
}

#[test]
fn paracoherent_all_lists_every_model() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "ex.lp", EXAMPLE);
    let v = json(&paraco(&["--format", "json", "paracoherent", &file, "--semantics", "seq", "--all"]));
    let models: Vec<Value> = v["models"].as_array().unwrap().iter().map(|m| m["model"].clone()).collect();
    assert_eq!(
        models,
        [serde_json::json!(["a", "c", "k_a", "k_c", "k_d"]), serde_json::json!(["b", "k_b", "k_d"])]
    );
    let text = String::from_utf8(paraco(&["paracoherent", &file, "--all"]).stdout).unwrap();
    assert!(text.contains("SST 1: {a, c, k_a, k_d}"));
    assert!(text.contains("SST 2: {b, k_b, k_d}"));
}

#[test]
fn split_with_random_oneof() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "ex.lp", EXAMPLE);
    let v = json(&paraco(&[
        "--format", "json", "--seed", "9", "paracoherent", &file, "--algorithm", "split", "--oneof", "random",
    ]));
    assert_eq!(v["asserted"], v["gap"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let none = write(dir.path(), "none.lp", "a | b. :- a. :- b.\n");
    assert_eq!(paraco(&["paracoherent", &none]).status.code(), Some(10));
    let ex = write(dir.path(), "ex.lp", EXAMPLE);
    assert_eq!(paraco(&["solve", &ex]).status.code(), Some(10));
    assert_eq!(paraco(&["paracoherent", &ex]).status.code(), Some(0));
    assert_eq!(paraco(&["paracoherent", &ex, "--algorithm", "nope"]).status.code(), Some(2));
    assert_eq!(paraco(&["solve"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.lp", "a :- \n");
    assert_eq!(paraco(&["solve", &bad]).status.code(), Some(2));
    let reserved = write(dir.path(), "reserved.lp", "k_a :- not b.\n");
    assert_eq!(paraco(&["paracoherent", &reserved]).status.code(), Some(2));
    assert_eq!(paraco(&["solve", "/nonexistent/file.lp"]).status.code(), Some(2));
}

#[test]
fn timeout_exit_code() {
    let mut rules = String::new();
    for i in 0..40 {
        rules.push_str(&format!("a{i} | b{i} :- not c{i}.\nc{i} :- a{i}, not b{}.\nx :- not x, a{i}.\n", (i + 1) % 40));
    }
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "hard.lp", &rules);
    let out = paraco(&["--timeout-ms", "20", "--format", "json", "paracoherent", &file, "--algorithm", "filtering"]);
    assert_eq!(out.status.code(), Some(20));
    assert_eq!(json(&out)["status"], "timeout");
}

#[test]
fn solve_enumerates_and_optimizes() {
    let out = with_stdin(&["--format", "json", "solve", "-", "--all"], "a | b. c :- a.\n");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["answer_sets"], serde_json::json!([["a", "c"], ["b"]]));
    let out = with_stdin(&["--format", "json", "solve", "-", "--all", "--limit", "1"], "a | b. c :- a.\n");
    assert_eq!(json(&out)["answer_sets"].as_array().unwrap().len(), 1);
    let out = with_stdin(&["--format", "json", "solve", "-"], "a | b. c :- a. :~ c.\n");
    let v = json(&out);
    assert_eq!(v["status"], "optimum");
    assert_eq!(v["cost"], 0);
    assert_eq!(v["answer_sets"], serde_json::json!([["b"]]));
}

#[test]
fn transform_prints_a_program() {
    let out = with_stdin(&["transform", "-", "--kind", "kappa", "--no-gap"], "b :- not a.\n");
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim_end(),
        "lam_0_0 | k_a.\nb :- lam_0_0.\n:- a, lam_0_0.\nlam_0_0 :- b, lam_0_0."
    );
    let out = with_stdin(&["--format", "json", "transform", "-", "--kind", "ht", "--with-gap"], EXAMPLE);
    let v = json(&out);
    assert_eq!(v["kind"], "ht");
    assert_eq!(v["with_gap"], true);
    assert_eq!(v["rules"], 25);
}

#[test]
fn hidden_oracle_subcommand() {
    let help = String::from_utf8(paraco(&["--help"]).stdout).unwrap();
    assert!(!help.contains("oracle"));
    let out = with_stdin(&["--format", "json", "oracle", "-", "--semantics", "seq"], EXAMPLE);
    assert_eq!(
        json(&out)["models"],
        serde_json::json!([["a", "c", "k_a", "k_c", "k_d"], ["b", "k_b", "k_d"]])
    );
    let out = with_stdin(&["oracle", "-", "--semantics", "as"], "a | b.\n");
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), "{a}\n{b}");
}

#[test]
fn bench_writes_report_and_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = paraco(&[
        "--seed",
        "3",
        "bench",
        "--count",
        "4",
        "--algorithms",
        "minimize,split",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["cells"].as_array().unwrap().len(), 8);
    let solved = report["totals"]["minimize"]["solved"].as_u64().unwrap()
        + report["totals"]["minimize"]["no_model"].as_u64().unwrap()
        + report["totals"]["minimize"]["timeout"].as_u64().unwrap();
    assert_eq!(solved, 4);
    let scatter = std::fs::read_to_string(out_dir.join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().next(), Some("instance,x,y,x_ms,y_ms"));
    assert_eq!(scatter.lines().count(), 1 + 4 * 2);
}

#[test]
fn bench_rejects_missing_files() {
    let out = paraco(&["bench", "/nonexistent/a.lp"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sizes_table() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "ex.lp", EXAMPLE);
    let v = json(&paraco(&["--format", "json", "sizes", &file]));
    let row = &v["rows"][0];
    assert_eq!(row["program"], serde_json::json!({ "atoms": 4, "rules": 4 }));
    assert_eq!(row["kappa"]["rules"], 17);
    assert!(row["ht"]["rules"].as_u64() > row["kappa"]["rules"].as_u64());
    let text = String::from_utf8(paraco(&["sizes", "--count", "10"]).stdout).unwrap();
    assert!(text.contains("HT/κ rules"));
}
