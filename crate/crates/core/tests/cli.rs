use std::process::Command;

use peisert::graphs::{adjacency, read_matrix_market};
use peisert::{FieldTable, GraphKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_peisert"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn critgroup_json_schema() {
    let (code, stdout, _) = run(&["critgroup", "--q", "9", "--method", "both"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["q"], 9);
    assert_eq!(v["graph"], "peisert");
    assert_eq!(v["method"], "both");
    assert_eq!(v["spanning_trees"], "11664");
    assert_eq!(v["p_rank"], 4);
    assert_eq!(v["critical_group"]["invariant_factors"], serde_json::json!(["6", "6", "18", "18"]));
    assert_eq!(v["elementary_divisors"]["3"], serde_json::json!({"1": 2, "2": 2}));
    assert_eq!(v["blocks"].as_array().unwrap().len(), 1);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["critgroup", "--q", "49", "--method", "formula"]).1;
    let b = run(&["critgroup", "--q", "49", "--method", "formula", "--jobs", "1"]).1;
    assert_eq!(a, b);
}

#[test]
fn invalid_parameters_exit_2() {
    let (code, _, err) = run(&["critgroup", "--q", "25", "--graph", "peisert"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"));
    assert_eq!(run(&["critgroup", "--q", "81", "--method", "snf", "--graph", "paley", "--q", "3"]).0, 2);
    assert_eq!(run(&["critgroup", "--q", "2401", "--method", "snf"]).0, 2);
    assert_eq!(run(&["critgroup", "--q", "49", "--graph", "paley", "--method", "formula"]).0, 2);
    assert_eq!(run(&["verify", "--suite", "canon", "--q", "81"]).0, 2);
}

#[test]
fn paley_snf_path() {
    let (code, stdout, _) = run(&["critgroup", "--q", "25", "--graph", "paley", "--method", "snf"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["checks"]["kirchhoff"], true);
}

#[test]
fn verify_suites_exit_0() {
    for suite in ["carries", "stickelberger", "action", "blocks"] {
        assert_eq!(run(&["verify", "--suite", suite, "--q", "9"]).0, 0, "{suite}");
    }
    for suite in ["berndt", "canon", "m0"] {
        assert_eq!(run(&["verify", "--suite", suite, "--p", "7", "--t", "1"]).0, 0, "{suite}");
    }
}

#[test]
fn compare_q49() {
    let (code, stdout, _) = run(&["compare", "--p", "7", "--samples", "1,0,0;2,1,-1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["generalized"]["samples"].as_array().unwrap().len(), 2);
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    let (code, _, _) = run(&[
        "export", "--q", "49", "--matrix", "adjacency", "--format", "matrixmarket", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate integer symmetric"));
    let m = read_matrix_market(text.as_bytes()).unwrap();
    let a = adjacency(&FieldTable::new(7, 2).unwrap(), GraphKind::Peisert).unwrap();
    assert_eq!(m, a);

    let (code, stdout, _) = run(&["export", "--q", "9", "--matrix", "generalized:2,1,0", "--format", "matrixmarket"]);
    assert_eq!(code, 0);
    let k = read_matrix_market(stdout.as_bytes()).unwrap();
    assert_eq!(k.get(0, 0).to_string(), "1");
    assert_eq!(run(&["export", "--q", "9", "--matrix", "bogus"]).0, 2);
}

#[test]
fn small_commands() {
    let (code, stdout, _) = run(&["trees", "--q", "9"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"11664\""));
    let (code, stdout, _) = run(&["prank", "--q", "81", "--method", "both"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"rank_mod_p\": 16"));
    let (code, stdout, _) = run(&["smithgroup", "--q", "9", "--method", "both"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"paths_agree\": true"));
    let (code, stdout, _) = run(&["field", "--q", "9", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("q: 9"));
    let (code, stdout, _) = run(&["blocks", "--q", "49", "--local"]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&stdout).unwrap()["blocks"].as_array().unwrap().len(), 11);
}
