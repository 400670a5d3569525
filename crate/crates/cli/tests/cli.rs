use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use xpaudit_core::model::read_model;
use xpaudit_core::shapley::shapley_values;
use xpaudit_core::{Backend, ExplanationProblem, Limits, Point};

const K1: &str = r#"{"type":"table",
  "features":[{"name":"x1","domain":2},{"name":"x2","domain":2},{"name":"x3","domain":2}],
  "classes":[0,1,2,3],
  "rows":[[0,0,0,0],[0,0,1,3],[0,1,0,2],[0,1,1,3],[1,0,0,1],[1,0,1,1],[1,1,0,1],[1,1,1,1]]}"#;

fn xpaudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xpaudit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn k1_file(dir: &TempDir) -> String {
    let path = dir.path().join("k1.json");
    fs::write(&path, K1).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn explain_k1() {
    let dir = TempDir::new().unwrap();
    let model = k1_file(&dir);
    let r = json(&stdout(&xpaudit(&["explain", "--model", &model, "--instance", "1,0,0"])));
    assert_eq!(r["axps"], serde_json::json!([[1]]));
    assert_eq!(r["irrelevant"], serde_json::json!([2, 3]));
    let brute = stdout(&xpaudit(&["explain", "--model", &model, "--instance", "1,0,0", "--engine", "brute"]));
    assert_eq!(json(&brute), r);
    let rules = stdout(&xpaudit(&["explain", "--model", &model, "--instance", "1,0,0", "--rules"]));
    assert_eq!(rules, "IF x1=1 THEN class=1\n");
}

#[test]
fn shapley_k1_is_byte_identical_to_the_library() {
    let dir = TempDir::new().unwrap();
    let model = k1_file(&dir);
    let out = dir.path().join("sv.json");
    let o = xpaudit(&["shapley", "--model", &model, "--instance", "1,0,0", "--out", out.to_str().unwrap()]);
    stdout(&o);
    let written = fs::read_to_string(&out).unwrap();

    let m = read_model(K1, &Limits::default()).unwrap();
    let p = ExplanationProblem::new(&m, Point::from(vec![1, 0, 0])).unwrap();
    assert_eq!(written, shapley_values(&p, Backend::Enumerate).unwrap().to_json());

    let r = json(&written);
    let pairs: Vec<(i64, i64)> = r["sv"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["num"].as_i64().unwrap(), e["den"].as_i64().unwrap()))
        .collect();
    assert_eq!(pairs, vec![(-1, 24), (-1, 6), (-7, 24)]);
    assert_eq!(r["sv"][2]["decimal"], "-0.2917");
    assert_eq!(r["residual"], "0");
    let paths = stdout(&xpaudit(&["shapley", "--model", &model, "--instance", "1,0,0", "--method", "paths"]));
    assert_eq!(paths, written);
}

#[test]
fn synth_then_shapley() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("c5.json");
    let cert = dir.path().join("c5.cert.json");
    stdout(&xpaudit(&[
        "synth", "--family", "c5", "--paper",
        "--out", model.to_str().unwrap(), "--cert", cert.to_str().unwrap(),
    ]));
    let c = json(&fs::read_to_string(&cert).unwrap());
    assert_eq!(c["family"], "c5");
    assert_eq!(c["constraints_checked"], true);
    assert_eq!(c["axps"], serde_json::json!([[1]]));
    let r = json(&stdout(&xpaudit(&["shapley", "--model", model.to_str().unwrap(), "--instance", "1,1,2"])));
    let decimals: Vec<&str> = r["sv"].as_array().unwrap().iter().map(|e| e["decimal"].as_str().unwrap()).collect();
    assert_eq!(decimals, vec!["0.0000", "0.1667", "-0.5000"]);
    assert_eq!((r["sv"][1]["num"].as_i64(), r["sv"][1]["den"].as_i64()), (Some(1), Some(6)));

    let solved = xpaudit(&["synth", "--family", "d", "--solve", "--budget", "100000"]);
    let c = json(&String::from_utf8(solved.stderr.clone()).unwrap());
    assert!(solved.status.success());
    assert_eq!(c["constraints_checked"], true);
    let exhausted = xpaudit(&["synth", "--family", "c", "--solve", "--budget", "2"]);
    assert_eq!(exhausted.status.code(), Some(1));
}

#[test]
fn adversarial_and_validate() {
    let dir = TempDir::new().unwrap();
    let model = k1_file(&dir);
    let r = json(&stdout(&xpaudit(&["adversarial", "--model", &model, "--instance", "1,0,0"])));
    assert_eq!(r["min_l0"], 1);
    assert_eq!(r["minimal_sets"][0]["changed"], serde_json::json!([1]));
    assert_eq!(r["minimal_sets"][0]["witness"], serde_json::json!([0, 0, 0]));
    let v = json(&stdout(&xpaudit(&["validate", "--model", &model, "--instance", "1,0,0"])));
    assert_eq!(v["residual"], "0");
    assert_eq!(v["phi_empty"]["num"], 3);
    let plain = json(&stdout(&xpaudit(&["validate", "--model", &model])));
    assert_eq!(plain["points"], 8);
}

#[test]
fn scan_outputs() {
    let dir = TempDir::new().unwrap();
    let model = k1_file(&dir);
    let csv = dir.path().join("scan.csv");
    let summary = dir.path().join("summary.json");
    stdout(&xpaudit(&[
        "scan", "--model", &model, "--all", "--jobs", "2",
        "--out", csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("4,1,0,0,1,-0.0417,-0.1667,-0.2917,1,1,0.2917,0.0417"));
    let s = json(&fs::read_to_string(&summary).unwrap());
    assert_eq!(s["total"], 8);

    let a = stdout(&xpaudit(&["scan", "--model", &model, "--sample", "5", "--seed", "7"]));
    let b = stdout(&xpaudit(&["scan", "--model", &model, "--sample", "5", "--seed", "7", "--jobs", "1", "--method", "paths"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 6);
}

#[test]
fn build_and_convert_round_trip() {
    let dir = TempDir::new().unwrap();
    let model = k1_file(&dir);
    let omdd = dir.path().join("k1.omdd.json");
    let back = dir.path().join("k1.table.json");
    stdout(&xpaudit(&["convert", "--model", &model, "--to", "omdd", "--order", "3,1,2", "--out", omdd.to_str().unwrap()]));
    stdout(&xpaudit(&["convert", "--model", omdd.to_str().unwrap(), "--to", "table", "--out", back.to_str().unwrap()]));
    let original = json(K1);
    let round = json(&fs::read_to_string(&back).unwrap());
    assert_eq!(round["rows"], original["rows"]);
    assert_eq!(json(&fs::read_to_string(&omdd).unwrap())["order"], serde_json::json!([3, 1, 2]));

    let data = dir.path().join("k1.csv");
    let mut rows = String::from("x1,x2,x3,class\n");
    for r in original["rows"].as_array().unwrap() {
        let cells: Vec<String> = r.as_array().unwrap().iter().map(|c| c.to_string()).collect();
        rows.push_str(&cells.join(","));
        rows.push('\n');
    }
    rows.push_str("0,0,0,3\n");
    fs::write(&data, rows).unwrap();
    let built = dir.path().join("built.json");
    let o = xpaudit(&["build-omdd", "--data", data.to_str().unwrap(), "--out", built.to_str().unwrap()]);
    stdout(&o);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dropped 1"));
    let table = json(&stdout(&xpaudit(&["convert", "--model", built.to_str().unwrap(), "--to", "table"])));
    assert_eq!(table["rows"], original["rows"]);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let model = k1_file(&dir);
    let code = |args: &[&str]| xpaudit(args).status.code();
    assert_eq!(code(&["explain", "--model", &model, "--instance", "1,3,0"]), Some(2));
    assert_eq!(code(&["explain", "--model", &model, "--instance", "1,x,0"]), Some(2));
    assert_eq!(code(&["explain", "--model", &model]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["explain", "--model", "/nonexistent.json", "--instance", "1,0,0"]), Some(1));
    assert_eq!(code(&["shapley", "--model", &model, "--instance", "1,0,0", "--max-points", "4"]), Some(1));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"type":"table","features":[],"classes":[],"rows":[]}"#).unwrap();
    assert_eq!(code(&["validate", "--model", bad.to_str().unwrap()]), Some(1));
    assert!(!Path::new("/nonexistent.json").exists());
}
