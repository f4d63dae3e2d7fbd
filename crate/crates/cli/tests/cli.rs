use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperwit")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = hyperwit(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn assert_schema(name: &str, v: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn cross_check_matches_for_all_n_minus_1() {
    let v = json(&["entanglement", "--family", "all-n-1", "--n", "4", "--cross-check"]);
    assert_eq!(v["cross_check"]["match"], Value::Bool(true));
    assert!((v["alpha"].as_f64().unwrap() - (3.0 + 5f64.sqrt()) / 8.0).abs() < 1e-9);
    assert_schema("entanglement.json", &v);
}

#[test]
fn closed_form_and_procedure_methods() {
    let v = json(&["entanglement", "--family", "single-max", "--n", "5", "--method", "closed-form"]);
    assert_eq!(v["alpha"]["num"], 15);
    assert_eq!(v["alpha"]["den"], 16);
    let p = json(&["entanglement", "--family", "all-ge-n-1", "--n", "5", "--method", "procedure"]);
    assert!(p["alpha"].as_f64().is_some());
}

#[test]
fn single_bipartition_schmidt() {
    let v = json(&["entanglement", "--family", "single-max", "--n", "3", "--partA", "1"]);
    assert_eq!(v["rank"], 2);
    assert!((v["alpha"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn entanglement_csv_rows() {
    let csv = stdout(&["entanglement", "--family", "single-max", "--n", "4", "--format", "csv"]);
    assert_eq!(csv.lines().next().unwrap(), "bipartition,part_a,part_b,alpha,E");
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn reduce_figure_instance_and_caption_edges() {
    let fig = json(&["reduce", "--edges", "[[1,2],[3,4],[3,4,5],[2,3,4,5]]", "--n", "5", "--partA", "1,2,3"]);
    assert_eq!(fig["bound_float"], 0.25);
    assert_eq!(fig["branch_count"], 4);
    assert_eq!(fig["validated"], true);
    assert_schema("reduction.json", &fig);
    let caption = json(&["reduce", "--edges", "[[3,4],[1,2,4,5]]", "--n", "5", "--partA", "1,2,3"]);
    assert_eq!(caption["bound_float"], 0.125);
    assert_schema("reduction.json", &caption);
}

#[test]
fn reduce_all_bipartitions() {
    let v = json(&["reduce", "--family", "single-max", "--n", "4"]);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 7);
    assert_eq!(v["certified_lower_bound"]["den"], 8);
    for c in v["certificates"].as_array().unwrap() {
        assert_schema("reduction.json", c);
    }
}

#[test]
fn witness_table_csv() {
    let csv = stdout(&["witness", "table", "--family", "single-max", "--n", "2..4"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,p_L_num,p_L_den,p_L,p_tilde_L_num,p_tilde_L_den,p_tilde_L");
    assert!(lines[1].starts_with("2,2,3,"));
    assert!(lines[2].starts_with("3,2,7,"));
    assert!(lines[3].starts_with("4,2,15,"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn witness_build_and_eval() {
    let w = json(&["witness", "build", "--family", "single-max", "--n", "3"]);
    assert_eq!((w["robustness_num"].as_i64(), w["robustness_den"].as_i64()), (Some(2), Some(7)));
    assert_schema("witness.json", &w);
    let s = json(&["witness", "build", "--family", "all-n-1", "--n", "4", "--kind", "stabilizer"]);
    assert_eq!(s["feasibility"]["feasible"], true);
    assert_eq!(s["feasibility"]["feasible_below_optimum"], false);
    assert_eq!(s["robustness_num"], Value::Null);
    assert_schema("witness.json", &s);
    // just above and below the robustness threshold 2/7
    let inside = json(&["witness", "eval", "--family", "single-max", "--n", "3", "--p", "1/4"]);
    assert_eq!(inside["detected"], true);
    let outside = json(&["witness", "eval", "--family", "single-max", "--n", "3", "--p", "0.3"]);
    assert_eq!(outside["detected"], false);
}

#[test]
fn settings_count_and_list() {
    let c = json(&["settings", "count", "--family", "single-max", "--n", "3"]);
    assert_schema("settings.json", &c);
    let l = json(&["settings", "list", "--family", "single-max", "--n", "3", "--mode", "greedy"]);
    assert_schema("settings.json", &l);
    assert!(l["count"].as_u64().unwrap() <= c["count"].as_u64().unwrap());
    assert_eq!(l["settings"].as_array().unwrap().len() as u64, l["count"].as_u64().unwrap());
    let stab = stdout(&["settings", "count", "--family", "single-max", "--n", "4", "--kind", "stabilizer", "--format", "text"]);
    assert_eq!(stab.trim(), "4");
    let product = json(&["settings", "list", "--family", "single-max", "--n", "2", "--product", "1,2"]);
    assert_eq!(product["settings"], serde_json::json!(["YY"]));
}

#[test]
fn state_round_trip_through_hex() {
    let hex = stdout(&["state", "build", "--edges", "[[1,2],[2,3,4]]", "--n", "4", "--format", "text"]);
    let text = stdout(&["state", "dump", "--hex", hex.trim(), "--n", "4", "--format", "text"]);
    assert_eq!(text.trim(), "n=4; edges=[[1,2],[2,3,4]]");
    let csv = stdout(&["state", "dump", "--family", "single-max", "--n", "2", "--format", "csv"]);
    assert_eq!(csv, "label,bits,sign\n0,00,1\n1,01,1\n2,10,1\n3,11,-1\n");
}

#[test]
fn verify_checks_pass() {
    for check in ["stabilizers", "basis", "projector"] {
        let v = json(&["verify", check, "--family", "all-ge-n-1", "--n", "4"]);
        assert_eq!(v["holds"], true, "{check}");
    }
}

#[test]
fn campaign_is_deterministic_across_threads() {
    let args = ["campaign", "lower-bound", "--seed", "11", "--count", "12", "--n-max", "6", "--certify-up-to", "5"];
    let one = stdout(&[&args[..], &["--threads", "1"]].concat());
    let four = stdout(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let v: Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["all_hold"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("hyperwit-out-{}.csv", std::process::id()));
    let out = hyperwit(&["witness", "table", "--family", "all-ge-n-1", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(body.starts_with("n,p_L_num"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hyperwit(&["entanglement", "--edges", "[[1,2]]"]).status.code(), Some(2));
    assert_eq!(hyperwit(&["entanglement", "--family", "single-max", "--n", "1"]).status.code(), Some(2));
    assert_eq!(hyperwit(&["reduce", "--edges", "[[1,2],[3,4]]", "--n", "4", "--partA", "1,2"]).status.code(), Some(2));
    assert_eq!(hyperwit(&["witness", "eval", "--family", "single-max", "--n", "3", "--p", "3/2"]).status.code(), Some(2));
    assert_eq!(hyperwit(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hyperwit(&["entanglement", "--family", "single-max", "--n", "14"]).status.code(), Some(2));
}
