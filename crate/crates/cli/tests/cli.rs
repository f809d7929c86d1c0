use std::process::{Command, Output};

use serde_json::Value;

fn majorant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn rearrange_prints_sorted_magnitudes() {
    let out = majorant(&["rearrange", "--x", "[0, 2, -1]"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["values"], serde_json::json!(["2", "1", "0"]));
}

#[test]
fn sequences_are_read_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.json");
    std::fs::write(&x, r#"["3/2", -4, 0.5]"#).unwrap();
    let out = majorant(&["rearrange", "--x", x.to_str().unwrap()]);
    assert_eq!(json_of(&out)["values"], serde_json::json!(["4", "3/2", "1/2"]));
}

#[test]
fn kfunc_for_l1_linf_is_exact() {
    let out = majorant(&["kfunc", "--couple", "1,inf", "--t", "1/2", "--x", "[3, 1]"]);
    let v = json_of(&out);
    assert_eq!(v["value"], "3/2");
    assert_eq!(v["lower"], v["upper"]);
}

#[test]
fn kfunc_for_l1_lq_brackets_the_value() {
    let out = majorant(&["kfunc", "--couple", "1,q", "--q", "2", "--t", "1", "--x", "[3, 1]"]);
    let v = json_of(&out);
    let value = v["value"].as_f64().unwrap();
    assert!(v["lower"].as_f64().unwrap() <= value && value <= v["upper"].as_f64().unwrap());
    assert!((value - 10f64.sqrt()).abs() < 1e-9);
}

#[test]
fn majorize_check_reports_first_violation_and_exit_status() {
    let ok = majorant(&["majorize", "check", "--kind", "hlp", "--u", "[3, 1]", "--v", "[2, 2]"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_of(&ok)["holds"], true);

    let bad = majorant(&["majorize", "check", "--kind", "hlp", "--u", "[2, 2]", "--v", "[3]"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_of(&bad)["first_violation"], 1);

    let sq = majorant(&["majorize", "check", "--kind", "sq", "--q", "2", "--u", "[1, 1]", "--v", "[\"1/2\", 1]"]);
    assert_eq!(sq.status.code(), Some(1));
    assert_eq!(json_of(&sq)["first_violation"], 2);
}

#[test]
fn transfer_emits_exact_convex_combination() {
    let out = majorant(&["transfer", "--x", "[3, -1, 2]", "--y", "[1, 1, 1]"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["check"], "exact");
    let weights = v["weights"].as_array().unwrap();
    assert_eq!(weights.len(), v["permutations"].as_array().unwrap().len());
}

#[test]
fn transfer_refuses_undominated_target() {
    let out = majorant(&["transfer", "--x", "[1]", "--y", "[2]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn procp_run_prints_the_ledger() {
    let out = majorant(&["procp", "run", "--x", "[3, 2, 1]", "--y", "[2, 1]", "--q", "2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["c3"], "9225/1024");
    let steps = v["certificate"]["decomposition"]["steps"].as_array().unwrap();
    assert_eq!(steps.last().unwrap()["outcome"], "O-3");
}

#[test]
fn json_flag_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = majorant(&["--json", path.to_str().unwrap(), "space", "norm", "--space", "weak-lp:2", "--x", "[1, 1, 1, 1]"]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["norm"], 2.0);
}

#[test]
fn sq_probe_on_l1_finds_nothing() {
    let out = majorant(&["space", "sq-probe", "--space", "lp:1", "--q", "2", "--C", "1", "--trials", "300", "--seed", "7"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["violations"], serde_json::json!([]));
}

#[test]
fn verify_reports_are_deterministic_up_to_timing() {
    let args = ["verify", "thm-enough", "--space", "lp:3/2", "--trials", "40", "--seed", "3"];
    let (mut a, mut b) = (json_of(&majorant(&args)), json_of(&majorant(&args)));
    assert_eq!(a["pass"], true);
    a.as_object_mut().unwrap().remove("timing");
    b.as_object_mut().unwrap().remove("timing");
    assert_eq!(a, b);
}

#[test]
fn verify_thm_main_passes_on_l1() {
    let out = majorant(&["verify", "thm-main", "--space", "l1", "--q", "2", "--trials", "30", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["theorem"], "thm-main");
    assert_eq!(v["trials"], 30);
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    assert_eq!(majorant(&["bogus"]).status.code(), Some(2));
    assert_eq!(majorant(&["rearrange", "--x", "[\"1/0\"]"]).status.code(), Some(2));
    assert_eq!(majorant(&["space", "norm", "--space", "lp:1/2", "--x", "[1]"]).status.code(), Some(2));
    assert_eq!(majorant(&["kfunc", "--couple", "1,q", "--t", "1", "--x", "[1]"]).status.code(), Some(2));
}

#[test]
fn float_mode_reads_floats() {
    let out = majorant(&["--mode", "float", "rearrange", "--x", "[0.5, -2]"]);
    let v = json_of(&out);
    assert_eq!(v["mode"], "float");
    assert_eq!(v["values"], serde_json::json!([2.0, 0.5]));
}
