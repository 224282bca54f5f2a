use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hkt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkt")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hkt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn has_float(v: &Value) -> bool {
    match v {
        Value::Number(n) => !(n.is_i64() || n.is_u64()),
        Value::Array(a) => a.iter().any(has_float),
        Value::Object(o) => o.values().any(has_float),
        _ => false,
    }
}

#[test]
fn catalog_list_text_and_json() {
    let o = hkt(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("su3_samelson"));
    assert!(text.contains("dotti_fino_nilpotent"));
    let o = hkt(&["catalog", "list", "--format", "json"]);
    let v = json(&o);
    assert!(v["entries"].as_array().unwrap().len() >= 10);
}

#[test]
fn verify_passing_entry() {
    let o = hkt(&["verify", "hopf_su2_r"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn exact_json_is_float_free_and_deterministic() {
    let a = hkt(&["verify", "su3_samelson", "--format", "json"]);
    let b = hkt(&["verify", "su3_samelson", "--format", "json", "--jobs", "1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(!has_float(&v));
    let e = &v["entries"][0];
    assert_eq!(e["name"], "su3_samelson");
    assert_eq!(e["flags"]["strong_hkt"], true);
    assert_eq!(e["h_norm_sq"], "24");
    assert_eq!(e["holonomy"]["class"], "{0}");
    assert_eq!(e["structure8"]["vertical_type"], "u1_su2");
    let checks = e["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c.get("id").is_some() && c.get("status").is_some() && c.get("residual").is_some()));
    assert!(v["tool_version"].is_string());
}

#[test]
fn float_json_uses_numbers() {
    let o = hkt(&["--mode", "float", "--tol", "1e-9", "classify", "su3_samelson", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["mode"], "float");
    let o = hkt(&["--mode", "float", "--tol", "1/1000000000", "verify", "hopf_su2_r"]);
    assert_eq!(code(&o), 0);
    assert!(v["entries"][0]["h_norm_sq"].is_number());
}

#[test]
fn unknown_entry_is_input_error() {
    assert_eq!(code(&hkt(&["verify", "no_such_entry"])), 2);
    assert_eq!(code(&hkt(&["verify"])), 2);
    assert_eq!(code(&hkt(&["frobnicate"])), 2);
    assert_eq!(code(&hkt(&["--mode", "float", "--tol", "-1", "verify", "abelian_r4"])), 2);
}

#[test]
fn malformed_file_is_input_error() {
    let p = scratch("malformed.json");
    std::fs::write(&p, "{\"version\": 1, \"name\": \"x\", \"dim\": 4, \"brackets\": [[1, 2, 9, \"1\"]]}").unwrap();
    let o = hkt(&["classify", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("brackets[0][2]"));
    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(code(&hkt(&["classify", p.to_str().unwrap()])), 2);
    assert_eq!(code(&hkt(&["classify", "/nonexistent/dir/entry.json"])), 2);
}

#[test]
fn wrong_expectation_is_verification_failure() {
    let p = scratch("wrong.json");
    let o = hkt(&["catalog", "export", "abelian_r4", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&p).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["expected"]["hyperkahler"] = Value::Bool(false);
    std::fs::write(&p, serde_json::to_string(&v).unwrap()).unwrap();
    let o = hkt(&["verify", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let failed: Vec<&str> = v["entries"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["flag.hyperkahler"]);
}

#[test]
fn export_roundtrip_and_product() {
    let p = scratch("hopf.json");
    assert_eq!(code(&hkt(&["catalog", "export", "hopf_su2_r", p.to_str().unwrap()])), 0);
    assert_eq!(code(&hkt(&["verify", p.to_str().unwrap()])), 0);
    let out = scratch("hopf2.json");
    let o = hkt(&["product", "hopf_su2_r", p.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = hkt(&["classify", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let e = &v["entries"][0];
    assert_eq!(e["dim"], 8);
    assert_eq!(e["structure8"]["regime"], "observed");
    assert_eq!(e["structure8"]["equivalence_flags"]["consistent"], false);
    assert_eq!(code(&hkt(&["catalog", "export", "no_such_entry", out.to_str().unwrap()])), 2);
}

#[test]
fn structure8_gating_and_force() {
    let o = hkt(&["classify", "dotti_fino_nilpotent", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["entries"][0]["structure8"].is_null());
    assert!(v["entries"][0]["structure8_skipped"].as_str().unwrap().contains("not strong"));
    let o = hkt(&["classify", "dotti_fino_nilpotent", "--force-structure8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["entries"][0]["structure8_skipped"].is_string());
}
