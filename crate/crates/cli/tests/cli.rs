use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn golden(bundle: &str, y: &str) -> String {
    let cf: Vec<String> = std::iter::once("0".into()).chain(std::iter::repeat_n("1".to_string(), 100)).collect();
    format!(
        r#"{{"schema_version":1,"system":{{"kind":"rotation","theta_cf":[{}]}},"bundle":{bundle},"Y":{y},"budgets":{{"samples":60,"seed":3}}}}"#,
        cf.join(",")
    )
}

const ODOMETER: &str = r#"{"schema_version":1,"system":{"kind":"odometer","radices":[2,3]},"bundle":{"trivial":true},
  "Y":{"prefixes":[[0]]},"budgets":{"samples":60,"seed":3}}"#;

fn run(sub: &str, config: &str, extra: &[&str]) -> (Output, Value) {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(config.as_bytes()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_orbitrsh"))
        .arg(sub)
        .arg("--config")
        .arg(f.path())
        .args(extra)
        .output()
        .unwrap();
    let json = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out, json)
}

#[test]
fn odometer_towers() {
    let (out, v) = run("towers", ODOMETER, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["towers"]["K"], 1);
    assert_eq!(v["towers"]["levels"][0]["r"], 2);
}

#[test]
fn golden_decompose() {
    let (out, v) = run("decompose", &golden(r#"{"degree":1}"#, r#"{"arcs":[{"a":"0","b":"0.5"}]}"#), &["--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["rsh"]["matrix_sizes"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["rsh"]["length"], 3);
    assert_eq!(v["passed"], true);
}

#[test]
fn measure_zero_y_is_a_config_error() {
    let (out, v) = run("towers", &golden(r#"{"degree":1}"#, r#"{"arcs":[{"a":"0.25","b":"0.25"}]}"#), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(v["error"]["message"].as_str().unwrap().contains("Y requires non-empty interior"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Y requires non-empty interior"));
}

#[test]
fn malformed_config_still_emits_json() {
    let (out, v) = run("towers", "{\"schema_version\": 1", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["exit_code"], 2);
    let (out, _) = run("towers", &ODOMETER.replace("\"schema_version\":1", "\"schema_version\":9"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tiny_horizon_exits_three() {
    let cfg = golden(r#"{"degree":1}"#, r#"{"arcs":[{"a":"0","b":"0.01"}]}"#).replace("\"samples\":60", "\"samples\":60,\"max_return\":20");
    let (out, v) = run("towers", &cfg, &[]);
    assert_eq!(out.status.code(), Some(3), "{v}");
    assert_eq!(v["error"]["kind"], "max_return_exceeded");
}

#[test]
fn failing_suite_exits_one() {
    let cfg = golden(r#"{"degree":1}"#, r#"{"arcs":[{"a":"0","b":"0.5"}]}"#).replace("\"seed\":3", "\"seed\":3,\"eps_alg\":1e-300");
    let (out, v) = run("check-bundle", &cfg, &[]);
    assert_eq!(out.status.code(), Some(1), "{v}");
    assert_eq!(v["passed"], false);
    assert!(v["suites"][0]["checks"].as_array().unwrap().iter().any(|c| c["passed"] == false));
}

#[test]
fn output_is_deterministic_across_job_counts() {
    let cfg = golden(r#"{"degree":1}"#, r#"{"arcs":[{"a":"0","b":"0.5"}]}"#);
    let (a, _) = run("report", &cfg, &["--jobs", "1"]);
    let (b, _) = run("report", &cfg, &["--jobs", "4"]);
    let (c, _) = run("report", &cfg, &["--jobs", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn seed_flag_overrides_budget() {
    let (_, v) = run("towers", ODOMETER, &["--seed", "42"]);
    assert_eq!(v["provenance"]["seed"], 42);
    assert_eq!(v["config"]["budgets"]["seed"], 42);
}

#[test]
fn intervals_on_request() {
    let (_, v) = run("towers", &golden(r#"{"trivial":true}"#, r#"{"arcs":[{"a":"0","b":"0.5"}]}"#), &["--emit-intervals"]);
    assert_eq!(v["intervals"].as_array().unwrap().len(), 6);
    let (_, v) = run("towers", ODOMETER, &[]);
    assert!(v.get("intervals").is_none());
}
