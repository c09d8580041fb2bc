use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn orbsym(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_orbsym"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn checks<'a>(r: &'a Value, prefix: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
    r["checks"].as_array().unwrap().iter().filter(move |c| c["name"].as_str().unwrap().starts_with(prefix))
}

#[test]
fn full_kepler_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = orbsym(dir.path(), &["full", "--out", out.to_str().unwrap()], r#"{"family":"kepler","mu":1.0}"#);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path(), "report.json");
    assert_eq!(r["schema_version"], "1.0");
    let reduced = r["symmetries"]["reduced"].as_array().unwrap();
    assert_eq!(reduced.len(), 9);
    assert!(reduced.iter().all(|g| g["zero"] == true));
    assert_eq!(r["symmetries"]["rank"], 9);
    assert!(checks(&r, "").all(|c| c["status"] == "pass"));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,r,r_dot,angle,angle_dot"));
    assert!(csv.lines().count() > 100);
}

#[test]
fn non_linearizable_power_law_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbsym(dir.path(), &["reduce"], r#"{"family":"power_law","alpha":-2}"#);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let direct = &r["reductions"][0];
    assert_eq!(direct["system"]["linearizable"], false);
    assert!(direct["system"]["nonlinear_equation"].is_string());
    assert_eq!(r["reductions"][1]["equations"], Value::Null);
}

#[test]
fn radial_fall_skips_reduction_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbsym(dir.path(), &["verify"], r#"{"family":"kepler","initial":{"r":1.0,"angle_dot":0.0}}"#);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let osc: Vec<_> = checks(&r, "verify.oscillator").collect();
    assert_eq!(osc.len(), 2);
    for c in osc {
        assert_eq!(c["status"], "skipped");
        assert!(c["detail"].as_str().unwrap().contains("u2 = 0"));
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbsym(dir.path(), &["reduce"], r#"{"family":"kepler","initial":{"r":"one","angle_dot":1}}"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("initial.r"));
    let o = orbsym(dir.path(), &["reduce"], r#"{"family":"kepler","extra":true}"#);
    assert_eq!(o.status.code(), Some(2));
    let o = orbsym(dir.path(), &["reduce"], r#"{"family":"cone_drag","g":"exp(-t"}"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn loose_tolerance_fails_the_drift_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbsym(dir.path(), &["verify"], r#"{"family":"kepler","tol":1e-3}"#);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(checks(&r, "verify.drift").any(|c| c["status"] == "fail"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"family":"kepler_drag","alpha":0.01}"#;
    let a = orbsym(dir.path(), &["verify"], cfg);
    let b = orbsym(dir.path(), &["verify", "--parallel"], cfg);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = orbsym(dir.path(), &["symmetries", "--seed", "7"], cfg);
    let r: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(r["seed"], 7);
}

#[test]
fn general_micz_records_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbsym(dir.path(), &["verify", "--parallel"], r#"{"family":"micz","lambda":0.5,"nu":0.1}"#);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["disambiguation"]["points"].as_array().unwrap().len(), 3);
    assert_eq!(r["disambiguation"]["verdict"], "b");
}
