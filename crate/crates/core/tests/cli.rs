use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eternal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eternal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const BASELINE: [&str; 6] = ["--m", "2", "--p", "0.5", "--N", "4"];

fn with<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&BASELINE);
    v.extend_from_slice(extra);
    v
}

#[test]
fn classify_small_k_ends_at_q1() {
    let v = json(&eternal(&with("classify", &["--K", "0.1"])));
    assert_eq!(v["tag"], "ToQ1");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["params"]["sigma"], 1.0);
    assert!(v["final_slope"].is_f64());
}

#[test]
fn alpha_four_means_k_half() {
    let v = json(&eternal(&with("classify", &["--alpha", "4"])));
    assert!((v["K"].as_f64().unwrap() - 0.5).abs() < 1e-14);
    assert_eq!(v["alpha"], 4.0);
}

#[test]
fn find_kstar_critical() {
    let out = eternal(&["find-kstar", "--m", "1.5", "--p", "0.5", "--N", "3", "--tol-k", "1e-8"]);
    let v = json(&out);
    assert!((v["K_star"].as_f64().unwrap() / 0.0625 - 1.0).abs() < 1e-3);
    assert!((v["alpha_star"].as_f64().unwrap() / 9.79796 - 1.0).abs() < 1e-5);
    assert_eq!(v["regime"], "Critical");
}

#[test]
fn flag_errors_exit_two() {
    for args in [
        with("classify", &["--K", "1", "--alpha", "4"]),
        with("classify", &[]),
        with("classify", &["--K", "0.1", "--sigma", "3"]),
        with("classify", &["--K", "-1"]),
        with("classify", &["--K", "0.1", "--x-big", "2"]),
        vec!["classify", "--m", "0.5", "--p", "0.5", "--N", "4", "--K", "1"],
        vec!["find-kstar", "--m", "1.2", "--p", "0.5", "--N", "3"],
        vec!["bogus"],
    ] {
        let out = eternal(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_three() {
    let out = eternal(&with("profile", &["--K", "1e-9"]));
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sigma_flag_accepts_derived_value() {
    let v = json(&eternal(&with("classify", &["--K", "8", "--sigma", "1"])));
    assert_eq!(v["tag"], "ToQ3");
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn profile_files_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = eternal(&with("profile", &["--K", "0.5", "--out", dir.path().to_str().unwrap()]));
        let v = json(&out);
        assert_eq!(v["interface_fit"]["type_label"], "TypeII");
        assert_eq!(v["csv"], "profile.csv");
    }
    for name in ["profile.csv", "profile.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let csv = read(a.path(), "profile.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# m=2 p=0.5 N=4"));
    assert!(lines.next().unwrap().starts_with("# K=0.5 alpha=4"));
    assert!(lines.next().unwrap().starts_with("# xi0="));
    assert_eq!(lines.next(), Some("xi,f"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((first[1] - 1.0).abs() < 1e-6);
}

#[test]
fn sweep_subcritical_confirms_nonexistence() {
    let dir = tempfile::tempdir().unwrap();
    let out = eternal(&["sweep", "--m", "1.2", "--p", "0.5", "--N", "1", "--out", dir.path().to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["nonexistence_confirmed"], true);
    assert_eq!(v["K_grid"].as_array().unwrap().len(), 13);
    let csv = read(dir.path(), "sweep.csv");
    assert_eq!(csv.lines().filter(|l| l.ends_with(",ToQ3")).count(), 13);
    assert!(csv.lines().any(|l| l == "K,tag"));
}

#[test]
fn sweep_supercritical_switches_once() {
    let v = json(&eternal(&with("sweep", &["--k-min", "0.1", "--k-max", "10", "--points", "5"])));
    assert_eq!(v["monotone"], true);
    assert_eq!(v["nonexistence_confirmed"], Value::Null);
    let tags: Vec<&str> = v["K_grid"].as_array().unwrap().iter().map(|e| e[1].as_str().unwrap()).collect();
    assert_eq!(tags, ["ToQ1", "ToQ1", "ToQ1", "ToQ3", "ToQ3"]);
}

#[test]
fn portrait_writes_orbits() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&eternal(&with("portrait", &["--K", "0.1", "--out", dir.path().to_str().unwrap()])));
    let orbits = v["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 26);
    assert_eq!(orbits[0]["from_p0"], true);
    assert_eq!(orbits[0]["tag"], "ToQ1");
    let csv = read(dir.path(), orbits[0]["csv"].as_str().unwrap());
    assert!(csv.lines().any(|l| l == "eta,X,Y"));
    assert!(v["critical_points"].as_array().unwrap().len() >= 4);
}

#[test]
fn traveling_wave_output() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&eternal(&with("tw", &["--K", "0.5", "--out", dir.path().to_str().unwrap()])));
    assert_eq!(v["convection"], 10.0);
    assert_eq!(v["reaction"], 24.0);
    assert_eq!(v["c"], v["beta"]);
    assert!(v["convention"].as_str().unwrap().contains("F(y - c tau)"));
    let csv = read(dir.path(), "tw.csv");
    let last = csv.lines().last().unwrap();
    assert!(last.ends_with(",0"), "{last}");
}

#[test]
fn profile_at_threshold_is_type_one() {
    let v = json(&eternal(&with("profile", &["--kstar"])));
    let fit = &v["interface_fit"];
    assert!((fit["exponent"].as_f64().unwrap() - 1.0).abs() < 0.15);
    let bracket = v["k_star_bracket"].as_array().unwrap();
    assert!(bracket[0].as_f64().unwrap() < bracket[1].as_f64().unwrap());
}
