use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qc-spectra"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(experiment: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(experiment)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--threads", "1"])
        .args(extra)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn malformed_json_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", "{\"experiment\": \"exponents\", \"seed\": 1,");
    let out = run("exponents", &cfg, &tmp.path().join("run"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
}

#[test]
fn unknown_field_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "exponents", "seed": 1, "map": {"kind": "identity"}, "colour": 3}"#);
    assert_eq!(run("exponents", &cfg, &tmp.path().join("run"), &[]).status.code(), Some(2));
}

#[test]
fn map_construction_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 1, "map": {"kind": "spiral", "tau": [-1.0, 0.5]}}"#);
    let out = run("exponents", &cfg, &tmp.path().join("run"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn overlapping_disks_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 1, "system": {"disks": [{"x": -0.1, "r": 0.2}, {"x": 0.1, "r": 0.2}], "a": 2.0}}"#,
    );
    assert_eq!(run("pressure", &cfg, &tmp.path().join("run"), &[]).status.code(), Some(2));
}

#[test]
fn experiment_mismatch_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "solve", "seed": 1, "map": {"kind": "identity"}}"#);
    assert_eq!(run("exponents", &cfg, &tmp.path().join("run"), &[]).status.code(), Some(2));
}

#[test]
fn identity_exponents_all_inside() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 1, "map": {"kind": "identity"}, "k": 0.0}"#);
    let dir = tmp.path().join("run");
    let out = run("exponents", &cfg, &dir, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.join("verdicts.json"));
    assert_eq!(v["report"]["inside_fraction"], json!(1.0));
    assert!(dir.join("traces.csv").exists());
}

#[test]
fn spiral_tau_two_all_inside() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 1, "map": {"kind": "spiral", "tau": [2.0, 0.0]}, "xs": {"start": 0.05, "end": 2.0, "count": 50}}"#,
    );
    let dir = tmp.path().join("run");
    assert!(run("exponents", &cfg, &dir, &[]).status.success());
    let v = read_json(&dir.join("verdicts.json"));
    assert_eq!(v["report"]["inside_fraction"], json!(1.0));
    assert!((v["k"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn middle_thirds_pressure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 1, "system": {"moduli": [0.3333333333333333, 0.3333333333333333]}}"#);
    let dir = tmp.path().join("run");
    assert!(run("pressure", &cfg, &dir, &[]).status.success());
    let v = read_json(&dir.join("pressure.json"));
    let root = v["moran_root"]["dimension"].as_f64().unwrap();
    assert!((root - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
    let phi0 = v["phi_0"][0].as_f64().unwrap();
    let expected = v["phi_0_expected"].as_f64().unwrap();
    assert!((phi0 - expected).abs() < 1e-12);
    assert!((expected - (1.0 - root)).abs() < 1e-15);
}

#[test]
fn set_override_changes_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 1, "map": {"kind": "identity"}}"#);
    let dir = tmp.path().join("run");
    assert!(run("exponents", &cfg, &dir, &["--set", "seed=9"]).status.success());
    let m = read_json(&dir.join("manifest.json"));
    assert_eq!(m["config"]["seed"], json!(9));
    assert_eq!(run("exponents", &cfg, &dir, &["--set", "map=3"]).status.code(), Some(2));
}

#[test]
fn verify_passes_then_catches_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 1, "map": {"kind": "identity"}}"#);
    let dir = tmp.path().join("run");
    let out = run("exponents", &cfg, &dir, &["--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run("exponents", &cfg, &dir, &["--verify"]).status.code(), Some(0));

    let verdicts = dir.join("verdicts.json");
    let mut text = std::fs::read_to_string(&verdicts).unwrap();
    text.push(' ');
    std::fs::write(&verdicts, text).unwrap();
    let out = run("exponents", &cfg, &dir, &["--verify"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verdicts.json"));
}

#[test]
fn manifest_lists_hashed_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 1, "map": {"kind": "identity"}}"#);
    let dir = tmp.path().join("run");
    assert!(run("exponents", &cfg, &dir, &[]).status.success());
    let m = qc_spectra_cli::RunManifest::read(&dir).unwrap();
    assert_eq!(m.experiment, "exponents");
    assert!(m.stale_files(&dir).unwrap().is_empty());
    let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["traces.csv", "verdicts.json"]);
}
