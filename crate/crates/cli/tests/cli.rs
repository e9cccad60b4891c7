use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shell-rhs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV written with `#` header lines.
fn rows(path: PathBuf) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn free_shell_has_unit_s_matrix() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("free.ini"), "[potential]\nv0 = 0\n").unwrap();
    ok(
        dir.path(),
        &["--config", "free.ini", "smatrix", "--points", "200", "--e-max", "100"],
    );
    let table = rows(dir.path().join("out/smatrix.csv"));
    assert_eq!(table.len(), 200);
    for row in table {
        assert!((row[3] - 1.0).abs() < 1e-12 && row[4].abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn default_shell_is_unimodular_and_lists_golden_poles() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["smatrix", "--poles", "--e-max", "100"]);
    let worst = rows(dir.path().join("out/smatrix.csv"))
        .iter()
        .map(|r| (r[3] - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10);
    let poles = json(dir.path().join("out/poles.json"));
    let list = poles["result"]["poles"].as_array().unwrap();
    assert_eq!(poles["result"]["winding"], 2);
    assert_eq!(list.len(), 2);
    let bits = |v: &Value| v.as_f64().unwrap().to_bits();
    assert_eq!(bits(&list[0]["kRe"]), 0x3ff867a25565b833);
    assert_eq!(bits(&list[0]["kIm"]), 0xbfdaef4f1f230b13);
    assert_eq!(bits(&list[1]["kRe"]), 0x4008a2be058e7b3e);
    assert_eq!(bits(&list[1]["kIm"]), 0xbfedbfd116dbe3c5);
}

#[test]
fn hardy_verdicts_for_a_negative_half_line_bump() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["hardy", "--side", "negative"]);
    let rep = json(dir.path().join("out/hardy.json"));
    assert_eq!(rep["result"]["verdicts"]["upper"], "PASS");
    assert_eq!(rep["result"]["verdicts"]["lower"], "FAIL");
    assert_eq!(rep["schemaVersion"], 1);
}

#[test]
fn semigroup_verdicts_follow_the_sign_of_time() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["semigroup", "--t-list", "-1,0,1"]);
    let rep = json(dir.path().join("out/semigroup.json"));
    let verdicts: Vec<&str> = rep["result"]["report"]["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(verdicts, ["FAIL", "PASS", "PASS"]);
}

#[test]
fn seeded_suite_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "5", "--out", "a", "semigroup", "--suite", "4"]);
    ok(dir.path(), &["--seed", "5", "--out", "b", "semigroup", "--suite", "4"]);
    ok(dir.path(), &["--seed", "6", "--out", "c", "semigroup", "--suite", "4"]);
    let read = |d: &str| std::fs::read(dir.path().join(d).join("semigroup_suite.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    assert_eq!(
        json(dir.path().join("a/semigroup_suite.json"))["result"]["asymmetricFraction"],
        1.0
    );
}

#[test]
fn bounds_ray_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--out", "a", "bounds", "ray"]);
    ok(dir.path(), &["--out", "b", "--threads", "1", "bounds", "ray"]);
    for name in ["growth.csv", "growth.json"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    for row in rows(dir.path().join("a/growth.csv")) {
        assert_eq!(row[5], row[3] / row[4]);
    }
}

#[test]
fn kernel_audit_reports_finite_constant() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["bounds", "kernel"]);
    let rep = json(dir.path().join("out/bounds.json"));
    let c = rep["result"]["cEmpirical"].as_f64().unwrap();
    assert!(c.is_finite() && c > 0.0);
    assert_eq!(rep["result"]["boundRespected"], true);
}

#[test]
fn transform_suite_is_unitary() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["transform", "--sign", "minus"]);
    let rep = json(dir.path().join("out/transform.json"));
    let rows = rep["result"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert!(row["parsevalDefect"].as_f64().unwrap() < 1e-4, "{row}");
    }
    let energy = std::fs::read_to_string(dir.path().join("out/transform_0.csv")).unwrap();
    assert!(energy.contains("# domainTag: positive-energy-halfline"));
}

#[test]
fn every_file_carries_version_and_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.ini"), "[potential]\nv0 = 2\n").unwrap();
    ok(dir.path(), &["--out", "one", "wavefunction", "--energy", "2"]);
    ok(
        dir.path(),
        &["--config", "a.ini", "--out", "two", "wavefunction", "--energy", "2"],
    );
    let head = |d: &str| {
        let text = std::fs::read_to_string(dir.path().join(d).join("wavefunction.csv")).unwrap();
        text.lines().take(3).map(str::to_owned).collect::<Vec<_>>()
    };
    let (one, two) = (head("one"), head("two"));
    assert!(one[0].starts_with("# shell-rhs-cli ") && one[0].ends_with(env!("CARGO_PKG_VERSION")));
    assert!(one[2].starts_with("# config-sha256: "));
    assert_ne!(one[2], two[2]);
    let table = rows(dir.path().join("one/wavefunction.csv"));
    assert_eq!(table[0][0], 0.0);
    assert_eq!(table[0][3], 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.ini"), "[potential]\nwidth = 1\n").unwrap();
    let code = |args: &[&str]| run(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--config", "bad.ini", "smatrix"]), 1);
    assert_eq!(code(&["--config", "missing.ini", "smatrix"]), 1);
    assert_eq!(code(&["smatrix", "--e-min", "-1"]), 1);
    assert_eq!(
        code(&["--out", "ray", "bounds", "ray", "--angle", "-1.0", "--s-values", "1,2"]),
        0
    );
    assert_eq!(code(&["--out", "ray", "bounds", "ray", "--angle", "0.5"]), 1);
    let out = run(dir.path(), &["poles", "--im-max", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidInput"));
    assert_eq!(code(&["--help"]), 0);
}
