use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const THREE_WIRE: &str = "\
# double negation, double Hadamard, identity
qubits 3
gate not 0
gate not 0
gate h 1
gate h 1
gate id 2
measure all
";

fn qclsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stderr.is_empty(), "unexpected stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn failure(out: &Output) -> String {
    assert!(!out.status.success(), "expected failure, got {}", String::from_utf8_lossy(&out.stdout));
    assert!(out.stdout.is_empty());
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("three_wire.qc"), THREE_WIRE).unwrap();
    dir
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_prints_exact_distribution() {
    let dir = workspace();
    assert_eq!(stdout(&qclsim(dir.path(), &["run", "three_wire.qc"])), "000 1.000000\n");
    write(&dir, "h.qc", "qubits 1\ngate h 0\nmeasure all\n");
    assert_eq!(stdout(&qclsim(dir.path(), &["run", "h.qc"])), "0 0.500000\n1 0.500000\n");
    assert_eq!(
        stdout(&qclsim(dir.path(), &["run", "h.qc", "--format", "csv"])),
        "outcome,probability\n0,0.500000\n1,0.500000\n"
    );
}

#[test]
fn run_marginalizes_measured_subset() {
    let dir = workspace();
    write(&dir, "m.qc", "qubits 2\ngate not 1\nmeasure 1\n");
    assert_eq!(stdout(&qclsim(dir.path(), &["run", "m.qc"])), "1 1.000000\n");
}

#[test]
fn run_record_has_full_precision() {
    let dir = workspace();
    write(&dir, "h.qc", "qubits 1\ngate h 0\n");
    let out = stdout(&qclsim(dir.path(), &["run", "h.qc", "--format", "record"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let p = v["distribution"]["0"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 1e-15);
}

#[test]
fn run_missing_file_names_the_path() {
    let dir = workspace();
    let err = failure(&qclsim(dir.path(), &["run", "nope.qc"]));
    assert!(err.contains("nope.qc"), "{err}");
}

#[test]
fn run_malformed_line_reports_position() {
    let dir = workspace();
    write(&dir, "bad.qc", "qubits 2\ngate h 0\ngate cnot 0 0\n");
    let err = failure(&qclsim(dir.path(), &["run", "bad.qc"]));
    assert!(err.contains("bad.qc"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn sample_noiseless_reference_circuit() {
    let dir = workspace();
    let out = stdout(&qclsim(dir.path(), &["sample", "three_wire.qc", "--shots", "1024", "--seed", "7"]));
    assert_eq!(out, "# shots 1024 seed 7\n000 1024\n");
    let out = stdout(&qclsim(dir.path(), &["sample", "three_wire.qc", "--format", "csv"]));
    assert_eq!(out, "outcome,count\n000,1024\n");
}

#[test]
fn sample_defaults_are_echoed() {
    let dir = workspace();
    let out = stdout(&qclsim(dir.path(), &["sample", "three_wire.qc", "--format", "record"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["shots"], 1024);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["counts"]["000"], 1024);
}

#[test]
fn sample_with_noise_keeps_modal_outcome() {
    let dir = workspace();
    let out = stdout(&qclsim(
        dir.path(),
        &["sample", "three_wire.qc", "--seed", "7", "--noise", "bitflip:0.05", "--format", "record"],
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let counts = v["counts"].as_object().unwrap();
    let (modal, _) = counts.iter().max_by_key(|(_, c)| c.as_u64().unwrap()).unwrap();
    assert_eq!(modal, "000");
    assert_eq!(counts.values().map(|c| c.as_u64().unwrap()).sum::<u64>(), 1024);
}

#[test]
fn sample_output_file_is_byte_identical_on_rerun() {
    let dir = workspace();
    let args = |name: &'static str| {
        vec!["sample", "three_wire.qc", "--shots", "5000", "--seed", "11", "--noise", "depolarizing:0.2", "--output", name]
    };
    stdout(&qclsim(dir.path(), &args("a.txt")));
    stdout(&qclsim(dir.path(), &args("b.txt")));
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    let b = fs::read(dir.path().join("b.txt")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn sample_rejects_bad_flags() {
    let dir = workspace();
    failure(&qclsim(dir.path(), &["sample", "three_wire.qc", "--shots", "0"]));
    failure(&qclsim(dir.path(), &["sample", "three_wire.qc", "--noise", "bitflip:2"]));
    failure(&qclsim(dir.path(), &["sample", "three_wire.qc", "--noise", "thermal:0.1"]));
}

#[test]
fn eval_examples() {
    let dir = workspace();
    write(&dir, "not.qcl", "atoms\n  a = |0>\nend\n!a\n");
    assert_eq!(stdout(&qclsim(dir.path(), &["eval", "not.qcl"])), "1.000000\n");

    let h = "(0.7071067811865476, 0, 0.7071067811865476, 0)";
    write(&dir, "and.qcl", &format!("atoms\n  a = {h}\n  b = {h}\nend\na & b\n"));
    assert_eq!(stdout(&qclsim(dir.path(), &["eval", "and.qcl"])), "0.250000\n");

    write(&dir, "or.qcl", &format!("atoms\n  a = {h}\nend\na | !a\n"));
    assert_eq!(stdout(&qclsim(dir.path(), &["eval", "or.qcl"])), "0.750000\n");
}

#[test]
fn eval_binds_circuit_outputs_relative_to_the_formula() {
    let dir = workspace();
    fs::create_dir(dir.path().join("sub")).unwrap();
    write(&dir, "sub/plus.qc", "qubits 1\ngate h 0\n");
    write(&dir, "sub/f.qcl", "atoms\n  a = circuit plus.qc\n  b = |1>\nend\na & b\n");
    assert_eq!(stdout(&qclsim(dir.path(), &["eval", "sub/f.qcl"])), "0.500000\n");
}

#[test]
fn eval_errors() {
    let dir = workspace();
    write(&dir, "unbound.qcl", "atoms\n  a = |0>\nend\na & zed\n");
    let err = failure(&qclsim(dir.path(), &["eval", "unbound.qcl"]));
    assert!(err.contains("zed"), "{err}");
    write(&dir, "syntax.qcl", "a & & b\n");
    let err = failure(&qclsim(dir.path(), &["eval", "syntax.qcl"]));
    assert!(err.contains("line 1"), "{err}");
}

const PSA_INPUT: &str = r#"{
  "state": {"pure": [1, 0]},
  "contexts": [
    {"name": "computational", "vectors": [[1, 0], [0, 1]], "labels": ["0", "1"]},
    {"name": "hadamard", "vectors": [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]], "labels": ["+", "-"]}
  ]
}"#;

#[test]
fn psa_table_reference_intensities() {
    let dir = workspace();
    write(&dir, "psa.json", PSA_INPUT);
    let out = stdout(&qclsim(dir.path(), &["psa-table", "psa.json", "--format", "csv"]));
    assert_eq!(
        out,
        "context,projector,intensity\ncomputational,0,1.000000\ncomputational,1,0.000000\nhadamard,+,0.500000\nhadamard,-,0.500000\n"
    );
    let table = stdout(&qclsim(dir.path(), &["psa-table", "psa.json"]));
    assert!(table.starts_with("context"));
    assert_eq!(table.lines().count(), 5);
}

#[test]
fn psa_table_shared_projector_gets_one_value() {
    // Bell state; both contexts contain |00><00| + |11><11|, split differently elsewhere.
    let dir = workspace();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let input = format!(
        r#"{{
  "state": {{"pure": [{s}, 0, 0, {s}]}},
  "contexts": [
    {{"name": "c1", "projectors": [
      [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,1]],
      [[0,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]],
      [[0,0,0,0],[0,0,0,0],[0,0,1,0],[0,0,0,0]]], "labels": ["shared", "01", "10"]}},
    {{"name": "c2", "projectors": [
      [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,1]],
      [[0,0,0,0],[0,0.5,0.5,0],[0,0.5,0.5,0],[0,0,0,0]],
      [[0,0,0,0],[0,0.5,-0.5,0],[0,-0.5,0.5,0],[0,0,0,0]]], "labels": ["shared", "psi+", "psi-"]}}
  ]
}}"#
    );
    write(&dir, "bell.json", &input);
    let out = stdout(&qclsim(dir.path(), &["psa-table", "bell.json", "--format", "record"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let shared: Vec<f64> = rows
        .iter()
        .filter(|r| r["projector"] == "shared")
        .map(|r| r["intensity"].as_f64().unwrap())
        .collect();
    assert_eq!(shared.len(), 2);
    assert!((shared[0] - shared[1]).abs() < 1e-12);
    assert!((shared[0] - 1.0).abs() < 1e-12);
    for ctx in ["c1", "c2"] {
        let sum: f64 = rows
            .iter()
            .filter(|r| r["context"] == ctx)
            .map(|r| r["intensity"].as_f64().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-10);
    }
}

#[test]
fn psa_table_state_from_circuit() {
    let dir = workspace();
    write(&dir, "plus.qc", "qubits 1\ngate h 0\n");
    write(
        &dir,
        "psa.json",
        r#"{"state": {"circuit": "plus.qc"}, "contexts": [{"name": "z", "vectors": [[1, 0], [0, 1]]}]}"#,
    );
    let out = stdout(&qclsim(dir.path(), &["psa-table", "psa.json", "--format", "csv"]));
    assert_eq!(out, "context,projector,intensity\nz,P0,0.500000\nz,P1,0.500000\n");
}

#[test]
fn psa_table_rejects_incomplete_context() {
    let dir = workspace();
    write(
        &dir,
        "bad.json",
        r#"{"state": {"pure": [1, 0]}, "contexts": [{"name": "half", "vectors": [[1, 0]]}]}"#,
    );
    let err = failure(&qclsim(dir.path(), &["psa-table", "bad.json"]));
    assert!(err.contains("half"), "{err}");
    write(
        &dir,
        "skew.json",
        r#"{"state": {"pure": [1, 0]}, "contexts": [{"name": "skew", "vectors": [[1, 0], [0.6, 0.8]]}]}"#,
    );
    failure(&qclsim(dir.path(), &["psa-table", "skew.json"]));
}

#[test]
fn chsh_presets() {
    let dir = workspace();
    assert_eq!(stdout(&qclsim(dir.path(), &["chsh", "singlet-optimal"])), "2.828427\n");
    let s: f64 = stdout(&qclsim(dir.path(), &["chsh", "product"])).trim().parse().unwrap();
    assert!(s.abs() <= 2.0);
}

#[test]
fn chsh_from_file_and_spectrum_error() {
    let dir = workspace();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let good = format!(
        r#"{{"state": {{"pure": [0, {s}, -{s}, 0]}},
  "a": [[1, 0], [0, -1]], "a_prime": [[0, 1], [1, 0]],
  "b": [[-{s}, -{s}], [-{s}, {s}]], "b_prime": [[-{s}, {s}], [{s}, {s}]]}}"#
    );
    write(&dir, "chsh.json", &good);
    assert_eq!(stdout(&qclsim(dir.path(), &["chsh", "chsh.json"])), "2.828427\n");

    let bad = good.replace(r#""a": [[1, 0], [0, -1]]"#, r#""a": [[0.5, 0], [0, -1]]"#);
    write(&dir, "bad.json", &bad);
    let err = failure(&qclsim(dir.path(), &["chsh", "bad.json"]));
    assert!(err.contains("spectrum") || err.contains("eigenvalue"), "{err}");
}

#[test]
fn every_subcommand_is_deterministic() {
    let dir = workspace();
    write(&dir, "psa.json", PSA_INPUT);
    write(&dir, "f.qcl", "atoms\n  a = circuit three_wire.qc\nend\n!a\n");
    for args in [
        vec!["run", "three_wire.qc", "--noise", "depolarizing:0.1"],
        vec!["sample", "three_wire.qc", "--noise", "bitflip:0.05", "--seed", "3"],
        vec!["eval", "f.qcl"],
        vec!["psa-table", "psa.json"],
        vec!["chsh", "singlet-optimal", "--format", "record"],
    ] {
        let a = stdout(&qclsim(dir.path(), &args));
        let b = stdout(&qclsim(dir.path(), &args));
        assert_eq!(a, b, "{args:?}");
    }
}
