use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainctl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_verdicts() {
    let r1 = spec("heis4_r1.spec");
    let out = run(&["--spec", path_str(&r1), "--json", "check"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["controllable"], true);
    assert_eq!(v["closure_dimension"], 15);

    let r2 = spec("heis4_r2.spec");
    let out = run(&["--spec", path_str(&r2), "--json", "check"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["controllable"], false);
}

#[test]
fn malformed_spec_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "n = 4\ncouplings = 1, oops, 1\nactuator = 1\n").unwrap();
    let out = run(&["--spec", path_str(&bad), "check"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("couplings"));

    let out = run(&["--spec", path_str(&dir.path().join("missing.spec")), "check"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["bogus"])), 1);
    assert_eq!(code(&run(&["check"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn prooftrace_exit_codes() {
    let out = run(&["--spec", path_str(&spec("heis4_r1.spec")), "--json", "prooftrace"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["closure_dimension"], 15);
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-8);
    assert!(!v["conventions"].as_object().unwrap().is_empty());

    let out = run(&["--spec", path_str(&spec("heis4_r2.spec")), "prooftrace"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ω_r = 0"));

    let out = run(&["--spec", path_str(&spec("heis3.spec")), "prooftrace"]);
    assert_eq!(code(&out), 2);

    let out = run(&["--spec", path_str(&spec("heis6_k1.spec")), "--json", "prooftrace"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["k"], 1);
}

#[test]
fn synth_then_verify_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = spec("heis4_r1.spec");
    let out = run(&[
        "--spec",
        path_str(&r1),
        "--out",
        path_str(dir.path()),
        "synth",
        "--gate",
        "CNOT",
        "--k",
        "20",
        "--restarts",
        "50",
    ]);
    assert!(matches!(code(&out), 0 | 3), "{}", String::from_utf8_lossy(&out.stderr));

    let result: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("CNOT.json")).unwrap()).unwrap();
    let error = result["error"].as_f64().unwrap();
    assert!(error <= 1e-3, "CNOT error {error}");
    assert_eq!(result["kind"], "synthesis_result");
    assert_eq!(result["sequence"].as_array().unwrap().len(), 20);
    for key in ["spec_hash", "frobenius", "evaluations", "seed", "target"] {
        assert!(result.get(key).is_some(), "missing {key}");
    }

    let seq = dir.path().join("CNOT.seq.csv");
    let out = run(&[
        "--spec",
        path_str(&r1),
        "--json",
        "verify",
        "--sequence",
        path_str(&seq),
        "--gate",
        "CNOT",
    ]);
    let v = stdout_json(&out);
    assert!((v["error"].as_f64().unwrap() - error).abs() <= 1e-12);
    assert_eq!(v["sidecar_hash_matches"], true);

    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(table.starts_with("row,CNOT\nerror,"));
    assert_eq!(table.lines().count(), 23);

    let svg = dir.path().join("restarts.svg");
    let out = run(&["--out", path_str(&svg), "plot", path_str(&dir.path().join("CNOT.json"))]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::metadata(&svg).unwrap().len() > 0);
}

#[test]
fn synth_small_identity_and_preconditions() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = spec("heis4_r1.spec");
    let base = ["--spec", path_str(&r1), "--out", path_str(dir.path()), "synth"];

    let out = run(&[&base[..], &["--gate", "II", "--k", "2", "--restarts", "4"]].concat());
    assert!(matches!(code(&out), 0 | 3));
    assert!(dir.path().join("II.json").exists());

    let out = run(&[&base[..], &["--gate", "II", "--restarts", "0"]].concat());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("restarts"));

    let out = run(&[&base[..], &["--gate", "SWAP"]].concat());
    assert_eq!(code(&out), 1);
}

#[test]
fn table1_verbs() {
    let out = run(&["--json", "table1", "validate"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["max_error"], 6.02407e-05);
    assert_eq!(v["max_error_gate"], "II");

    let out = run(&["table1", "replay", "--coupling", "0.7", "--f-on", "2.5"]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "--json",
        "table1",
        "scan",
        "--couplings",
        "1",
        "--f-on",
        "-1.5:-0.5:0.5",
        "--top",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["f_on"], -1.0);
}

#[test]
fn plot_residual_report_and_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("trace.json");
    let out = run(&[
        "--spec",
        path_str(&spec("heis4_r1.spec")),
        "--out",
        path_str(&report),
        "prooftrace",
    ]);
    assert_eq!(code(&out), 0);
    let n_ids = serde_json::from_str::<Value>(&std::fs::read_to_string(&report).unwrap()).unwrap()["residuals"]
        .as_object()
        .unwrap()
        .len();

    let svg = dir.path().join("bars.svg");
    assert_eq!(code(&run(&["--out", path_str(&svg), "plot", path_str(&report)])), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches(r#"class="bar""#).count(), n_ids);

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(code(&run(&["--out", path_str(&svg), "plot", path_str(&empty)])), 1);
    let other = dir.path().join("other.json");
    std::fs::write(&other, r#"{"kind":"mystery"}"#).unwrap();
    assert_eq!(code(&run(&["--out", path_str(&svg), "plot", path_str(&other)])), 1);
}
