//! End-to-end tests of the `epower` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_epower"));
    c.env_remove("EPOWER_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn epower")
}

fn ok_stdout(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(
        out.status.success(),
        "epower {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"))
}

fn assert_valid(schema: &str, bytes: &[u8]) -> Value {
    let schema_json: Value = serde_json::from_slice(&std::fs::read(schema_path(schema)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema_json).expect("schema compiles");
    let instance: Value = serde_json::from_slice(bytes).expect("output is JSON");
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
    instance
}

#[test]
fn bounds_output_validates_and_matches_examples() {
    let v = assert_valid(
        "bounds",
        &ok_stdout(&["bounds", "--mean-lower", "1024", "1024", "--tail", "9", "9", "1.0"]),
    );
    let mean = v["mean_lower"]["value"].as_f64().unwrap();
    assert!((mean - (9.0 - 1.0 / std::f64::consts::LN_2)).abs() < 1e-9);
    assert!((v["tail"]["value"].as_f64().unwrap() - 0.8646148491744079).abs() < 1e-12);
    let v = assert_valid(
        "bounds",
        &ok_stdout(&["bounds", "--mean-lower", "3", "3", "--optimal-epsilon", "1024", "1024"]),
    );
    assert_eq!(v["mean_lower"]["vacuous"], Value::Bool(true));
}

#[test]
fn scan_reports_threshold() {
    let v = assert_valid("bounds", &ok_stdout(&["bounds", "--scan-3933"]));
    assert_eq!(v["threshold"].as_u64(), Some(3933));
}

#[test]
fn verify_gate_trivial_gates_vanish() {
    for args in [
        [
            "verify-gate",
            "--builtin",
            "swap",
            "--gate-dims",
            "2x2",
            "--restarts",
            "8",
            "--objective",
            "all",
        ],
        [
            "verify-gate",
            "--builtin",
            "identity",
            "--gate-dims",
            "3x4",
            "--restarts",
            "8",
            "--objective",
            "tail2",
        ],
    ] {
        let v = assert_valid("verify_gate", &ok_stdout(&args));
        assert_eq!(v["verdict"], "vanishing");
        assert_eq!(v["sr_floor"].as_u64(), Some(1));
    }
}

#[test]
fn tensor_output_validates() {
    let v = assert_valid("tensor", &ok_stdout(&["tensor", "--state", "w-like", "--rmax", "4"]));
    assert_eq!(v["border_rank_estimate"].as_u64(), Some(2));
    assert_eq!(v["curve"].as_array().unwrap().len(), 4);
}

#[test]
fn certify_output_validates() {
    let args = [
        "certify",
        "--builtin",
        "haar",
        "--gate-dims",
        "2x2",
        "--gate-seed",
        "5",
        "--epsilon",
        "0.2",
    ];
    let v = assert_valid("certify", &ok_stdout(&args));
    assert!(v["value"].as_f64().unwrap() <= v["raw_min"].as_f64().unwrap());
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let cases: [&[&str]; 3] = [
        &[
            "verify-gate",
            "--builtin",
            "haar",
            "--gate-dims",
            "2x3",
            "--restarts",
            "12",
            "--seed",
            "4",
        ],
        &["tensor", "--state", "ghz", "--rmax", "3", "--seed", "2"],
        &[
            "rank-survey",
            "--dims",
            "2x3",
            "--gates",
            "3",
            "--restarts",
            "8",
            "--seed",
            "9",
        ],
    ];
    for args in cases {
        let a = ok_stdout(&[&["--threads", "1"], args].concat());
        let b = ok_stdout(&[&["--threads", "4"], args].concat());
        let c = ok_stdout(args);
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a, c, "{args:?}");
    }
}

#[test]
fn csv_reports_have_headers() {
    let survey = String::from_utf8(ok_stdout(&[
        "rank-survey",
        "--dims",
        "3x4",
        "--gates",
        "1",
        "--restarts",
        "4",
    ]))
    .unwrap();
    assert_eq!(
        survey.lines().next(),
        Some("gate_id,seed,tail_1,tail_2,inferred_sr,generic_sr,match")
    );
    assert_eq!(survey.lines().count(), 2);
    let cuts = String::from_utf8(ok_stdout(&[
        "multipartite",
        "--dims",
        "2x2x2",
        "--gates",
        "1",
        "--restarts",
        "4",
    ]))
    .unwrap();
    assert_eq!(
        cuts.lines().next(),
        Some("gate_id,seed,cut,rows,cols,cut_generic_sr,min_value,is_overall_min")
    );
    assert_eq!(cuts.lines().count(), 4);
}

#[test]
fn gate_files_roundtrip_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let binary = dir.path().join("g.bin");
    let j = json.to_str().unwrap();
    let b = binary.to_str().unwrap();
    ok_stdout(&["gate", "--builtin", "haar", "--dims", "2x3", "--seed", "7", "--out", j]);
    ok_stdout(&[
        "gate",
        "--builtin",
        "haar",
        "--dims",
        "2x3",
        "--seed",
        "7",
        "--out",
        b,
        "--binary",
    ]);
    assert_valid("gate", &std::fs::read(&json).unwrap());
    assert!(std::fs::read(&binary).unwrap().starts_with(b"EPGATE01\0\0\0\0\0\0\0\0"));
    let from_json = ok_stdout(&["verify-gate", j, "--restarts", "6"]);
    let from_binary = ok_stdout(&["verify-gate", b, "--restarts", "6"]);
    assert_eq!(from_json, from_binary);
    let log = std::fs::read_to_string(dir.path().join("g.json.log")).unwrap();
    assert!(log.trim_end().ends_with("exit=0"));
}

#[test]
fn householder_writes_gate_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    let args = [
        "householder",
        "--dims",
        "5x5",
        "--r",
        "2",
        "--verify-restarts",
        "16",
        "--check-restarts",
        "0",
    ];
    let v = assert_valid(
        "householder",
        &ok_stdout(&[&args[..], &["--out", out.to_str().unwrap()]].concat()),
    );
    assert!(v["involution_residual"].as_f64().unwrap() < 1e-10);
    assert_valid("gate", &std::fs::read(&out).unwrap());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["rank-survey", "--dims", "3"]), Some(2));
    assert_eq!(code(&["verify-gate", "/nonexistent/gate.json"]), Some(2));
    assert_eq!(
        code(&["verify-gate", "--builtin", "swap", "--gate-dims", "2x3"]),
        Some(2)
    );
    assert_eq!(code(&["tensor", "--state", "nope"]), Some(2));
    assert_eq!(
        code(&["certify", "--builtin", "haar", "--gate-dims", "2x2", "--epsilon", "0.1"]),
        Some(4)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dims":[2,2],"matrix":[[[1,0],[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]}"#).unwrap();
    assert_eq!(code(&["verify-gate", bad.to_str().unwrap()]), Some(2));
    let truncated = dir.path().join("t.bin");
    std::fs::write(&truncated, b"EPGATE01\0\0\0\0\0\0\0\0\x02\0\0\0").unwrap();
    assert_eq!(code(&["verify-gate", truncated.to_str().unwrap()]), Some(2));
}
