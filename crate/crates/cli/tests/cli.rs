use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn cmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = cmlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn code(args: &[&str]) -> i32 {
    cmlab(args).status.code().expect("exit code")
}

#[test]
fn build_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("t37.json");
    let s = spec.to_str().unwrap();
    assert_eq!(
        code(&["build-tpq", "--p", "3", "--q", "7", "--output", s]),
        0
    );
    let r = ok_json(&["classify", "--spec", s, "--no-timestamp"]);
    assert_eq!(r["command"], "classify");
    assert_eq!(r["result"]["type"], "T(3,7)");
    assert_eq!(r["result"]["valuation_type"], "((2,1),(5,2))");
}

#[test]
fn emitted_spec_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(
        code(&[
            "build-family",
            "--p",
            "3",
            "--q",
            "6",
            "--lambda",
            "2",
            "-o",
            a.to_str().unwrap()
        ]),
        0
    );
    let first: cmlab::singlab::SingularitySpec =
        serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    std::fs::write(&b, serde_json::to_string(&first).unwrap()).unwrap();
    let second: cmlab::singlab::SingularitySpec =
        serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(first, second);
    let r = ok_json(&["analyze", "--spec", b.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(r["result"]["branches"], 3);
}

#[test]
fn five_axes_violate_condition_a() {
    let r = ok_json(&["tame", "--spec", data("five_axes.json").to_str().unwrap()]);
    assert_eq!(r["result"]["cond_a"], false);
    assert_eq!(r["result"]["verdict"], "criterion-violated");
    assert_eq!(r["result"]["d_lambda0"]["total"], 5);
}

#[test]
fn cusp_par_is_zero() {
    let spec = data("cusp.json");
    let r = ok_json(&[
        "par",
        "--spec",
        spec.to_str().unwrap(),
        "--n",
        "1",
        "--primes",
        "2,3,5",
    ]);
    assert_eq!(r["result"]["par"], 0);
    assert_eq!(r["provenance"]["exhaustive"], true);
    assert_eq!(r["provenance"]["primes"], serde_json::json!([2, 3, 5]));
}

#[test]
fn analyze_cusp() {
    let r = ok_json(&["analyze", "--spec", data("cusp.json").to_str().unwrap()]);
    let res = &r["result"];
    assert_eq!(res["conductor_exponent"], 2);
    assert_eq!(res["delta"], 1);
    assert_eq!(res["dim_lambda"], 7);
    assert_eq!(res["type"], "unrecognized");
    assert_eq!(res["overrings"][0]["name"], "lambda0");
}

#[test]
fn findim_par_line_counts() {
    let r = ok_json(&[
        "findim-par",
        "--vars",
        "2",
        "--nilpotency",
        "2",
        "--d",
        "2",
        "--primes",
        "2,3,5",
    ]);
    let d2 = &r["result"]["per_d"][0];
    assert_eq!(d2["counts"]["2"][0], 3);
    assert_eq!(d2["counts"]["3"][0], 4);
    assert_eq!(d2["counts"]["5"][0], 6);
    assert_eq!(r["result"]["par"], 1);
}

#[test]
fn semicont_from_builder() {
    let r = ok_json(&[
        "semicont",
        "--p",
        "3",
        "--q",
        "7",
        "--lambdas",
        "0,1",
        "--primes",
        "2,3",
    ]);
    assert_eq!(r["result"]["verdict"], "PASS");
    assert_eq!(r["result"]["members"].as_array().unwrap().len(), 2);
}

#[test]
fn b_reports_every_overring() {
    let r = ok_json(&[
        "b",
        "--spec",
        data("cusp.json").to_str().unwrap(),
        "--primes",
        "2,3",
    ]);
    assert_eq!(r["result"]["breakdown"].as_array().unwrap().len(), 3);
    assert_eq!(r["result"]["b"], 0);
}

#[test]
fn reports_are_deterministic() {
    let spec = data("cusp.json");
    let args = [
        "orbits",
        "--spec",
        spec.to_str().unwrap(),
        "--d",
        "1",
        "--prime",
        "3",
        "--seed",
        "7",
        "--no-timestamp",
    ];
    let a = cmlab(&args).stdout;
    let b = cmlab(&args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["provenance"]["seed"], 7);
    assert!(v["provenance"].get("timestamp").is_none());
    let with_ts: Value = serde_json::from_slice(&cmlab(&args[..9]).stdout).unwrap();
    assert!(with_ts["provenance"]["timestamp"].is_u64());
}

#[test]
fn dense_refines_diagonal_to_full_flag() {
    let r = ok_json(&[
        "dense",
        "--input",
        data("dense_diagonal.json").to_str().unwrap(),
    ]);
    let res = &r["result"];
    assert_eq!(res["is_dense"], false);
    assert_eq!(res["subalgebra_dim"], 2);
    assert_eq!(res["refined_flag"]["dims"], serde_json::json!([[2, 1, 0]]));
    assert_eq!(res["refined_flag_algebra_dim"], 3);
    assert_eq!(res["dense_in_refined_flag"], true);
}

#[test]
fn normalize_reports_certificate() {
    let r = ok_json(&[
        "normalize",
        "--input",
        data("normalize_dense.json").to_str().unwrap(),
    ]);
    let res = &r["result"];
    assert_eq!(res["verified"], true);
    assert_eq!((res["q"].as_u64(), res["r"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["classify", "--spec", "/nonexistent/spec.json"]), 1);
    assert_eq!(
        code(&[
            "par",
            "--spec",
            data("cusp.json").to_str().unwrap(),
            "--primes",
            "2,4"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "par",
            "--spec",
            data("cusp.json").to_str().unwrap(),
            "--primes",
            "3,3"
        ]),
        1
    );
    assert_eq!(code(&["build-tpq", "--p", "3", "--q", "5"]), 1);
    assert_eq!(
        code(&["tame", "--spec", data("cusp_short.json").to_str().unwrap()]),
        2
    );
    assert_eq!(
        code(&[
            "normalize",
            "--input",
            data("normalize_scalars.json").to_str().unwrap()
        ]),
        3
    );
    assert_eq!(
        code(&[
            "findim-par",
            "--vars",
            "2",
            "--nilpotency",
            "3",
            "--budget",
            "2"
        ]),
        4
    );
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        r#"{"field":{"char":5,"degree":1},"branches":1,"truncation":8,"generators":{},"extra":1}"#,
    )
    .unwrap();
    assert_eq!(code(&["classify", "--spec", p.to_str().unwrap()]), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&["par"]), 1);
    assert_eq!(code(&["par", "--spec", "x.json", "--budget", "0"]), 1);
    assert_eq!(code(&["--help"]), 0);
}
