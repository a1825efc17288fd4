use std::process::Command;

use serde_json::Value;
use shareval_cli::expr::parse_expression;
use shareval_cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("shareval").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn call_json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = call(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

/// Every number other than schema_version is carried as a string.
fn assert_no_bare_numbers(v: &Value, key: &str) {
    match v {
        Value::Number(_) => assert_eq!(key, "schema_version", "bare number under {key}"),
        Value::Array(a) => a.iter().for_each(|x| assert_no_bare_numbers(x, key)),
        Value::Object(m) => m.iter().for_each(|(k, x)| assert_no_bare_numbers(x, k)),
        _ => {}
    }
}

#[test]
fn omitted_value_of_rational_example() {
    let (code, out, _) =
        call(&["analyze", "--function", "2/(1-w)", "--pair", "euler", "--lambda", "-2", "--value", "0", "--domain", "punctured"]);
    assert_eq!(code, 0);
    assert!(out.contains("value 0: shared CM (omitted by both)"), "{out}");
}

#[test]
fn verify_plane_family_member() {
    let (code, out, _) = call(&["families", "verify", "--id", "cm_plane_4_2", "--params", "a=1,p=0,n=2,C=1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("pass cm_plane_4_2"), "{out}");
}

#[test]
fn polynomial_does_not_share_three() {
    let (code, out, _) = call(&["analyze", "--function", "z^2+1", "--pair", "derivative", "--value", "3", "--domain", "plane"]);
    assert_eq!(code, 0);
    assert!(out.contains("value 3: not shared"));
}

#[test]
fn json_report_round_trips() {
    let f = "(48w^2+32w+3)/(16w(2w+1))";
    let (code, v) = call_json(&["analyze", "--function", f, "--pair", "euler", "--lambda", "1", "--value", "1", "--domain", "sphere", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], Value::from(1));
    assert_no_bare_numbers(&v, "");
    let echoed = v["query"]["function"].as_str().unwrap();
    assert_eq!(parse_expression(echoed).unwrap().value, parse_expression(f).unwrap().value);
    let r = &v["results"][0];
    assert_eq!(r["verdict"]["mode"], "mixed_IM");
    assert_eq!(r["multiplicity_pairs"], serde_json::json!([["1", "1"], ["1", "2"]]));
}

#[test]
fn reports_are_stable() {
    let args = ["families", "list", "--json"];
    assert_eq!(call(&args).1, call(&args).1);
    let args = ["search", "--task", "two-values", "--values", "0,1,-1", "--grid", "integer:1", "--json"];
    let (code, a, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(a, call(&args).1);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_no_bare_numbers(&v, "");
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = call(&["analyze", "--function", "z^2 + (w", "--value", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("column"), "{err}");
    assert_eq!(call(&["analyze", "--function", "sqrt(2) z + sqrt(3)", "--value", "1"]).0, 1);
    assert_eq!(call(&["analyze", "--function", "z", "--pair", "euler", "--value", "1"]).0, 1);
    assert_eq!(call(&["analyze", "--function", "z", "--pair", "euler", "--lambda", "0", "--value", "1"]).0, 1);
    assert_eq!(call(&["analyze", "--function", "7", "--value", "1"]).0, 1);
    assert_eq!(call(&["families", "verify", "--id", "no_such_family"]).0, 1);
    assert_eq!(call(&["search", "--task", "question9"]).0, 1);
    assert_eq!(call(&["frobnicate"]).0, 1);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn grid_cap_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("shareval.conf");
    std::fs::write(&cfg, "# tiny cap\ncap = 10\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, _, err) = call(&["--config", cfg, "search", "--task", "two-values", "--grid", "integer:1"]);
    assert_eq!(code, 1);
    assert!(err.contains("cap"), "{err}");
    // the flag wins over the file
    let (code, _, _) = call(&["--config", cfg, "search", "--task", "two-values", "--grid", "integer:1", "--cap", "100000"]);
    assert_eq!(code, 0);
    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(call(&["--config", bad.to_str().unwrap(), "families", "list"]).0, 1);
}

#[test]
fn theorem_ids_are_verifiable() {
    let (code, out, _) = call(&["families", "verify", "--id", "sphere_cm_iff", "--fuzz", "40", "--seed", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("pass sphere_cm_iff: 40 cases"));
}

#[test]
fn oracle_compare_agrees_on_example() {
    let (code, out, _) = call(&[
        "oracle", "compare", "--function", "(48w^2+32w+3)/(16w(2w+1))", "--pair", "euler", "--lambda", "1", "--value", "1",
        "--value", "0", "--domain", "sphere",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("value 1: exact shared mixed_IM, numeric mixed_IM -> agree"), "{out}");
}

#[test]
fn search_resume_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.jsonl");
    let ck = ck.to_str().unwrap();
    let base = ["search", "--task", "question3", "--shard-size", "100", "--checkpoint", ck, "--json"];
    let (code, first, _) = call(&base);
    assert_eq!(code, 0);
    let mut resumed = base.to_vec();
    resumed.push("--resume");
    let (code, second, _) = call(&resumed);
    assert_eq!(code, 0);
    assert_eq!(first, second);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_shareval");
    let ok = Command::new(bin).args(["analyze", "--function", "z^3", "--value", "0"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("value 0: shared"));
    let bad = Command::new(bin).args(["analyze", "--function", "z^", "--value", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
