use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn krein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krein"))
        .args(args)
        .env_remove("KREIN_SEED")
        .output()
        .expect("binary runs")
}

fn fx(name: &str) -> String {
    fixture(name).to_str().unwrap().to_owned()
}

/// Runs with `--machine` and parses stdout.
fn machine(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--machine");
    let out = krein(&all);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    assert_eq!(doc["schema_version"], 1);
    (out.status.code().unwrap(), doc)
}

/// Entries of a serialized matrix as (re, im) pairs, row-major.
fn entries(m: &Value) -> Vec<(f64, f64)> {
    m["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect()
}

fn close(m: &Value, expect: &[f64]) -> bool {
    let got = entries(m);
    got.len() == expect.len()
        && got.iter().zip(expect).all(|(&(re, im), &e)| (re - e).abs() < 1e-10 && im.abs() < 1e-10)
}

fn triple(v: &Value) -> (u64, u64, u64) {
    (v["h_plus"].as_u64().unwrap(), v["h_minus"].as_u64().unwrap(), v["h_zero"].as_u64().unwrap())
}

#[test]
fn indices_of_identity_match_the_space() {
    let (code, doc) = machine(&["indices", "-i", &fx("identity3.json")]);
    assert_eq!(code, 0);
    assert_eq!(triple(&doc["indices"]), (3, 0, 0));
    assert_eq!(doc["space_indices"], serde_json::json!([3, 0]));
}

#[test]
fn indices_of_zero_operator() {
    let (code, doc) = machine(&["indices", "-i", &fx("zero3.json")]);
    assert_eq!(code, 0);
    assert_eq!(triple(&doc["indices"]), (0, 0, 3));
}

#[test]
fn indices_of_running_example() {
    let (code, doc) = machine(&["indices", "-i", &fx("running.json")]);
    assert_eq!(code, 0);
    assert_eq!(triple(&doc["indices"]), (1, 1, 0));
    assert_eq!(doc["space_indices"], serde_json::json!([1, 1]));
    let text = String::from_utf8(krein(&["indices", "-i", &fx("running.json")]).stdout).unwrap();
    assert!(text.contains("h+ = 1") && text.contains("h0 = 0"));
}

#[test]
fn decompose_diagonal_gives_coordinate_bases() {
    let (code, doc) = machine(&["decompose", "-i", &fx("diag_hilbert.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);
    let b = &doc["bases"];
    let abs: Vec<f64> = entries(&b["plus"]).iter().map(|z| z.0.hypot(z.1)).collect();
    assert!(abs.iter().zip([1.0, 0.0, 0.0]).all(|(a, e)| (a - e).abs() < 1e-12));
    let abs: Vec<f64> = entries(&b["minus"]).iter().map(|z| z.0.hypot(z.1)).collect();
    assert!(abs.iter().zip([0.0, 1.0, 0.0]).all(|(a, e)| (a - e).abs() < 1e-12));
    assert!(close(&doc["projections"]["plus"], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    assert!(close(&doc["projections"]["zero"], &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
}

#[test]
fn decompose_zero_operator_has_only_a_kernel() {
    let (code, doc) = machine(&["decompose", "-i", &fx("zero3.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["bases"]["plus"]["cols"], 0);
    assert_eq!(doc["bases"]["minus"]["cols"], 0);
    assert_eq!(doc["bases"]["zero"]["cols"], 3);
}

#[test]
fn decompose_running_example() {
    let (code, doc) = machine(&["decompose", "-i", &fx("running.json")]);
    assert_eq!(code, 0);
    for key in ["i", "ii", "iii", "iv"] {
        assert_eq!(doc["conditions"][key], true, "condition {key}");
    }
    let s = 0.5f64.sqrt();
    let plus = entries(&doc["bases"]["plus"]);
    let sign = plus[0].0.signum();
    assert!((plus[0].0 * sign - s).abs() < 1e-12 && (plus[1].0 * sign - s).abs() < 1e-12);
    let minus = entries(&doc["bases"]["minus"]);
    let sign = minus[0].0.signum();
    assert!((minus[0].0 * sign - s).abs() < 1e-12 && (minus[1].0 * sign + s).abs() < 1e-12);
    assert!(close(&doc["projections"]["plus"], &[0.5, 0.5, 0.5, 0.5]));
    assert!(close(&doc["projections"]["minus"], &[0.5, -0.5, -0.5, 0.5]));
}

#[test]
fn factorize_zero_operator_gives_empty_factor() {
    let (code, doc) = machine(&["factorize", "-i", &fx("zero3.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["factor"]["rows"], 3);
    assert_eq!(doc["factor"]["cols"], 0);
    assert_eq!(doc["passed"], true);
}

#[test]
fn factorize_identity_gives_identity() {
    let (code, doc) = machine(&["factorize", "-i", &fx("identity3.json")]);
    assert_eq!(code, 0);
    assert!(close(&doc["factor"], &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]));
}

#[test]
fn factorize_running_example_writes_verified_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, doc) =
        machine(&["factorize", "-i", &fx("running.json"), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(doc["report"]["residual"].as_f64().unwrap() <= 1e-8);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let space: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("space.json")).unwrap()).unwrap();
    assert_eq!(space["J"]["rows"], 2);
    let factor: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("factor.json")).unwrap()).unwrap();
    assert_eq!(factor, doc["factor"]);
}

#[test]
fn congruent_with_itself() {
    let (code, doc) =
        machine(&["congruent", "-i", &fx("running.json"), "--other", &fx("running.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["congruent"], true);
    assert!(doc["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn definite_and_indefinite_diagonals_are_not_congruent() {
    let (code, doc) =
        machine(&["congruent", "-i", &fx("diag_pp.json"), "--other", &fx("diag_pm.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["congruent"], false);
    assert!(doc.get("x").is_none());
}

#[test]
fn congruence_of_a_transported_pair() {
    // B = diag(1, -1) on Hilbert C^2 and A = X†BX for X = [[2, 1], [0, 3]]
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    std::fs::write(
        &a,
        r#"{"operator": {"rows": 2, "cols": 2, "data": [[4.0, 0.0], [2.0, 0.0], [2.0, 0.0], [-8.0, 0.0]]}}"#,
    )
    .unwrap();
    let (code, doc) =
        machine(&["congruent", "-i", a.to_str().unwrap(), "--other", &fx("diag_pm.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["congruent"], true);
    assert!(doc["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn phillips_running_pair() {
    let (code, doc) = machine(&[
        "phillips",
        "--space",
        &fx("split11.json"),
        "--plus",
        &fx("plus.json"),
        "--minus",
        &fx("minus.json"),
    ]);
    assert_eq!(code, 0);
    assert!(close(&doc["g"], &[0.5]));
}

#[test]
fn phillips_empty_inputs_give_zero_extension() {
    let dir = tempfile::tempdir().unwrap();
    let (code, doc) = machine(&[
        "phillips",
        "--space",
        &fx("split11.json"),
        "--plus",
        &fx("empty.json"),
        "--minus",
        &fx("empty.json"),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(close(&doc["g"], &[0.0]));
    let angle: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("angle.json")).unwrap())
            .unwrap();
    assert_eq!(angle, doc["g"]);
    assert!(dir.path().join("plus.json").exists() && dir.path().join("minus.json").exists());
}

#[test]
fn phillips_incompatible_pair_is_a_precondition_failure() {
    let out = krein(&[
        "phillips",
        "--space",
        &fx("split11.json"),
        "--plus",
        &fx("plus.json"),
        "--minus",
        &fx("minus_skew.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not orthogonal"));
}

#[test]
fn not_selfadjoint_exits_3() {
    let out = krein(&["decompose", "-i", &fx("not_selfadjoint.json")]);
    assert_eq!(out.status.code(), Some(3));
    let (code, doc) = machine(&["indices", "-i", &fx("not_selfadjoint.json")]);
    assert_eq!(code, 3);
    assert_eq!(doc["precondition"], true);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(krein(&["indices", "-i", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(krein(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        krein(&["--tol-rank=-1", "indices", "-i", &fx("zero3.json")]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    for text in [
        "{not json",
        r#"{"operator": {"rows": 2, "cols": 2, "data": [[1.0, 0.0]]}}"#,
        r#"{"operator": {"rows": 1, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0]]}}"#,
        r#"{"operator": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]}, "extra": 1}"#,
        r#"{"space": {"J": {"rows": 1, "cols": 1, "data": [[2.0, 0.0]]}}, "operator": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]}}"#,
        r#"{"space": {"J": {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}}, "operator": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]}}"#,
    ] {
        std::fs::write(&bad, text).unwrap();
        let out = krein(&["indices", "-i", bad.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
}

#[test]
fn file_tolerance_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("small.json");
    // diag(1, 1e-6) with a file rank tolerance that swallows the small entry
    std::fs::write(
        &f,
        r#"{"operator": {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1e-6, 0.0]]},
            "tolerance": {"rank_tol": 1e-4}}"#,
    )
    .unwrap();
    let (_, doc) = machine(&["indices", "-i", f.to_str().unwrap()]);
    assert_eq!(triple(&doc["indices"]), (1, 0, 1));
    let (_, doc) = machine(&["indices", "-i", f.to_str().unwrap(), "--tol-rank", "1e-10"]);
    assert_eq!(triple(&doc["indices"]), (2, 0, 0));
}

#[test]
fn property_suite_passes() {
    let (code, doc) = machine(&["property-suite", "--count", "60", "--seed", "11"]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["failure_count"], 0);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 9);
}

#[test]
fn property_suite_with_no_cases_passes() {
    let (code, doc) = machine(&["property-suite", "--count", "0"]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);
}

#[test]
fn property_suite_reports_an_injected_fault() {
    let (code, doc) = machine(&["property-suite", "--count", "20", "--inject-fault"]);
    assert_eq!(code, 1);
    assert_eq!(doc["passed"], false);
    assert!(doc["failure_count"].as_u64().unwrap() > 0);
}

#[test]
fn property_suite_seed_from_env_matches_flag() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_krein"));
        cmd.args(["property-suite", "--count", "25", "--machine"]).args(extra);
        match env {
            Some(v) => cmd.env("KREIN_SEED", v),
            None => cmd.env_remove("KREIN_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    let from_env = run(Some("123456789"), &[]);
    let from_flag = run(None, &["--seed", "123456789", "--serial"]);
    assert_eq!(from_env, from_flag);
    assert_ne!(from_env, run(Some("5"), &[]));
    let doc: Value = serde_json::from_slice(&from_env).unwrap();
    assert_eq!(doc["seed"], 123456789u64);
}

#[test]
fn fixtures_round_trip_bit_identically() {
    use krein_core::io::{from_json, to_json, MatrixFile, ProblemFile, SpaceFile};

    let dir = std::fs::read_dir(fixture("")).unwrap();
    let mut seen = 0;
    for entry in dir {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let raw: Value = serde_json::from_str(&text).unwrap();
        let again = if raw.get("operator").is_some() {
            let a: ProblemFile = from_json(&text).unwrap();
            let b: ProblemFile = from_json(&to_json(&a)).unwrap();
            to_json(&a) == to_json(&b)
        } else if raw.get("J").is_some() {
            let a: SpaceFile = from_json(&text).unwrap();
            let b: SpaceFile = from_json(&to_json(&a)).unwrap();
            to_json(&a) == to_json(&b)
        } else {
            let a: MatrixFile = from_json(&text).unwrap();
            let m = a.to_matrix().unwrap();
            let b: MatrixFile = from_json(&to_json(&MatrixFile::from_matrix(&m))).unwrap();
            a.data.iter().flatten().map(|x| x.to_bits()).eq(b
                .data
                .iter()
                .flatten()
                .map(|x| x.to_bits()))
        };
        assert!(again, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 10);
}
