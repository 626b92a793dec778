use std::path::PathBuf;
use std::process::{Command, Output};

use rfj_core::StableIncrements;
use serde_json::Value;

fn rfj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfj")).args(args).env_remove("RFJ_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

const SMALL: &[&str] = &["--trials", "300", "--grid", "512"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run_owned(args: &[String]) -> Output {
    rfj(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn coeffs_of_a_basis_element() {
    let o = rfj(&["coeffs", "--f", "p1", "--n", "4", "--gamma", "0", "--delta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,a"));
    for (n, line) in lines.enumerate() {
        let a: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        let want = if n == 1 { 1.0 } else { 0.0 };
        assert!((a - want).abs() < 1e-12, "a_{n} = {a}");
    }
}

#[test]
fn coeffs_json_matches_schema() {
    let o = rfj(&["coeffs", "--f", "runge", "--n", "12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("coefficients.schema.json"), &doc);
    assert_eq!(doc["coefficients"].as_array().unwrap().len(), 13);
    let again: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(doc, again);
}

#[test]
fn usage_errors_exit_2() {
    let o = rfj(&["coeffs", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(rfj(&["coeffs", "--f", "nope", "--n", "4"]).status.code(), Some(2));
    assert_eq!(rfj(&["coeffs", "--f", "exp", "--n", "4", "--gamma", "-2"]).status.code(), Some(2));
    assert_eq!(rfj(&["converge-mean", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(rfj(&["check-theta"]).status.code(), Some(2));
    assert_eq!(rfj(&["check-theta", "--family", "cesaro1", "--matrix", "x.json"]).status.code(), Some(2));
    assert_eq!(rfj(&["converge-mean", "--n-schedule", "4,2"]).status.code(), Some(2));
}

#[test]
fn mean_convergence_gate() {
    let o = rfj(&["converge-mean", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mean convergence requires alpha in (1, 2]"), "{}", stderr(&o));
}

#[test]
fn cesaro_gate() {
    let o = run_owned(&with(&["cesaro", "--alpha", "1.5"], SMALL));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha = 1"));
}

#[test]
fn reruns_are_byte_identical() {
    let run = |workers: &str| rfj(&["converge-mean", "--trials", "300", "--grid", "512", "--seed", "11", "--workers", workers]);
    let (a, b, c) = (run("1"), run("3"), run("1"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("statistic,n,y,x,eps,estimate,se,trials,seed\n"));
}

#[test]
fn seed_from_environment() {
    let base = ["converge-mean", "--trials", "50", "--grid", "256", "-q"];
    let plain = rfj(&base);
    let env = Command::new(env!("CARGO_BIN_EXE_rfj")).args(base).env("RFJ_SEED", "5").output().unwrap();
    let flag = Command::new(env!("CARGO_BIN_EXE_rfj"))
        .args(base)
        .args(["--seed", "5"])
        .env("RFJ_SEED", "9")
        .output()
        .unwrap();
    assert_ne!(plain.stdout, env.stdout);
    assert_eq!(env.stdout, flag.stdout);
    assert!(stdout(&plain).contains(",20240917\n"));
}

#[test]
fn reports_match_schema() {
    let validator = schema("report.schema.json");
    for args in [
        with(&["converge-mean", "--format", "json"], SMALL),
        with(&["cesaro", "--format", "json", "--n-schedule", "8,16"], SMALL),
        with(&["cesaro", "--format", "json", "--family", "cesaro2", "--n-schedule", "8,16"], SMALL),
        with(&["weak-continuity", "--format", "json", "--y", "0,0.5"], SMALL),
        with(&["tail-bound", "--format", "json", "--trials", "2000"], &[]),
    ] {
        let o = run_owned(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_valid(&validator, &doc);
        assert!(doc.get("wall_time").is_none());
    }
}

#[test]
fn out_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let mut args = with(&["weak-continuity"], SMALL);
    args.extend(["--out".into(), path.to_string_lossy().into_owned()]);
    let o = run_owned(&args);
    assert_eq!(o.status.code(), Some(0));
    let summary = stdout(&o);
    assert!(summary.contains("continuity-non-increasing[eps=0.1]"), "{summary}");
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("continuity-probability")).count(), 3);
}

#[test]
fn tail_bound_slope_near_minus_alpha() {
    let o = rfj(&["tail-bound", "--alpha", "1", "--f", "runge", "--eps", "1,2,4,8", "--trials", "20000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let slope = doc["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == "tail-slope").unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((slope + 1.0).abs() < 0.3, "slope {slope}");
    // the moment bound does not exist at alpha = 1
    assert!(!stdout(&o).contains("lemma2-rhs"));
}

#[test]
fn check_theta_families() {
    let o = rfj(&["check-theta", "--family", "cesaro1", "--n-max", "128", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("conditions.schema.json"), &doc);
    assert_eq!(doc["xi1"], true);
    assert!(stderr(&o).contains("Xi1 (T1,T2,T3): pass"));

    let o = rfj(&["check-theta", "--family", "identity", "-q"]);
    let text = stdout(&o);
    let t2 = text.lines().find(|l| l.starts_with("T2,")).unwrap();
    assert!(t2.starts_with("T2,false,128,"), "{t2}");
    assert!(t2.contains("1.280000e2 at n = 128"));
}

#[test]
fn check_theta_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<Vec<f64>> = (1..=40).map(|n| (0..n).map(|k| (n - k) as f64 / n as f64).collect()).collect();
    let bare = dir.path().join("c1.json");
    std::fs::write(&bare, serde_json::to_string(&rows).unwrap()).unwrap();
    let tagged = dir.path().join("tagged.json");
    let doc = serde_json::json!({"family": {"kind": "custom", "label": "mine"}, "rows": rows});
    assert_valid(&schema("summation-matrix.schema.json"), &doc);
    std::fs::write(&tagged, doc.to_string()).unwrap();

    for (path, label) in [(&bare, "c1"), (&tagged, "mine")] {
        let o = rfj(&["check-theta", "--matrix", path.to_str().unwrap(), "--format", "json", "-q"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(r["family"]["label"], label);
        assert_eq!(r["n_max"], 40);
        assert_eq!(r["xi1"], true);
    }

    let ragged = dir.path().join("ragged.json");
    std::fs::write(&ragged, "[[1.0], [1.0]]").unwrap();
    assert_eq!(rfj(&["check-theta", "--matrix", ragged.to_str().unwrap()]).status.code(), Some(2));
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(rfj(&["check-theta", "--matrix", garbage.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(rfj(&["check-theta", "--matrix", "/nonexistent/file.json"]).status.code(), Some(1));
}

#[test]
fn increment_dumps() {
    let o = rfj(&["increments", "--alpha", "1.5", "--grid", "64", "--trial", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("t,dx\n"));
    assert_eq!(csv.lines().count(), 65);

    let bin = rfj(&["increments", "--alpha", "1.5", "--grid", "64", "--trial", "3", "--format", "binary"]);
    let inc = StableIncrements::<f64>::read_binary(&bin.stdout[..]).unwrap();
    assert_eq!(inc.grid.m, 64);
    let seed = inc.seed_info.unwrap();
    assert_eq!((seed.master_seed, seed.stream), (20_240_917, 3));
    let from_csv: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(from_csv, inc.dx);
}
