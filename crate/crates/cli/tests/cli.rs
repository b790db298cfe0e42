use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn amp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amp")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report JSON on stdout")
}

fn verdict(report: &Value, name: &str) -> bool {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .unwrap_or_else(|| panic!("no verdict {name} in {report}"))["value"]
        .as_bool()
        .unwrap()
}

fn write(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_vec(value).unwrap()).unwrap();
    path
}

fn matrix(rows: &[&[i64]]) -> Value {
    let entries: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    json!({ "rows": rows.len(), "cols": rows[0].len(), "entries": entries })
}

fn vandermonde_setup() -> Value {
    json!({ "k": 1, "m": 2, "n": 4, "Z": matrix(&[&[1, 1, 1, 1], &[1, 2, 3, 4], &[1, 4, 9, 16]]) })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_tnn_verdicts() {
    let dir = TempDir::new().unwrap();
    let id = write(dir.path(), "id.json", &matrix(&[&[1, 0], &[0, 1]]));
    let out = amp(&["check-tnn", s(&id)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(verdict(&report(&out), "isTnn"));

    let neg = write(dir.path(), "neg.json", &matrix(&[&[1, 0, 1], &[0, 1, -1]]));
    let out = amp(&["check-tnn", s(&neg)]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(!verdict(&r, "isTnn"));
    assert_eq!(r["message"], "minor {1,3} = -1");
    assert_eq!(r["result"]["firstViolation"][0], json!([1, 3]));

    let van = write(dir.path(), "van.json", &matrix(&[&[1, 1, 1, 1], &[1, 2, 3, 4]]));
    assert_eq!(amp(&["check-tnn", s(&van)]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(amp(&["check-tnn", s(&bad)]).status.code(), Some(2));
    assert_eq!(amp(&["check-tnn", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(amp(&["check-tnn"]).status.code(), Some(2));
    assert_eq!(amp(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(amp(&["sample", "--k", "3", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn cell_membership_and_sampling() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", &matrix(&[&[1, 0, 0, -1], &[0, 1, 0, 1]]));
    let cell = write(dir.path(), "cell.json", &json!({ "k": 2, "n": 4, "nonbases": [[1, 3], [2, 3], [3, 4]] }));
    let out = amp(&["cell-member", s(&m), s(&cell)]);
    assert_eq!(out.status.code(), Some(0));
    let top = write(dir.path(), "top.json", &json!({ "k": 2, "n": 4, "nonbases": [] }));
    assert_eq!(amp(&["cell-member", s(&m), s(&top)]).status.code(), Some(0));
    let wrong = write(dir.path(), "wrong.json", &json!({ "k": 2, "n": 4, "nonbases": [[1, 2]] }));
    assert_eq!(amp(&["cell-member", s(&m), s(&wrong)]).status.code(), Some(1));

    let out = amp(&["sample", "--k", "2", "--n", "5", "--seed", "9", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"].as_array().unwrap().len(), 3);
    assert_eq!(out.stdout, amp(&["sample", "--k", "2", "--n", "5", "--seed", "9", "--trials", "3"]).stdout);
}

#[test]
fn map_and_embed() {
    let dir = TempDir::new().unwrap();
    let setup = write(dir.path(), "setup.json", &vandermonde_setup());
    let e1 = write(dir.path(), "e1.json", &matrix(&[&[1, 0, 0, 0]]));
    let out = amp(&["map", s(&setup), s(&e1)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["image"]["entries"], json!([["1", "1", "1"]]));

    let out = amp(&["embed", s(&setup), s(&e1)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(verdict(&r, "rankOneProjection"));
    assert_eq!(r["result"]["entries"][0], json!(["1/3", "1/3", "1/3"]));

    let flat = write(dir.path(), "flat.json", &json!({ "k": 1, "m": 1, "n": 3, "Z": matrix(&[&[1, -1, 0], &[0, 1, -1]]) }));
    let ones = write(dir.path(), "ones.json", &matrix(&[&[1, 1, 1]]));
    let out = amp(&["embed", s(&flat), s(&ones)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!verdict(&report(&out), "wellDefined"));
}

#[test]
fn z0_examples() {
    let out = amp(&["z0", "--k", "1", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["kernel"], json!(["1", "-1", "1", "-1"]));

    assert_eq!(amp(&["z0", "--k", "1", "--m", "3"]).status.code(), Some(2));

    let out = amp(&["z0", "--k", "2", "--m", "2", "--precision", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(verdict(&report(&out), "allMinorsPositive"));
}

#[test]
fn fiber_campaign_examples() {
    let out = amp(&["fiber-campaign", "--k", "2", "--m", "1", "--trials", "1", "--trivial"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["counters"]["trivialPairs"], 1);

    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = ["fiber-campaign", "--k", "1", "--m", "2", "--trials", "100", "--seed", "42", "--out"];
    let out = amp(&[&args[..], &[s(&a)]].concat());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["counters"]["accepted"], 100);
    assert!(verdict(&r, "allCertificatesTrue"));
    assert_eq!(r["artifacts"].as_array().unwrap().len(), 4);
    amp(&[&args[..], &[s(&b)]].concat());
    assert_eq!(fs::read(a.join("certificates.json")).unwrap(), fs::read(b.join("certificates.json")).unwrap());

    let certs: Value = serde_json::from_slice(&fs::read(a.join("certificates.json")).unwrap()).unwrap();
    assert!(certs.as_array().unwrap().iter().all(|c| c["certificate"]["verdict"] == true));

    assert_eq!(amp(&["fiber-campaign", "--k", "1", "--m", "2", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn fiber_check_pair() {
    let dir = TempDir::new().unwrap();
    let setup = write(dir.path(), "setup.json", &vandermonde_setup());
    // kernel generator of the setup is (1,-3,3,-1)
    let u = write(dir.path(), "u.json", &matrix(&[&[4, 5, 6, 3]]));
    let v = write(dir.path(), "v.json", &matrix(&[&[5, 2, 9, 2]]));
    let out = amp(&["fiber-check", s(&setup), s(&u), s(&v)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["minors"].as_array().unwrap().len(), 4);

    let other = write(dir.path(), "other.json", &matrix(&[&[1, 1, 1, 1]]));
    let out = amp(&["fiber-check", s(&setup), s(&u), s(&other)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!verdict(&report(&out), "preconditionsHold"));
}

#[test]
fn equivalence_examples() {
    let dir = TempDir::new().unwrap();
    let van = write(dir.path(), "van.json", &vandermonde_setup());
    let out = amp(&["equivalence", s(&van), s(&van)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["C"], matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
    assert_eq!(r["result"]["D_diag"], json!(["1", "1", "1", "1"]));

    let z0_dir = dir.path().join("z0");
    assert_eq!(amp(&["z0", "--k", "1", "--m", "2", "--out", s(&z0_dir)]).status.code(), Some(0));
    let out = amp(&["equivalence", s(&van), s(&z0_dir.join("setup.json")), "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(verdict(&r, "certificateValid"));
    assert_eq!(r["result"]["detC"].as_str().map(|d| !d.starts_with('-')), Some(true));

    let degenerate = write(
        dir.path(),
        "degenerate.json",
        &json!({ "k": 1, "m": 2, "n": 4, "Z": matrix(&[&[1, 1, 1, 1], &[1, 2, 2, 4], &[1, 4, 4, 16]]) }),
    );
    let out = amp(&["equivalence", s(&degenerate), s(&van)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!verdict(&report(&out), "preconditionsHold"));
}

#[test]
fn report_aggregates() {
    let dir = TempDir::new().unwrap();
    let ok = dir.path().join("ok");
    let bad = dir.path().join("bad");
    amp(&["z0", "--k", "1", "--m", "2", "--out", s(&ok)]);
    let neg = write(dir.path(), "neg.json", &matrix(&[&[1, -1]]));
    amp(&["check-tnn", s(&neg), "--out", s(&bad)]);

    let out = amp(&["report", s(&ok.join("report.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let out = amp(&["report", s(&ok.join("report.json")), s(&bad.join("report.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["counters"]["failingReports"], 1);
    assert_eq!(r["counters"]["z0.n"], 4);
}

#[test]
fn log_level_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_amp"))
        .args(["fiber-campaign", "--k", "1", "--m", "1", "--trials", "2"])
        .env("AMP_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fiber campaign"));
}
