use std::path::Path;
use std::process::{Command, Output};

fn walklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walklab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn inspect_group() {
    let o = walklab(&["inspect", "group", "symmetric(3)"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("order 6"));
    assert!(s.contains("irrep dims {1,1,2}"));
    // Class sizes {1,3,2} in some order.
    let line = s.lines().find(|l| l.starts_with("classes")).unwrap();
    let mut sizes: Vec<usize> =
        line.trim_start_matches("classes {").trim_end_matches('}').split(',').map(|v| v.parse().unwrap()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 2, 3]);
}

#[test]
fn inspect_graph_with_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = walklab(&["inspect", "graph", "complete_power(cyclic(2),2)", "--out", out]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("N 4"));
    assert!(s.contains("lambda 3.3333333333333331e-1"));
    assert!(s.contains("pseudo-Cayley PASS"));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(dir.path().join("graph.json").exists());
}

#[test]
fn inspect_trivial_reps() {
    let o = walklab(&["inspect", "reps", "cyclic(1)"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("has 1 irreps"));
}

#[test]
fn inspect_invalid_spec_exits_2() {
    let o = walklab(&["inspect", "group", "octonions(8)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

const BIAS: &str = r#"{"group":"cyclic(2)","graph":{"kind":"complete_power","r":2},
 "functions":[{"kind":"threshold","set":[1],"t":7},{"kind":"constant","value":0.5}],
 "n":16,"index_sets":[[1,4,9]],"seed":11}"#;

#[test]
fn bias_exact_and_sampled_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bias.json", BIAS);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = walklab(&["bias", "--config", &cfg, "--samples", "4000", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ja = std::fs::read(a.join("results.json")).unwrap();
    assert_eq!(ja, std::fs::read(b.join("results.json")).unwrap());
    assert_eq!(std::fs::read(a.join("results.csv")).unwrap(), std::fs::read(b.join("results.csv")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    let records = v["records"].as_array().unwrap();
    let modes: Vec<&str> = records.iter().map(|r| r["mode"].as_str().unwrap()).collect();
    assert_eq!(modes, ["exact", "sampled", "exact", "sampled"]);
    assert_eq!(records[1]["seed"], 11);
    assert_eq!(records[2]["bias_re"].as_f64(), Some(0.0));
    assert_eq!(v["index_sets"][0]["indices"], serde_json::json!([1, 4, 9]));
}

#[test]
fn bias_refuses_silent_downgrade() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "word.json",
        r#"{"group":"symmetric(3)","graph":{"kind":"complete_power","r":1},
        "functions":[{"kind":"word","indices":[9,1],"target":0}],"n":9}"#,
    );
    let o = walklab(&["bias", "--config", &cfg, "--exact-only"]);
    assert_eq!(o.status.code(), Some(2));
    let o = walklab(&["bias", "--config", &cfg, "--samples", "500"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(",sampled,"));
    assert!(!s.contains(",exact,"));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"group":"cyclic(3)","unknown_key":true}"#);
    assert_eq!(walklab(&["bias", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(walklab(&["verify", "--claims", "T42"]).status.code(), Some(2));
    assert_eq!(walklab(&["bias", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn verify_single_claim_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = walklab(&["verify", "--claims", "T8", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["claim_id"] == "T8"));
    assert!(dir.path().join("report.txt").exists());
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert!(meta["timestamp_unix"].as_u64().unwrap() > 0);
}

#[test]
fn verify_corrupted_bound_exits_1() {
    let o = walklab(&["verify", "--claims", "T1", "--lambda-scale", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL T1"));
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.json", r#"{"group":"cyclic(3)","claims":["T9","T12"],"seed":4}"#);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert!(walklab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    }
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = walklab(&["sweep", "--claim", "T16", "--group", "cyclic(2)", "--r-max", "4", "--n", "12", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "r,lambda,measured,upper_bound,lower_bound_rhs");
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(walklab(&["sweep", "--claim", "T3"]).status.code(), Some(2));
}
