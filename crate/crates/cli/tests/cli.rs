use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn renorm(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renorm"))
        .args(args)
        .env("OUT_DIR", out)
        .env("WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn run_dir(out: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

fn csv_body(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

#[test]
fn tree_counts_table() {
    let out = tempfile::tempdir().unwrap();
    let o = renorm(out.path(), &["trees", "--count", "--max", "8"]);
    assert!(o.status.success());
    let counts: Vec<String> =
        String::from_utf8(o.stdout).unwrap().lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(counts.join(","), "1,1,2,5,14,42,132,429");
}

#[test]
fn omega_of_hand_tree() {
    let out = tempfile::tempdir().unwrap();
    let o = renorm(out.path(), &["omega", "--delta", "0,1,1", "--v", "1,-1,1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["omega1"]["re"], 0.0);
    assert_eq!(v["omega1"]["im"], 1.0);
    let o = renorm(out.path(), &["omega", "--delta", "0,1", "--v", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_zero_scenario_is_reproducible() {
    let out = tempfile::tempdir().unwrap();
    let scn = scenarios().join("zero.json");
    let o = renorm(out.path(), &["verify", "--scenario", scn.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(out.path());
    let scenario: Value = serde_json::from_str(&fs::read_to_string(dir.join("scenario.json")).unwrap()).unwrap();
    let hash = scenario["scenario_hash"].as_str().unwrap().to_string();
    assert!(dir.ends_with(&hash[..16]));
    for name in ["residuals", "spectra", "measures"] {
        let csv = fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap();
        assert!(csv.contains(&format!("# scenario_hash: {hash}")));
        assert!(csv.contains("# seed: 1"));
        let json: Value = serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
        assert_eq!(json["scenario_hash"], hash.as_str());
    }
    let residuals: Value = serde_json::from_str(&fs::read_to_string(dir.join("residuals.json")).unwrap()).unwrap();
    for row in residuals["rows"].as_array().unwrap() {
        assert!(row["residual"].as_f64().unwrap() <= 1e-10);
    }
    assert!(csv_body(&dir.join("residuals.csv")).starts_with("t,hbar,N,residual,slope_window"));

    let first = csv_body(&dir.join("spectra.csv"));
    let o = renorm(out.path(), &["--emit", "csv", "verify", "--scenario", scn.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(csv_body(&dir.join("spectra.csv")), first);
}

#[test]
fn invalid_scenario_exits_with_2() {
    let out = tempfile::tempdir().unwrap();
    let bad = out.path().join("bad.json");
    let text = fs::read_to_string(scenarios().join("zero.json")).unwrap().replace("\"hbar\": [1.0, 0.5, 0.1]", "\"hbar\": []");
    fs::write(&bad, text).unwrap();
    let o = renorm(out.path(), &["spectra", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(report["status"], "invalid");
}

#[test]
fn failed_assertion_exits_with_3() {
    let out = tempfile::tempdir().unwrap();
    let strict = out.path().join("strict.json");
    let text = fs::read_to_string(scenarios().join("control.json"))
        .unwrap()
        .replace("\"control_symbol.json\"", &format!("{:?}", scenarios().join("control_symbol.json")))
        .replace("\"seed\": 7", "\"seed\": 7, \"tolerances\": {\"residual_factor\": 1e-6}, \"measures\": {\"hbar\": [0.05], \"J\": 32, \"quadrature\": 32}");
    fs::write(&strict, text).unwrap();
    let o = renorm(out.path(), &["--emit", "json", "verify", "--scenario", strict.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(out.path());
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.join("error.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "assertion");
    assert!(!report["failures"].as_array().unwrap().is_empty());
    assert!(!dir.join("residuals.csv").exists());
}

#[test]
fn suite_writes_summary_for_every_criterion() {
    let out = tempfile::tempdir().unwrap();
    let scn = scenarios().join("cos_x.json");
    let o = renorm(out.path(), &["suite", "--scenario", scn.to_str().unwrap()]);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(run_dir(out.path()).join("summary.json")).unwrap()).unwrap();
    let criteria = summary["criteria"].as_array().unwrap();
    let ids: Vec<u64> = criteria.iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, (1..=11).collect::<Vec<_>>());
    assert!(criteria.iter().all(|c| c["status"] == "pass" || c["status"] == "fail"));
    assert_eq!(o.status.success(), summary["failed"] == 0);
}

#[test]
fn lindstedt_and_renormalize_artifacts() {
    let out = tempfile::tempdir().unwrap();
    let scn = scenarios().join("zero.json");
    assert!(renorm(out.path(), &["lindstedt", "--scenario", scn.to_str().unwrap()]).status.success());
    assert!(renorm(out.path(), &["renormalize", "--scenario", scn.to_str().unwrap()]).status.success());
    let dir = run_dir(out.path());
    let l: Value = serde_json::from_str(&fs::read_to_string(dir.join("lindstedt.json")).unwrap()).unwrap();
    assert_eq!(l["series"].as_array().unwrap().len(), 4);
    assert!(dir.join("norms.csv").exists() && dir.join("classical.csv").exists() && dir.join("counterterms.json").exists());
}
