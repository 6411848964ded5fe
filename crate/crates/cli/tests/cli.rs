use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn geoharnack(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoharnack"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = geoharnack(&["run", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_and_invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = geoharnack(&["run", "--config", bad.to_str().unwrap()], &dir.path().join("a"));
    assert_eq!(out.status.code(), Some(2));
    let neg = dir.path().join("neg.json");
    fs::write(&neg, r#"{"operation": "kernel", "target": "j", "tolerance": -1}"#).unwrap();
    let out = geoharnack(&["run", "--config", neg.to_str().unwrap()], &dir.path().join("b"));
    assert_eq!(out.status.code(), Some(2));
    let out = geoharnack(&["kernel", "j", "--d", "4"], &dir.path().join("c"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recurrent_green_kernel_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = geoharnack(&["kernel", "g", "--family", "stable", "--alpha", "1", "--d", "1", "--r", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn kernel_j_writes_one_row_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = geoharnack(&["kernel", "j", "--family", "geometric-stable", "--alpha", "1", "--d", "2", "--r", "1e-3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("geometric-stable_j_d2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("r,value,quad_err,asymptote,ratio\n"));

    let s = summary(dir.path());
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["status"], "pass");
    assert_eq!(s["config"]["d"], 2);
    assert!(s["input_hash"].as_str().unwrap().starts_with("sha256:"));
    let files = s["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        let bytes = fs::read(dir.path().join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
        let digest = hex::encode(Sha256::digest(&bytes));
        assert_eq!(f["sha256"].as_str().unwrap(), digest);
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "exit", "--family", "geometric-stable", "--d", "2", "-n", "400", "--dt-scale", "1e-2", "--seed", "7"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut two = args.to_vec();
    two.extend(["--threads", "2"]);
    assert_eq!(geoharnack(&one, &a).status.code(), Some(0));
    assert_eq!(geoharnack(&two, &b).status.code(), Some(0));
    for name in ["exits.csv", "estimates.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    // The manifests agree too; only the echoed thread count differs.
    assert_eq!(summary(&a)["files"], summary(&b)["files"]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"operation": "simulate", "target": "exit", "family": {"name": "stable", "alpha": 1.0}, "d": 1, "mc": {"n": 300, "dt_scale": 0.01, "seed": 3}}"#).unwrap();
    let out_dir = dir.path().join("o");
    let out = geoharnack(&["run", "--config", cfg.to_str().unwrap(), "--seed", "11"], &out_dir);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let s = summary(&out_dir);
    assert_eq!(s["seed"], 11);
    assert_eq!(s["config"]["family"]["name"], "stable");
    assert_eq!(s["operation"], "simulate exit");
}

#[test]
fn verify_asymptotics_for_cauchy_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = geoharnack(&["verify", "asymptotics", "--family", "stable", "--alpha", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("stable_levy_asymptotic_ratio.csv").exists());
    assert!(dir.path().join("plot_stable_levy_asymptotic_ratio.py").exists());
    let s = summary(dir.path());
    assert!(s["verdicts"].as_array().unwrap().iter().all(|v| v["status"] == "pass"));
}

#[test]
fn inconclusive_transience_exits_zero_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = geoharnack(&["transience", "--family", "stable", "--alpha", "1", "--d", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let s = summary(dir.path());
    let status = s["verdicts"][0]["status"].as_str().unwrap();
    assert!(status == "pass" || (status == "inconclusive" && !s["warnings"].as_array().unwrap().is_empty()));
}
