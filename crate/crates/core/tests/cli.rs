use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn boostcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boostcap"))
        .args(args)
        .env_remove("BOOSTCAP_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn lambdas_point() {
    let out = boostcap(&["lambdas", "--gamma", "1", "--zeta", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let l1 = v["estimate"]["lambda"]["l1"].as_f64().unwrap();
    assert!((l1 - 0.999_584_87).abs() < 1e-8, "{l1}");
}

#[test]
fn velocity_is_converted_to_rapidity() {
    let a = json(&boostcap(&["lambdas", "--inv-gamma", "0.2", "--velocity", "-0.5"]));
    let b = json(&boostcap(&["lambdas", "--inv-gamma", "0.2", "--zeta", &(-0.5f64).atanh().to_string()]));
    assert_eq!(a["estimate"]["lambda"], b["estimate"]["lambda"]);
    assert!((a["frame"]["zeta"].as_f64().unwrap() - (-0.5f64).atanh()).abs() < 1e-15);
}

#[test]
fn capacity_point() {
    let v = json(&boostcap(&["capacity", "--inv-gamma", "0.3"]));
    let r = &v["report"];
    assert!(r["hashing"].as_f64().unwrap() > 0.0);
    assert_eq!(r["cerf_zero_capacity"], false);
    assert!(r["classical"].as_f64().unwrap() >= r["hashing"].as_f64().unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&boostcap(&["lambdas"])), 2);
    assert_eq!(code(&boostcap(&["lambdas", "--gamma", "1", "--velocity", "1.5"])), 2);
    assert_eq!(code(&boostcap(&["lambdas", "--gamma", "1", "--inv-gamma", "1"])), 2);
    assert_eq!(code(&boostcap(&["lambdas", "--gamma", "-1"])), 2);
    assert_eq!(
        code(&boostcap(&["sweep-gamma", "--start", "0.5", "--stop", "0.1", "--steps", "3"])),
        2
    );
    assert_eq!(code(&boostcap(&["--jobs", "0", "capacity", "--gamma", "1"])), 2);
    assert_eq!(code(&boostcap(&["no-such-command"])), 2);
}

#[test]
fn two_step_sweep_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let js = dir.path().join("s.json");
    let svg = dir.path().join("s.svg");
    let out = boostcap(&[
        "sweep-gamma", "--start", "0.1", "--stop", "0.3", "--steps", "2",
        "--out", csv.to_str().unwrap(),
        "--json", js.to_str().unwrap(),
        "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("inv_gamma,lambda1,"));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["spec"]["steps"], 2);
    assert_eq!(manifest["data_files"].as_array().unwrap().len(), 3);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["manifest"]["spec"], manifest["spec"]);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

fn sweep_csv(dir: &Path, name: &str, jobs: &str) -> Vec<u8> {
    let path = dir.join(name);
    let out = boostcap(&[
        "--jobs", jobs, "sweep-zeta", "--start", "-2", "--stop", "0", "--steps", "9",
        "--inv-gamma", "0.05", "--columns", "hashing_raw,cerf",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    std::fs::read(path).unwrap()
}

#[test]
fn sweep_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = sweep_csv(dir.path(), "a.csv", "1");
    let b = sweep_csv(dir.path(), "b.csv", "3");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("zeta,hashing_raw,cerf,status\n"));
    // Zero hashing rate at rest, positive once boosted far enough.
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(last[1].parse::<f64>().unwrap() < 0.0);
    assert!(first[1].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn sweep_to_stdout_uses_17_digits() {
    let out = boostcap(&[
        "sweep-gamma", "--start", "0.2", "--stop", "0.4", "--steps", "2", "--columns", "lambda1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let cell = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = cell.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{cell}");
}

#[test]
fn non_convergence_is_flagged_and_exits_3() {
    let out = boostcap(&[
        "--max-subdivisions", "1", "sweep-gamma", "--start", "0.1", "--stop", "0.2", "--steps", "2",
    ]);
    assert_eq!(code(&out), 3);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("failed:").count(), 2);
    assert!(!text.contains("NaN"));
    assert_eq!(code(&boostcap(&["--max-subdivisions", "1", "lambdas", "--gamma", "1"])), 3);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "rel_tol = soon\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_boostcap"))
        .args(["lambdas", "--gamma", "1"])
        .env("BOOSTCAP_CONFIG", &bad)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let tight = dir.path().join("tight.conf");
    std::fs::write(&tight, "max_subdivisions = 1\n").unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["--config", tight.to_str().unwrap()];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["lambdas", "--gamma", "1"]);
        code(&boostcap(&args))
    };
    assert_eq!(run(&[]), 3);
    assert_eq!(run(&["--max-subdivisions", "2000"]), 0);
}

#[test]
fn thresholds() {
    let v = json(&boostcap(&["threshold-gamma", "--zeta", "0"]));
    let x = v["inv_gamma"].as_f64().unwrap();
    assert!((x / 0.054_813_389_49 - 1.0).abs() < 2e-4, "{x}");
    assert_eq!(code(&boostcap(&["threshold-gamma", "--zeta", "-1"])), 1);
    let v = json(&boostcap(&["threshold-boost", "--inv-gamma", "0.05"]));
    assert!((v["zeta"].as_f64().unwrap() + 0.052_379_4).abs() < 2e-4);
    assert_eq!(code(&boostcap(&["threshold-boost", "--inv-gamma", "0.3"])), 2);
}

#[test]
fn wigner_check() {
    let out = boostcap(&["wigner-check", "--zeta", "-1.2", "--theta", "2.0", "--phi", "0.7", "--omega", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["decomposition"]["wigner_angle"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn verify_fast_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = boostcap(&["verify", "fast", "--out", path.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    // The truncated spread expansion cannot reach its stated accuracy; every
    // other check must pass.
    assert_eq!(failed, ["series_accuracy", "series_monotone"]);
    assert_eq!(code(&out), 1);
    assert!(report["seconds"].as_f64().unwrap() < 60.0);
}

#[test]
fn verify_negative_control() {
    let out = boostcap(&["verify", "fast", "--inject-lambda2-sign-error"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    let keystone = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "pauli_identification")
        .unwrap();
    assert_eq!(keystone["passed"], false);
}
