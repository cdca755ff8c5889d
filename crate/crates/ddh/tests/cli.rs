use std::process::{Command, Output};

fn ddh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddh")).args(args).output().expect("run ddh")
}

fn stdout(args: &[&str]) -> String {
    let out = ddh(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn theory_curve_has_grid_rows_and_floor() {
    let text = stdout(&["theory", "--mod", "dqpsk", "--case", "I", "--sigma", "1,1", "--rho", "0.3"]);
    assert!(text.starts_with("snr_db,ber_theory,source\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 12);
    let ber: Vec<f64> = rows[..11].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(ber.windows(2).all(|w| w[1] < w[0]), "{ber:?}");
    assert_eq!(rows[11][0], "inf");
    assert_eq!(rows[11][2], "floor");
}

#[test]
fn case_two_floor_row() {
    let text = stdout(&["theory", "--case", "II", "--snr", "30,60"]);
    let floor: f64 = rows(&text).last().unwrap()[1].parse().unwrap();
    assert!((floor / 5e-4 - 1.0).abs() < 0.1, "{floor}");
}

#[test]
fn doppler_flags_override_the_case() {
    let a = stdout(&["theory", "--case", "II", "--snr", "20"]);
    let b = stdout(&["theory", "--case", "I", "--f1", "0.01", "--f2", "0.001", "--snr", "20"]);
    assert_eq!(a, b);
}

#[test]
fn simulation_is_reproducible() {
    let args = ["simulate", "--case", "III", "--mod", "dqpsk", "--snr", "10,20", "--seed", "3", "--min-errors", "50"];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("snr_db,ber_sim,errors,trials,ci_low,ci_high\n"));
    for r in rows(&a) {
        let (ber, lo, hi): (f64, f64, f64) = (r[1].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(lo <= ber && ber <= hi);
        assert!(r[2].parse::<u64>().unwrap() >= 50);
    }
    let c = stdout(&["simulate", "--case", "III", "--mod", "dqpsk", "--snr", "10,20", "--seed", "4", "--min-errors", "50"]);
    assert_ne!(a, c);
}

#[test]
fn noiseless_static_run_is_error_free() {
    let text = stdout(&["simulate", "--f1", "0", "--f2", "0", "--snr", "20", "--noiseless", "--max-bits", "100000"]);
    assert_eq!(rows(&text)[0][2], "0");
}

#[test]
fn power_allocation_json() {
    let text = stdout(&["poweralloc", "--mod", "dqpsk", "--sigma", "10,1"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rho = v["rho_opt"].as_f64().unwrap();
    assert!((rho - 0.12).abs() <= 0.05, "{rho}");
    assert_eq!(v["rho_grid"].as_array().unwrap().len(), v["ber_curve"].as_array().unwrap().len());
}

#[test]
fn artifacts_get_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let status = ddh(&["theory", "--snr", "0:10:20", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 5);
    let manifest = dir.path().join("curve.csv.manifest.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
    assert!(v["command_line"].as_array().unwrap().iter().any(|a| a == "theory"));
    assert!(v["version"].is_string() && v["timestamp"].is_string());
}

#[test]
fn bad_input_fails() {
    for args in [
        &["theory", "--rho", "1.5"][..],
        &["theory", "--mod", "d8psk"],
        &["theory", "--case", "IV"],
        &["theory", "--snr", "10:-5:20"],
        &["theory", "--detector", "coherent"],
        &["floorsweep", "--f", "0.3"],
        &["validate", "--only", "11"],
        &["frobnicate"],
    ] {
        let out = ddh(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty(), "{args:?} should explain");
    }
}

#[test]
fn validate_single_criterion() {
    let text = stdout(&["validate", "--only", "3"]);
    assert!(text.starts_with("criterion  3 PASS"), "{text}");
}
