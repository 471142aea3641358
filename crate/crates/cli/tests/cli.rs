use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn glocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glocal")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = glocal(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_body(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn basis_projector(dir: &Path, index: usize) -> String {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..4).map(|i| (0..4).map(|j| [if i == index && j == index { 1.0 } else { 0.0 }, 0.0]).collect()).collect();
    let path = dir.join(format!("basis{index}.json"));
    std::fs::write(&path, serde_json::to_string(&rows).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn steady_reports() {
    let r = json(&["steady", "--gamma", "0.5"]);
    assert_eq!(r["steady_state"]["concurrence"], 0.0);
    assert_eq!(r["steady_state"]["matrix"][3][3][0], 1.0);
    assert_eq!(r["parameters"]["n_l"], 0.0);

    let dir = tempfile::tempdir().unwrap();
    let rho2 = basis_projector(dir.path(), 1);
    let r = json(&["steady", "--gamma", "1", "--rho0", &rho2]);
    assert_eq!(r["regime"], "degenerate");
    assert!((r["steady_state"]["concurrence"].as_f64().unwrap() - 0.5).abs() < 1e-10);

    let r = json(&["steady", "--gamma", "0.5", "--n-g", "0.1", "--n-l", "0.2"]);
    assert!(r["kernel_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn evolve_matches_closed_form_at_pure_global() {
    let r = json(&["evolve", "--gamma", "1", "--t", "0.5"]);
    assert!((r["state"]["matrix"][0][0][0].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-9);
    assert!(r["analytic_deviation"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["parameters"]["t"], 0.5);
}

#[test]
fn kraus_reports() {
    let r = json(&["kraus", "--gamma", "0.5", "--n-g", "0.1", "--n-l", "0.2"]);
    assert_eq!(r["map"], "stationary");
    assert!(r["completeness_residual"].as_f64().unwrap() <= 1e-9);
    assert!(r["channel_residual"].as_f64().unwrap() <= 1e-9);

    let r = json(&["kraus", "--gamma", "1"]);
    assert_eq!(r["count"], 4);
    assert!(r["channel_residual"].as_f64().unwrap() <= 1e-8);

    let r = json(&["kraus", "--t", "0"]);
    assert_eq!(r["count"], 1);

    let r = json(&["kraus", "--gamma", "1", "--t", "1.5", "--analytic"]);
    assert!(r["channel_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(glocal(&["kraus", "--gamma", "0.5", "--t", "1", "--analytic"]).status.code(), Some(1));
}

#[test]
fn choi_reports() {
    let r = json(&["choi", "--gamma", "0.3", "--n-g", "0.8", "--n-l", "1.5", "--t", "0.2"]);
    assert!((r["trace"].as_f64().unwrap() - 4.0).abs() < 1e-10);
    assert!(r["min_eigenvalue"].as_f64().unwrap() >= -1e-9);
    assert_eq!(r["choi"].as_array().unwrap().len(), 16);
}

#[test]
fn epower_modes() {
    let r = json(&["epower", "--gamma", "1", "--n-l", "0.5"]);
    assert_eq!(r["entangling_power"]["value"], 0.25);
    let r = json(&["epower", "--gamma", "1", "--n-l", "1e8", "--mode", "limit"]);
    assert!((r["entangling_power"]["value"].as_f64().unwrap() - 7.0 / 12.0).abs() < 1e-8);
    let r = json(&["epower", "--gamma", "0.9", "--n-l", "0.5", "--mode", "mc", "--samples", "20000", "--seed", "3"]);
    assert_eq!(r["entangling_power"]["mode"], "monte_carlo");
    assert_eq!(r["parameters"]["seed"], 3);
    assert_eq!(glocal(&["epower", "--gamma", "0.5", "--mode", "limit"]).status.code(), Some(1));
}

#[test]
fn two_axis_scan_is_ordered_bounded_and_stable() {
    let args = ["scan", "--axis", "gamma:0:0.999:21", "--axis", "n_l:0:3:11"];
    let first = glocal(&args);
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("# n_g=0\n") && text.contains("# mode=exact\n"));
    let rows = csv_body(&text);
    assert_eq!(rows[0], ["gamma", "n_g", "n_l", "value", "unclamped", "std_error", "region"]);
    assert_eq!(rows.len(), 1 + 21 * 11);
    for (k, row) in rows[1..].iter().enumerate() {
        let gamma: f64 = row[0].parse().unwrap();
        let n_l: f64 = row[2].parse().unwrap();
        assert!((gamma - 0.999 * (k / 11) as f64 / 20.0).abs() < 1e-15);
        assert!((n_l - 3.0 * (k % 11) as f64 / 10.0).abs() < 1e-15);
        let value: f64 = row[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&value));
        assert_eq!(row[6], if value > 0.0 { "1" } else { "0" });
    }
    assert_eq!(glocal(&args).stdout, text.into_bytes());
}

#[test]
fn unit_gamma_scans() {
    let args = ["scan", "--gamma", "1", "--axis", "n_l:0:100:11"];
    assert_eq!(glocal(&args).status.code(), Some(1));

    let limit = String::from_utf8(glocal(&[&args[..], &["--mode", "limit"]].concat()).stdout).unwrap();
    let values: Vec<f64> = csv_body(&limit)[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(values.len(), 11);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
    assert!(values[10] < 7.0 / 12.0 && values[10] > 0.58);

    let exact = String::from_utf8(glocal(&[&args[..], &["--mode", "exact"]].concat()).stdout).unwrap();
    assert!(csv_body(&exact)[1..].iter().all(|r| r[3] == "0.25"));
}

#[test]
fn scan_writes_to_out_and_rejects_bad_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let status = glocal(&["scan", "--axis", "n_l:0:1:3", "--out", out.to_str().unwrap()]).status;
    assert!(status.success());
    assert_eq!(csv_body(&std::fs::read_to_string(&out).unwrap()).len(), 4);

    let missing = dir.path().join("no/such/dir/scan.csv");
    assert_eq!(glocal(&["scan", "--axis", "n_l:0:1:3", "--out", missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(glocal(&["scan", "--axis", "n_l:0:1:1"]).status.code(), Some(1));
}

#[test]
fn optimal_curve() {
    let text = String::from_utf8(glocal(&["optimal-curve", "--gammas", "0.1,0.3,0.6,0.8,0.9,0.95"]).stdout).unwrap();
    let rows = csv_body(&text);
    assert_eq!(rows[0], ["gamma", "n_g", "n_l_star", "e_star", "positive"]);
    for row in &rows[1..4] {
        assert_eq!((row[3].as_str(), row[4].as_str()), ("0", "0"));
    }
    let n_star: Vec<f64> = rows[4..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(n_star[0] < n_star[1] && n_star[1] < n_star[2]);

    let count_positive = |n_g: &str| {
        let text = String::from_utf8(glocal(&["optimal-curve", "--n-g", n_g, "--gammas", "0.8,0.9,0.95,0.99"]).stdout).unwrap();
        csv_body(&text)[1..].iter().filter(|r| r[4] == "1").count()
    };
    assert!(count_positive("0.1") < count_positive("0"));
    assert_eq!(glocal(&["optimal-curve", "--gammas", "1"]).status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let rho2 = basis_projector(dir.path(), 1);
    let config = dir.path().join("run.json");
    std::fs::write(&config, format!(r#"{{"gamma": 1.0, "n_l": 0.3, "rho0": "{rho2}"}}"#)).unwrap();
    let c = config.to_str().unwrap();
    let r = json(&["steady", "--config", c]);
    assert_eq!(r["parameters"]["n_l"], 0.3);
    assert!((r["steady_state"]["concurrence"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    let r = json(&["steady", "--config", c, "--gamma", "0.5"]);
    assert_eq!(r["regime"], "unique");
}

#[test]
fn invalid_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[[[2,0],[0,0]],[[0,0],[0,0]]]").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["steady", "--gamma", "1.5"],
        vec!["steady", "--n-l", "-1"],
        vec!["evolve", "--t", "-1"],
        vec!["steady", "--rho0", bad.to_str().unwrap()],
        vec!["steady", "--rho0", "/nonexistent/rho.json"],
        vec!["steady", "--config", "/nonexistent/config.json"],
        vec!["frobnicate"],
        vec!["epower", "--mode", "sometimes"],
    ];
    for args in cases {
        assert_eq!(glocal(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn selftest_passes() {
    let out = glocal(&["selftest", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let log = String::from_utf8(out.stderr).unwrap();
    assert_eq!(log.lines().filter(|l| l.starts_with("PASS ")).count(), 6);
}
