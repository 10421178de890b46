use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ergokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergokit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const BELL: &str = r#"{"dims":[2,2],"re":[0,0,0,0, 0,0.5,0.5,0, 0,0.5,0.5,0, 0,0,0,0]}"#;

/// Gibbs state of H = diag(0,1) ⊗ 1 + 1 ⊗ diag(0,1) at beta = 1.
fn thermal_json() -> String {
    let z = 1.0 + (-1.0f64).exp();
    let p = [1.0 / z, (-1.0f64).exp() / z];
    let d = [p[0] * p[0], p[0] * p[1], p[1] * p[0], p[1] * p[1]];
    format!(
        r#"{{"dims":[2,2],"re":[{},0,0,0, 0,{},0,0, 0,0,{},0, 0,0,0,{}]}}"#,
        d[0], d[1], d[2], d[3]
    )
}

#[test]
fn analyze_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "bell.json", BELL);
    let out = ergokit(&["analyze", "--state", &state]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((v["ergotropy"]["ergotropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let mi = v["correlations"]["mutual_information"].as_f64().unwrap();
    assert!((mi - 2.0 * 2f64.ln()).abs() < 1e-12);
    assert!((v["correlations"]["discord"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-6);
}

#[test]
fn analyze_thermal_product_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "thermal.json", &thermal_json());
    let out = ergokit(&["analyze", "--state", &state]);
    assert!(out.status.success());
    let v = json(&out);
    for key in ["ergotropy", "bound_ergotropy"] {
        assert!(v["ergotropy"][key].as_f64().unwrap().abs() < 1e-10, "{key}");
    }
    for key in ["mutual_information", "relative_entropy_passive_to_product", "discord"] {
        assert!(v["correlations"][key].as_f64().unwrap().abs() < 1e-10, "{key}");
    }
    assert!((v["correlations"]["beta"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn analyze_with_hamiltonian_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "bell.json", BELL);
    let h = write(
        dir.path(),
        "h.json",
        r#"{"local":[{"dims":[2],"re":[0,0,0,2]},{"dims":[2],"re":[0,0,0,2]}]}"#,
    );
    let out = ergokit(&["analyze", "--state", &state, "--hamiltonian", &h]);
    assert!(out.status.success());
    assert!((json(&out)["ergotropy"]["ergotropy"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(ergokit(&["analyze", "--state", &bad]).status.code(), Some(2));

    let nonherm = write(dir.path(), "nh.json", r#"{"dims":[2],"re":[0.5,0.3,0,0.5]}"#);
    let out = ergokit(&["analyze", "--state", &nonherm, "--hamiltonian", "qubit"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Hermitian"));

    assert_eq!(ergokit(&["analyze", "--state", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(ergokit(&["sweep", "--c-grid", "0.5,1.5"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_schema_and_landmarks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = ergokit(&["sweep", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "c,beta_e,ergotropy,bound_ergotropy,total_ergotropy,mutual_info_over_beta,local_beta"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3 * 201);

    let landmark = rows.iter().find(|r| r[0] == 0.75 && r[1] == 0.01).unwrap();
    assert!(landmark[2] <= 1e-3 && landmark[5] <= 1e-3);
    let ground = rows.iter().find(|r| r[0] == 1.0 && r[1] == 10.0).unwrap();
    assert!((ground[4] - ground[5]).abs() <= 1e-4);
    for r in &rows {
        assert!(r[4] <= r[5] + 1e-9, "row {r:?}");
    }
    // Ordered by beta_e blocks, c ascending inside each block.
    for block in rows.chunks(201) {
        assert!(block.windows(2).all(|w| w[0][1] == w[1][1] && w[0][0] < w[1][0]));
    }
}

#[test]
fn sweep_json_and_custom_grid() {
    let out = ergokit(&["sweep", "--beta-e", "1", "--c-grid", "0:1:0.25", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 5);
    assert_eq!(v[0]["mutual_info_over_beta"], Value::Null);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let one = Command::new(env!("CARGO_BIN_EXE_ergokit"))
        .args(["sweep", "--c-grid", "0:1:0.05"])
        .env("ERGOKIT_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_ergokit"))
        .args(["sweep", "--c-grid", "0:1:0.05"])
        .env("ERGOKIT_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_ergokit")).args(["sweep"]).env("ERGOKIT_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

fn simulate_rows(args: &[&str]) -> Vec<Vec<f64>> {
    let out = ergokit(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,trace_distance_to_ss,c,purity");
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn simulate_dark_state_and_ground_state() {
    let dark = simulate_rows(&["simulate", "--initial", "psi-minus", "--t-final", "10"]);
    assert!(dark.iter().all(|r| r[1] <= 1e-9));

    let ground = simulate_rows(&["simulate", "--initial", "gg"]);
    assert!(ground.last().unwrap()[1] <= 1e-6);
    assert!(ground.iter().all(|r| (r[2] - 1.0).abs() <= 1e-7));
}

#[test]
fn simulate_rejects_large_step() {
    let out = ergokit(&["simulate", "--dt", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time step too large"));
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let out = ergokit(&["verify", "--seeds", "20"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 6);

    let out = ergokit(&["verify", "--seeds", "4", "--seed", "7", "--inject-fault", "general_state_identity"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["first_failure"]["seed"], 7);
    assert_eq!(v["first_failure"]["check"], "general_state_identity");
}

#[test]
fn verify_single_seed_is_fast() {
    let start = std::time::Instant::now();
    assert!(ergokit(&["verify", "--seeds", "1"]).status.success());
    assert!(start.elapsed().as_secs_f64() < 1.0 || cfg!(debug_assertions));
}

#[test]
fn power_report_and_passive_input() {
    for tau in ["0.5", "1", "2"] {
        let out = ergokit(&["power", "--tau", tau]);
        assert!(out.status.success());
        let v = json(&out);
        assert!(v["avg_power"].as_f64().unwrap() <= v["power_bound"].as_f64().unwrap());
        assert_eq!(v["holds"], Value::Bool(true));
    }

    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "thermal.json", &thermal_json());
    let out = ergokit(&["power", "--state", &state]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("passive"));
}
