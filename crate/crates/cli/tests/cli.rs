use std::process::{Command, Output};

fn robinspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robinspec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn disc_row_matches_library() {
    let out = robinspec(&["disc", "--R", "1", "--beta", "10", "--m", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "R,beta,m,u_root,lambda_exact,lambda_asymptotic,residual,config_hash");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let exact = robin_spectra::exact_models::disc_exterior_eigenvalue(1.0, 10.0, 0).unwrap().lambda;
    assert_eq!(row[4].parse::<f64>().unwrap(), exact);
    let asym: f64 = row[5].parse().unwrap();
    let res: f64 = row[6].parse().unwrap();
    assert!((exact - asym - res).abs() < 1e-12);
    assert_eq!(row[7].len(), 16);
}

#[test]
fn circle_too_wide_is_rejected() {
    let out = robinspec(&["curve-check", "--curve", r#"{"family":"circle","radius":1}"#, "--a", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "validation");
    assert!(stdout(&out).contains(",false,false,"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(&cfg, r#"{"schema": 1, "command": "disc", "beta": [5, 10], "m": [0, 1], "R": 2}"#).unwrap();
    let out = robinspec(&["--config", cfg.to_str().unwrap(), "--R", "1", "--output", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.starts_with("1.0000000000000000e0,")));
}

#[test]
fn unknown_keys_and_missing_schema_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for body in [r#"{"schema": 1, "betta": 3}"#, r#"{"command": "disc"}"#, r#"{"schema": 2, "command": "disc"}"#] {
        let cfg = dir.path().join("bad.json");
        std::fs::write(&cfg, body).unwrap();
        let out = robinspec(&["disc", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body}");
    }
}

#[test]
fn invalid_values_exit_2() {
    assert_eq!(robinspec(&["disc", "--beta", "-1"]).status.code(), Some(2));
    assert_eq!(robinspec(&["disc", "--beta", "10,5"]).status.code(), Some(2));
    assert_eq!(robinspec(&["spectrum", "--beta", "10"]).status.code(), Some(2));
    // βR ≤ m: no bound state.
    assert_eq!(robinspec(&["disc", "--beta", "1", "--m", "3"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let out = robinspec(&[
        "spectrum",
        "--curve",
        r#"{"family":"straight"}"#,
        "--beta",
        "5",
        "--n-s",
        "40",
        "--n-u",
        "8",
        "--s-trunc",
        "3",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "bracket",
        "--curve",
        r#"{"family":"line_bump"}"#,
        "--beta",
        "6,8",
        "--n-s",
        "60",
        "--n-u",
        "8",
        "--degree-s",
        "2",
        "--degree-u",
        "3",
        "--s-trunc",
        "6",
        "--k",
        "2",
        "--seed",
        "7",
    ];
    let first = robinspec(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = robinspec(&args);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[5], "true", "lower <= upper in {row}");
    }
}

#[test]
fn sweep_columns() {
    let out = robinspec(&[
        "sweep",
        "--curve",
        r#"{"family":"line_bump"}"#,
        "--beta",
        "6,8,10",
        "--n-s",
        "60",
        "--n-u",
        "8",
        "--degree-s",
        "2",
        "--degree-u",
        "3",
        "--s-trunc",
        "6",
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 3);
    for key in [
        "beta",
        "j",
        "lambda_computed_lower",
        "lambda_computed_upper",
        "predicted_two_term",
        "refined_lower",
        "residual",
        "discrete_flag",
        "mesh_ns",
        "mesh_nu",
        "a",
        "config_hash",
    ] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
    let betas: Vec<f64> = rows.iter().map(|r| r["beta"].as_f64().unwrap()).collect();
    assert_eq!(betas, [6.0, 8.0, 10.0]);
}

#[test]
fn waveguide_straight_threshold() {
    let out = robinspec(&["waveguide", "--beta", "2", "--d", "1", "--n-s", "16", "--n-u", "64", "--s-trunc", "4", "--ends", "neumann", "--k", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').take(4).map(|c| c.parse().unwrap()).collect();
    let (lambda, threshold) = (row[2], row[3]);
    assert!((lambda - threshold).abs() < 1e-3 * threshold.abs(), "{lambda} vs {threshold}");
}

#[test]
fn verify_single_check() {
    let out = robinspec(&["verify", "--checks", "8,12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("id,name,passed,seconds,detail,config_hash"));
    assert_eq!(text.lines().filter(|l| l.contains(",true,")).count(), 2);
}

#[test]
fn workers_variable_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_robinspec")).args(["disc", "--beta", "4"]).env("ROBIN_WORKERS", "2").output().unwrap();
    assert!(out.status.success());
}

#[test]
fn width_rule_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("check.json");
    std::fs::write(&cfg, r#"{"schema": 1, "command": "curve-check", "curve": {"family": "circle", "radius": 1}, "a": "paper", "beta": 10}"#).unwrap();
    let out = robinspec(&["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let a: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((a - 0.3 * 10f64.ln()).abs() < 1e-15);
}
