use std::process::{Command, Output};

fn triphoton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triphoton"))
        .args(args)
        .env_remove("TRIPHOTON_WORKERS")
        .output()
        .expect("run triphoton")
}

fn stdout(args: &[&str]) -> String {
    let out = triphoton(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn mercedes_state_amplitudes() {
    let text = stdout(&["state", "--geometry", "120,120", "--sz", "0", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let target = 1.0 / 6f64.sqrt();
    let equal = rows.iter().filter(|r| (r["re"].as_f64().unwrap() - target).abs() < 1e-11).count();
    assert_eq!(equal, 6);
    assert_eq!(rows[0]["basis"], "+++");
    assert_eq!(rows[0]["re"].as_f64().unwrap(), 0.0);
}

#[test]
fn csv_and_json_carry_the_same_fields() {
    let csv = stdout(&["strength", "table"]);
    assert!(csv.starts_with("state,n_trials,source\n"));
    let json: serde_json::Value = serde_json::from_str(&stdout(&["strength", "table", "--format", "json"])).unwrap();
    for (row, obj) in csv_rows(&csv).iter().zip(json.as_array().unwrap()) {
        assert_eq!(obj["state"], row[0].as_str());
        assert_eq!(obj["n_trials"].as_f64().unwrap(), row[1].parse::<f64>().unwrap());
        assert_eq!(obj["source"], row[2].as_str());
    }
}

#[test]
fn strength_table_rows() {
    let rows = csv_rows(&stdout(&["strength", "table"]));
    let n: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(rows[0][0], "GHZ");
    assert!((n[0] - 32.0).abs() <= 1.0 && rows[0][2] == "computed");
    assert!((n[1] - 161.0).abs() <= 1.0 && rows[1][2] == "computed");
    assert_eq!((n[2], rows[2][2].as_str()), (200.0, "reference"));
}

#[test]
fn mermin_sweep_crosses_between_85_and_86() {
    let rows = csv_rows(&stdout(&["mermin", "sweep", "--delta", "0:180:1"]));
    assert_eq!(rows.len(), 181);
    let v = |d: usize| rows[d][2].parse::<f64>().unwrap();
    assert!(v(85) < 0.0 && v(86) > 0.0);
    for d in 0..=180 {
        assert_eq!((v(d) > 0.0), d >= 86, "δ={d}");
    }
}

#[test]
fn strength_sweep_flags_large_counts() {
    let rows = csv_rows(&stdout(&["strength", "sweep", "--delta", "80:180:20"]));
    assert_eq!(rows[0][3], "inf");
    assert_eq!(rows[0][4], "true");
    let last = rows.last().unwrap();
    assert_eq!(last[0], "180");
    assert_eq!(last[4], "false");
}

#[test]
fn tangle_scan_output() {
    let rows = csv_rows(&stdout(&["tangle-scan", "--step", "10"]));
    assert_eq!(rows.len(), 35 * 35);
    let best = rows.iter().max_by(|a, b| a[2].parse::<f64>().unwrap().total_cmp(&b[2].parse().unwrap())).unwrap();
    assert_eq!((best[0].as_str(), best[1].as_str()), ("120", "120"));
}

#[test]
fn extremize_reports_minima() {
    let rows = csv_rows(&stdout(&["mermin", "extremize", "--state", "mercedes", "--starts", "32", "--seed", "5"]));
    let best: f64 = rows[0][1].parse().unwrap();
    assert!((best + 3.046).abs() < 1e-3);
    assert!(rows.iter().any(|r| (r[1].parse::<f64>().unwrap() + 3.0).abs() < 1e-9));
    let ghz = csv_rows(&stdout(&["mermin", "extremize", "--state", "ghz", "--starts", "16"]));
    assert!((ghz[0][1].parse::<f64>().unwrap() + 4.0).abs() < 1e-9);
}

#[test]
fn simulate_from_delta() {
    let rows = csv_rows(&stdout(&["simulate", "--delta", "180", "--runs", "4", "--seed", "1"]));
    assert_eq!(rows.len(), 4);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        assert_eq!(r[1], "1");
        assert_eq!(r[2], "33");
        assert_eq!(r[3], "false");
    }
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("triphoton-cli-test-{}.csv", std::process::id()));
    let out = triphoton(&["strength", "table", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text, stdout(&["strength", "table"]));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| triphoton(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["state", "--geometry", "30,40"]), 3);
    assert_eq!(code(&["state", "--geometry", "400,40"]), 2);
    assert_eq!(code(&["state", "--geometry", "120,120", "--sz", "2"]), 2);
    assert_eq!(code(&["tangle-scan", "--step", "0"]), 2);
    assert_eq!(code(&["tangle-scan", "--step", "-1"]), 2);
    assert_eq!(code(&["mermin", "sweep", "--delta", "0:200:1"]), 2);
    assert_eq!(code(&["mermin", "extremize", "--state", "bell"]), 2);
    assert_eq!(code(&["simulate", "--q", "0.3", "--r", "0.3"]), 2);
    assert_eq!(code(&["strength", "table", "--bogus"]), 2);
    assert_eq!(code(&["strength", "table", "--workers", "0"]), 2);
}

#[test]
fn invalid_worker_env_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_triphoton"))
        .args(["strength", "table"])
        .env("TRIPHOTON_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // the flag takes precedence over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_triphoton"))
        .args(["strength", "table", "--workers", "2"])
        .env("TRIPHOTON_WORKERS", "many")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["simulate", "--q", "0.2", "--r", "0.4", "--runs", "50", "--seed", "8", "--format", "json"];
    let a = triphoton(&[&args[..], &["--workers", "1"]].concat()).stdout;
    let b = triphoton(&[&args[..], &["--workers", "6"]].concat()).stdout;
    assert_eq!(a, b);
}
