use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_guesswork");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("GUESSWORK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Column `name` of a CSV with a single data row.
fn field(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    row[i].to_string()
}

#[test]
fn analyze_uniform_binary() {
    let csv = stdout(&["analyze", "--probs", "0.5,0.5"]);
    assert_eq!(field(&csv, "shannon_nats"), "0.69314718056");
    assert_eq!(field(&csv, "varentropy_nats2"), "0");
    assert_eq!(field(&csv, "skewentropy_nats3"), "0");
    assert_eq!(field(&csv, "satisfies_sec"), "false");
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn analyze_sec_verdicts() {
    let csv = stdout(&["analyze", "--probs", "0.1,0.2,0.7"]);
    assert_eq!(field(&csv, "satisfies_sec"), "true");
    let csv = stdout(&["analyze", "--probs", "0.4995,0.4995,0.001"]);
    assert_eq!(field(&csv, "satisfies_sec"), "false");
    assert_eq!(field(&csv, "label"), "fail_margin");
}

#[test]
fn probs_file_matches_inline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.txt");
    fs::write(&path, "0.1 0.2\t0.7\n").unwrap();
    let from_file = stdout(&["analyze", "--probs-file", path.to_str().unwrap()]);
    assert_eq!(from_file, stdout(&["analyze", "--probs", "0.1,0.2,0.7"]));
}

#[test]
fn bits_rename_and_rescale() {
    let csv = stdout(&["--bits", "analyze", "--probs", "0.5,0.25,0.25"]);
    assert_eq!(field(&csv, "shannon_bits"), "1.5");
    assert_eq!(field(&csv, "varentropy_bits2"), "0.25");
    assert!(!csv.contains("_nats"));
}

#[test]
fn table1_rows() {
    let csv = stdout(&["table1", "--lengths", "9"]);
    assert_eq!(csv, "n,phi,H_nats,n_H_nats\n9,0.5,0.69314718056,6.23832462504\n");

    // one bit spread over two symbols: binary entropy (ln 2)/2 nats
    let csv = stdout(&["table1", "--total-bits", "1", "--lengths", "2"]);
    let phi: f64 = field(&csv, "phi").parse().unwrap();
    let h = -phi * phi.ln() - (1.0 - phi) * (1.0 - phi).ln();
    assert!((h - std::f64::consts::LN_2 / 2.0).abs() < 1e-10);
    assert!(phi < 0.5);
}

#[test]
fn full_budget_succeeds_for_uniform() {
    let log16 = (16f64).ln().to_string();
    let csv = stdout(&["success", "--probs", "0.5,0.5", "-n", "4", "--log-budget", &log16]);
    assert_eq!(field(&csv, "queries"), "16");
    assert_eq!(field(&csv, "success"), "1");
}

#[test]
fn moments_of_a_small_source() {
    let csv = stdout(&["moments", "--probs", "0.8,0.2", "-n", "2", "--rho", "1", "--mode", "exact-integer"]);
    let lm: f64 = field(&csv, "log_moment_nats").parse().unwrap();
    assert!((lm.exp() - 1.6).abs() < 1e-10);
    assert_eq!(field(&csv, "mode"), "exact_integer");
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["analyze", "--probs", "0.5,-0.5"][..],
        &["analyze", "--probs", "abc"],
        &["analyze"],
        &["rate", "--probs", "0.3,0.7", "--g", "5"],
        &["compare", "--probs", "0.3,0.7"],
        &["tilt-scan", "--probs", "0.3,0.7", "--alphas", "0:-1:2"],
        &["moments", "--probs", "0.3,0.7"],
        &["no-such-command"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(BIN)
        .args(["table1"])
        .env("GUESSWORK_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_guard_exit_3_and_override() {
    let out = run(&["scan-simplex", "--resolution", "100", "--max-scan-points", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["moments", "--probs", "0.2,0.3,0.5", "-n", "40", "--max-compositions", "5"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["--force-guard", "moments", "--probs", "0.2,0.3,0.5", "-n", "40", "--max-compositions", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn out_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let p = path.to_str().unwrap();
    let out = run(&["--out", p, "table1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout(&["table1"]));

    // a failing run leaves neither the target nor a temporary behind
    let failed = dir.path().join("failed.csv");
    let out = run(&["--out", failed.to_str().unwrap(), "analyze", "--probs", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!failed.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn verify_json_schema() {
    let out = run(&["verify", "derivatives"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 100);
    for r in records {
        let obj = r.as_object().unwrap();
        assert_eq!(obj.len(), 4);
        assert_eq!(obj["suite"], "derivatives");
        assert!(obj["case"].is_string());
        assert_eq!(obj["status"], "pass");
        assert!(obj["residual"].is_number() || obj["residual"].is_null());
    }
}

#[test]
fn verify_oracle_passes() {
    let out = run(&["--format", "csv", "verify", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,case,status,residual\n"));
    assert!(!text.contains(",fail,"));
}

#[test]
fn compare_verdicts_match_expectations() {
    let csv = stdout(&["compare", "--probs", "0.3,0.7", "--uniform", "--rho", "1"]);
    assert_eq!(field(&csv, "kind"), "moment_vs_uniform");
    assert_eq!(field(&csv, "ordering_holds"), "true");

    let csv = stdout(&["compare", "--probs", "0.2,0.3,0.5", "--search"]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(3) == Some("0")));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["scan-simplex", "--random", "300", "--dimension", "5"];
    let base = stdout(&args);
    for t in ["1", "3", "8"] {
        let out = Command::new(BIN).args(args).env("GUESSWORK_THREADS", t).output().unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), base);
    }
}
