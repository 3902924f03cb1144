use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn monotone(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monotone"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

#[test]
fn phi_prints_value_method_and_time() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["phi", "9", "(12)(34)(56)(789)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_line(&o), "807900672006");
    let second = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(
        second.starts_with("phi_9((12)(34)(56)(789)) via "),
        "{second}"
    );
    assert!(second.ends_with('s'));
}

#[test]
fn phi_of_a_five_cycle_on_five_variables() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["phi", "5", "(12345)"]);
    assert_eq!(first_line(&o), "11");
    let o = monotone(dir.path(), &["phi", "5", "(12)(34)"]);
    assert_eq!(first_line(&o), "309");
}

#[test]
fn phi_json_and_forced_method() {
    let dir = TempDir::new().unwrap();
    let o = monotone(
        dir.path(),
        &[
            "phi",
            "8",
            "(1234)(5678)",
            "--method",
            "basic",
            "--format",
            "json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["phi"], "3211276");
    assert_eq!(v["method"], "basic");
}

#[test]
fn infeasible_method_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["phi", "9", "(12)", "--method=basic"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["phi", "9", "(1a)"][..],
        &["phi", "4", "(15)"],
        &["phi", "4", "(12)", "--method", "magic"],
        &["rn", "10"],
        &["rn", "5", "--policy", "sloppy"],
        &["frobnicate"],
    ] {
        assert_eq!(
            monotone(dir.path(), args).status.code(),
            Some(2),
            "{args:?}"
        );
    }
}

#[test]
fn rn_text_ends_with_the_total() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["rn", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("r_6 = 16353"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[11/11]"));
}

#[test]
fn rn_json_report() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["rn", "5", "--format=json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["r"], "210");
    assert_eq!(v["entries"].as_array().unwrap().len(), 7);
}

#[test]
fn rn_csv_report() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["rn", "4", "--format=csv"]);
    let out = stdout(&o);
    assert_eq!(
        out.lines().next(),
        Some("cycle_type,mu,phi,method,source,matches_registry")
    );
    assert_eq!(out.lines().last(), Some("r,,30,,,"));
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let one = monotone(
        dir.path(),
        &["rn", "6", "--threads", "1", "--format", "csv"],
    );
    let many = monotone(
        dir.path(),
        &["rn", "6", "--threads", "4", "--format", "csv"],
    );
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&many));
}

#[test]
fn dn_values_and_capacity() {
    let dir = TempDir::new().unwrap();
    for (n, d) in [("0", "2"), ("6", "7828354"), ("7", "2414682040998")] {
        let o = monotone(dir.path(), &["dn", n]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(first_line(&o), d);
    }
    assert_eq!(monotone(dir.path(), &["dn", "8"]).status.code(), Some(3));
}

#[test]
fn verify_seven() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["verify", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("15/15 computed, 0 from the registry; 15 match, 0 differ"));
}

#[test]
fn verify_eight_slow_uses_one_constant() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["verify", "8", "--policy=slow"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("21/22 computed, 1 from the registry; 21 match, 0 differ"));
}

#[test]
fn saved_reports_reverify_with_the_same_status() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["rn", "5", "--format=json"]);
    let good = dir.path().join("good.json");
    std::fs::write(&good, &o.stdout).unwrap();
    let status = |p: &Path| {
        monotone(dir.path(), &["verify", "--report", p.to_str().unwrap()])
            .status
            .code()
    };
    assert_eq!(status(&good), Some(0));

    let tampered = stdout(&o).replacen("\"887\"", "\"888\"", 1);
    assert_ne!(tampered, stdout(&o));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, tampered).unwrap();
    assert_eq!(status(&bad), Some(1));

    assert_eq!(status(&dir.path().join("missing.json")), Some(4));
}

#[test]
fn cache_warm_list_clear() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["cache", "warm", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("7828354 functions"));
    let d6 = dir.path().join("d6.mbfs");
    assert_eq!(std::fs::metadata(&d6).unwrap().len(), 14 + 8 * 7_828_354);

    let listed = stdout(&monotone(dir.path(), &["cache", "list"]));
    assert_eq!(listed.lines().count(), 11);
    assert!(listed.contains("phi6_2-2-2.mbfs"));

    // involution streams D_6, now read back from the cache
    let o = monotone(
        dir.path(),
        &["phi", "8", "(12)(34)(56)(78)", "--method", "involution"],
    );
    assert_eq!(first_line(&o), "2038188253420");

    let o = monotone(dir.path(), &["cache", "clear"]);
    assert_eq!(
        first_line(&o),
        format!("removed 11 files from {}", dir.path().display())
    );
    assert!(!d6.exists());
}

#[test]
fn timeout_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = monotone(dir.path(), &["phi", "8", "(12)", "--timeout-seconds", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("timed out"));
}
