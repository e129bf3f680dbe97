use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_matchwelfare"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ratios(csv: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|&h| h == "ratio").unwrap();
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn gen_identical_writes_identity_lists() {
    let v = json(&["gen", "identical", "--n", "4"]);
    assert_eq!(v["kind"], "complete");
    assert_eq!(v["n"], 4);
    for row in v["preferences"].as_array().unwrap() {
        assert_eq!(row, &serde_json::json!([0, 1, 2, 3]));
    }
}

#[test]
fn gen_roundtrips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.json");
    ok(&["gen", "--generator", "random", "--n", "5", "--seed", "3", "--out", path(&file)]);
    let v = json(&["run", "--instance", path(&file), "--mechanism", "ps"]);
    assert_eq!(v["n"], 5);
    assert_eq!(v["mechanism"], "ps");
}

#[test]
fn ps_hard_divisibility_error() {
    let out = run(&["gen", "ps-hard", "--n", "10", "--t", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("t must divide n; try n=9 or n=12"), "{err}");
}

#[test]
fn unknown_family_is_usage_error() {
    assert_eq!(run(&["gen", "nonsense", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn ps_on_instance2_against_first_benchmark() {
    let inst = fixtures().join("instance2.json");
    let bench = fixtures().join("instance2-benchmark-1.json");
    let v = json(&["run", "--instance", path(&inst), "--mechanism", "ps", "--benchmark", path(&bench)]);
    assert_eq!(v["welfare"]["ordinalHappy"], "9/4");
    assert_eq!(v["exhaustTimes"].as_array().unwrap().len(), 3);
}

#[test]
fn rsd_exact_on_instance1() {
    let inst = fixtures().join("instance1.json");
    let v = json(&["run", "--instance", path(&inst), "--mechanism", "rsd-exact"]);
    assert_eq!(v["welfare"]["linearUtility"], "17/6");
    assert_eq!(v["welfare"]["optLinear"], "3/1");
}

#[test]
fn rsd_exact_respects_guard() {
    let out = bin()
        .args(["run", "--generator", "random", "--n", "6", "--mechanism", "rsd-exact"])
        .env("MATCHWELFARE_ENUM_GUARD", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = [
        "run", "--generator", "random", "--n", "30", "--seed", "5", "--mechanism", "rsd-mc", "--samples", "1000",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sd_uses_given_order() {
    let inst = fixtures().join("instance2.json");
    let v = json(&["run", "--instance", path(&inst), "--mechanism", "sd", "--order", "2,1,0"]);
    // agent 2 takes item 1, agent 1 item 0, agent 0 item 2
    assert_eq!(v["matching"], serde_json::json!([[0, 2], [1, 0], [2, 1]]));
}

#[test]
fn csv_output_has_header() {
    let inst = fixtures().join("instance1.json");
    let text = ok(&["run", "--instance", path(&inst), "--mechanism", "ps", "--format", "csv"]);
    assert!(text.starts_with("key,value,decimal\n"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("welfare.linearUtility,3/1,")));
}

#[test]
fn out_is_replaced_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    fs::write(&file, "stale contents that are longer than the new file ".repeat(100)).unwrap();
    ok(&["gen", "identical", "--n", "3", "--out", path(&file)]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(v["n"], 3);
    let leftovers = fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn verify_only_one_claim() {
    let text = ok(&["verify", "--only", "tables"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert!(lines[0].starts_with("[PASS]") && lines[0].contains(" 1 tables:"), "{text}");
    assert_eq!(lines[1], "1 passed, 0 failed");
}

#[test]
fn verify_catches_corrupted_table() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(fixtures()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    let target = dir.path().join("instance1.json");
    let text = fs::read_to_string(&target).unwrap().replacen("\"5/12\"", "\"1/3\"", 1);
    fs::write(&target, text).unwrap();
    let out = run(&["verify", "--only", "tables", "--fixtures", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("[FAIL]") && stdout.contains(" 1 tables:"), "{stdout}");
}

#[test]
fn verify_catches_wrong_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(fixtures()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    // swapping the two benchmarks changes the expected welfare figures
    let one = dir.path().join("instance2-benchmark-1.json");
    let two = dir.path().join("instance2-benchmark-2.json");
    let a = fs::read(&one).unwrap();
    fs::copy(&two, &one).unwrap();
    fs::write(&two, a).unwrap();
    let out = run(&["verify", "--only", "worked-welfare", "--fixtures", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("worked-welfare"));
}

#[test]
fn verify_json_lists_outcomes() {
    let v = json(&["verify", "--only", "constants,bvn", "--format", "json"]);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert!(list.iter().all(|o| o["passed"] == true));
}

#[test]
fn kdemand_sweep_is_exactly_one_quarter() {
    let csv = ok(&["sweep", "kdemand", "--grid", "20,40,80", "--K", "4", "--samples", "50"]);
    let r = ratios(&csv);
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|&x| x == 0.25), "{csv}");
}

#[test]
fn ps_hard_sweep_decreases() {
    let csv = ok(&["sweep", "ps-hard", "--grid", "500,1000,2000"]);
    let r = ratios(&csv);
    assert_eq!(r.len(), 3);
    assert!(r[0] > r[1] && r[1] > r[2], "{csv}");
}

#[test]
fn invalid_grid_is_usage_error() {
    assert_eq!(run(&["sweep", "identical", "--grid", "4,x"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "identical", "--grid", ""]).status.code(), Some(2));
}
