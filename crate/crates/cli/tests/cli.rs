use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn worked() -> Value {
    json!({
        "alpha_inf": {"d": 2, "a": 0, "b": 1, "c": 1},
        "alpha_p": {"2": "1/2"},
        "gamma": "1/2",
        "n": 1,
        "checkpoints": [100, 1000]
    })
}

fn brs(dir: &Path, args: &[&str], config: &Value) -> (i32, String) {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_brs"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn verdict(dir: &Path) -> Value {
    serde_json::from_str(&read(dir, "verdict.json")).unwrap()
}

#[test]
fn construct_worked_example() {
    let t = TempDir::new().unwrap();
    let (code, _) = brs(t.path(), &["construct"], &worked());
    assert_eq!(code, 0);
    let boxes = read(t.path(), "boxes.txt");
    assert!(boxes.contains("1 | 0 | 5/2 − √2 | 2:0:-1"), "{boxes}");
    let v = verdict(t.path());
    assert_eq!(v["set"]["claimed_volume"]["exact"], "5/4 − (1/2)√2");
    assert_eq!(v["construction"]["lambda"], "-5/2");
    assert_eq!(v["pass"], true);
}

#[test]
fn construct_zero_gamma_gives_full_domains() {
    let t = TempDir::new().unwrap();
    let mut c = worked();
    c["gamma"] = json!("0");
    c["n"] = json!(2);
    let (code, _) = brs(t.path(), &["construct"], &c);
    assert_eq!(code, 0);
    let boxes = read(t.path(), "boxes.txt");
    let body: Vec<&str> = boxes.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["1 | 0 | 1 | 2:0:0", "1 | 0 | 1 | 2:0:0"]);
}

#[test]
fn infeasible_volume_exits_2() {
    let t = TempDir::new().unwrap();
    let mut c = worked();
    c["n"] = json!(-3);
    let (code, msg) = brs(t.path(), &["construct"], &c);
    assert_eq!(code, 2, "{msg}");
    assert!(msg.contains("negative"), "{msg}");
}

#[test]
fn config_errors_exit_3() {
    let t = TempDir::new().unwrap();
    let mut c = worked();
    c["alpha_inf"]["b"] = json!(0);
    assert_eq!(brs(t.path(), &["construct"], &c).0, 3);
    let mut c = worked();
    c["checkpoints"] = json!([1000, 100]);
    assert_eq!(brs(t.path(), &["verify"], &c).0, 3);
    assert_eq!(brs(t.path(), &["verify", "--bogus"], &worked()).0, 3);
    let out = Command::new(env!("CARGO_BIN_EXE_brs")).args(["verify", "--config", "/nonexistent.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_brs_passes_and_skips_zero_row() {
    let t = TempDir::new().unwrap();
    let (code, msg) = brs(t.path(), &["verify", "--svg"], &worked());
    assert_eq!(code, 0, "{msg}");
    let table = read(t.path(), "discrepancy.csv");
    assert!(!table.contains('\r'));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "N,D_N,running_sup,D_N_exact,running_sup_exact");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("100,") && lines[2].starts_with("1000,"));
    // 30 significant digits
    let d = lines[2].split(',').nth(2).unwrap();
    assert_eq!(d.trim_start_matches("0.").chars().filter(char::is_ascii_digit).count(), 30, "{d}");
    assert!(lines[2].ends_with(",−707 + 500√2,−576 + 408√2"));
    let v = verdict(t.path());
    assert_eq!(v["flags"]["plateau"], true);
    assert!(v["horizon"].as_str().unwrap().contains("finite horizon"));
    assert!(read(t.path(), "discrepancy.svg").contains("<polyline"));
}

#[test]
fn verify_control_box_fails() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("control.txt"), "1 | 0 | 1/2 | 2:0:0\n").unwrap();
    let mut c = worked();
    c.as_object_mut().unwrap().remove("gamma");
    c["box_file"] = json!("control.txt");
    let (code, _) = brs(t.path(), &["verify", "--checkpoints", "100,1000"], &c);
    assert_eq!(code, 1);
    let v = verdict(t.path());
    assert_eq!(v["flags"]["plateau"], false);
    assert_eq!(v["growth_detected"], true);
    assert_eq!(v["checkpoints"][1]["running_sup"]["exact"], "9/2");
}

#[test]
fn identical_seed_gives_identical_files() {
    let mut c = worked();
    c["x0"] = json!("random");
    let runs: Vec<(String, String)> = (0..2)
        .map(|_| {
            let t = TempDir::new().unwrap();
            assert_eq!(brs(t.path(), &["verify", "--seed", "17"], &c).0, 0);
            (read(t.path(), "discrepancy.csv"), read(t.path(), "verdict.json"))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let t = TempDir::new().unwrap();
    brs(t.path(), &["verify", "--seed", "18"], &c);
    assert_ne!(read(t.path(), "discrepancy.csv"), runs[0].0);
}

#[test]
fn cutproject_matches_indicator() {
    let t = TempDir::new().unwrap();
    let mut c = worked();
    c["N"] = json!(200);
    let (code, msg) = brs(t.path(), &["cutproject"], &c);
    assert_eq!(code, 0, "{msg}");
    let pts = read(t.path(), "points.csv");
    let lines: Vec<&str> = pts.lines().collect();
    assert_eq!(lines[0], "gamma1,multiplicity,chi");
    assert_eq!(lines[1], "0,1,1");
    assert!(lines.iter().skip(1).all(|l| {
        let f: Vec<&str> = l.split(',').collect();
        f[1] == f[2]
    }));
    let v = verdict(t.path());
    assert_eq!(v["mismatch_count"], 0);
    assert_eq!(v["window"], "[0, 5/2 − √2) x B(0, 2^-1)");

    let mut c = worked();
    c["gamma"] = json!(0);
    assert_eq!(brs(t.path(), &["cutproject"], &c).0, 2);
}

#[test]
fn weyl_rows_and_trivial_character() {
    let t = TempDir::new().unwrap();
    let (code, _) = brs(t.path(), &["weyl"], &worked());
    assert_eq!(code, 0);
    let w = read(t.path(), "weyl.csv");
    assert_eq!(w.lines().count(), 3);
    let mut c = worked();
    c["gamma"] = json!(0);
    c["checkpoints"] = json!([100, 1000, 10000]);
    assert_eq!(brs(t.path(), &["weyl"], &c).0, 2);
    c.as_object_mut().unwrap().remove("gamma");
    let (code, _) = brs(t.path(), &["weyl"], &c);
    assert_eq!(code, 0);
    assert_ne!(verdict(t.path())["gamma"], "0");
}

#[test]
fn volumes_listing() {
    let t = TempDir::new().unwrap();
    let mut c = worked();
    c["bound"] = json!(2);
    assert_eq!(brs(t.path(), &["volumes"], &c).0, 0);
    let v = read(t.path(), "volumes.csv");
    for n in 0..=2 {
        assert!(v.contains(&format!("\n0,{n},{n},")), "{v}");
    }
    assert!(v.contains("\n1/2,1,5/4 − (1/2)√2,"));
    assert!(v.lines().skip(1).all(|l| l.ends_with(",true")));

    // no primes: volumes are n - gamma sqrt2 with gamma an integer
    let mut c = worked();
    c["alpha_p"] = json!({});
    c["gamma"] = json!(1);
    c["bound"] = json!(2);
    assert_eq!(brs(t.path(), &["volumes"], &c).0, 0);
    let v = read(t.path(), "volumes.csv");
    assert!(v.contains("\n1,2,2 − √2,"));
    assert!(v.contains("\n-1,0,√2,"));
    assert!(v.lines().skip(1).all(|l| !l.split(',').next().unwrap().contains('/')));
}

#[test]
fn batch_runs_all_and_reports_worst_code() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("control.txt"), "1 | 0 | 1/2 | 2:0:0\n").unwrap();
    let mut c = worked();
    c["experiments"] = json!([
        {"name": "brs", "command": "verify"},
        {"name": "control", "command": "verify", "box_file": "control.txt"},
        {"name": "boxes", "command": "construct"}
    ]);
    let (code, msg) = brs(t.path(), &["batch"], &c);
    assert_eq!(code, 1, "{msg}");
    let summary: Value = serde_json::from_str(&read(t.path(), "batch.json")).unwrap();
    let codes: Vec<i64> = summary["experiments"].as_array().unwrap().iter().map(|e| e["exit_code"].as_i64().unwrap()).collect();
    assert_eq!(codes, [0, 1, 0]);
    assert!(read(t.path(), "brs/verdict.json").contains("\"pass\": true"));
    assert!(read(t.path(), "boxes/boxes.txt").contains("5/2 − √2"));

    c["experiments"] = json!([{"name": "a", "command": "verify"}, {"name": "a", "command": "weyl"}]);
    assert_eq!(brs(t.path(), &["batch"], &c).0, 3);
}
