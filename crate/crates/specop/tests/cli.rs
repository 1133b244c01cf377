//! End-to-end runs of the `specop` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_specop"));
    c.env_remove("SPECOP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, len: usize, a2: f64, seed: u64) -> (PathBuf, PathBuf) {
    let out = run(&["generate", "--T", &len.to_string(), "--a2", &a2.to_string(), "--seed", &seed.to_string(), "--out", p(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (dir.join("x.csv"), dir.join("y.csv"))
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn test_run_and_replay_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = generate(&dir.path().join("data"), 60, 0.0, 1);
    let first = dir.path().join("first");
    let v = json(&run(&["test", p(&x), p(&y), "--b", "0.25", "--B", "200", "--seed", "3", "--dump-bootstrap", "--out", p(&first)]));
    let pv = v["p_value"].as_f64().unwrap();
    assert!(pv > 0.0 && pv <= 1.0);
    assert_eq!(v["bootstrap_sorted"].as_array().unwrap().len(), 200);
    assert_eq!(fs::read_to_string(first.join("bootstrap.csv")).unwrap().lines().count(), 201);

    let second = dir.path().join("second");
    let out = run(&["replay", p(&first.join("manifest.json")), "--out", p(&second)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["result.json", "q_profile.csv", "d_map.csv", "bootstrap.csv"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn replay_refuses_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = generate(&dir.path().join("data"), 30, 0.0, 2);
    let out_dir = dir.path().join("r");
    json(&run(&["test", p(&x), p(&y), "--b", "0.3", "--B", "20", "--out", p(&out_dir)]));
    let mut text = fs::read_to_string(&x).unwrap();
    text.push_str(&text.lines().last().unwrap().to_string());
    fs::write(&x, text).unwrap();
    let out = run(&["replay", p(&out_dir.join("manifest.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("changed"));
}

#[test]
fn identical_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (x, _) = generate(dir.path(), 50, 0.0, 3);
    let v = json(&run(&["test", p(&x), p(&x), "--b", "0.2", "--B", "99"]));
    assert_eq!(v["u_stat"].as_f64(), Some(0.0));
    assert!(v["p_value"].as_f64().unwrap() >= 0.5);

    let diag = dir.path().join("diag");
    json(&run(&["diagnose", p(&x), p(&x), "--b", "0.2", "--out", p(&diag)]));
    let q = fs::read_to_string(diag.join("q_profile.csv")).unwrap();
    let d = fs::read_to_string(diag.join("d_map.csv")).unwrap();
    assert_eq!(q.lines().next(), Some("lambda,q"));
    assert_eq!(d.lines().next(), Some("sigma,tau,d2"));
    assert!(q.lines().count() > 20);
    assert_eq!(d.lines().count(), 1 + 21 * 21);
    for line in q.lines().skip(1).chain(d.lines().skip(1)) {
        assert_eq!(line.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn scope_usage_and_degeneracy_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (x, _) = generate(&dir.path().join("a"), 40, 0.0, 4);
    let (z, _) = generate(&dir.path().join("b"), 41, 0.0, 4);

    let out = run(&["test", p(&x), p(&z), "--B", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("equal length"));

    let narrow = dir.path().join("narrow.csv");
    fs::write(&narrow, "1,2\n".repeat(40)).unwrap();
    assert_eq!(run(&["test", p(&x), p(&narrow), "--B", "10"]).status.code(), Some(3));

    assert_eq!(run(&["cv", p(&x)]).status.code(), Some(2));
    assert_eq!(run(&["test", p(&x), "missing.csv"]).status.code(), Some(2));
    assert_eq!(run(&["test", p(&x), p(&x), "--studentization", "bogus"]).status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2,3\n4,5,6\n7,x,9\n1,1,1\n").unwrap();
    let out = run(&["test", p(&bad), p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3, column 2"));

    let zeros = dir.path().join("zeros.csv");
    fs::write(&zeros, "0,0,0\n".repeat(12)).unwrap();
    assert_eq!(run(&["test", p(&zeros), p(&zeros), "--b", "0.3", "--B", "10"]).status.code(), Some(4));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = generate(dir.path(), 40, 0.0, 5);
    let flag = run(&["test", p(&x), p(&y), "--b", "0.3", "--B", "50", "--seed", "77"]);
    let env = bin().args(["test", p(&x), p(&y), "--b", "0.3", "--B", "50"]).env("SPECOP_SEED", "77").output().unwrap();
    let other = run(&["test", p(&x), p(&y), "--b", "0.3", "--B", "50", "--seed", "78"]);
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn gaussian_calibration_skips_bootstrap() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = generate(dir.path(), 40, 0.0, 6);
    let v = json(&run(&["test", p(&x), p(&y), "--b", "0.3", "--calibration", "gaussian"]));
    assert_eq!(v["calibration"], "gaussian");
    assert!(v["bootstrap_sorted"].as_array().unwrap().is_empty());
}

#[test]
fn cross_validation() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = generate(dir.path(), 100, 1.0, 7);
    let v = json(&run(&["cv", p(&x), p(&y)]));
    let b = v["b_cv"].as_f64().unwrap();
    assert!(b > 0.02 && b < 0.6, "b_cv {b}");
    assert_eq!(v["b_grid"].as_array().unwrap().len(), 25);

    let v = json(&run(&["cv", p(&x), p(&y), "--b-grid", "0.3"]));
    assert_eq!(v["b_cv"].as_f64(), Some(0.3));

    // without --b the test picks the bandwidth by cross-validation
    let v = json(&run(&["test", p(&x), p(&y), "--B", "20"]));
    assert_eq!(v["b_source"], "cv");
}

#[test]
fn simulate_table_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = |seed: &str| {
        let o = dir.path().join(seed);
        let r = run(&["simulate", "--T", "30", "--a2", "0,1", "--b", "0.3", "--R", "6", "--B", "20", "--seed", seed, "--workers", "2", "--out", p(&o)]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        (fs::read_to_string(o.join("rejection.csv")).unwrap(), fs::read_to_string(o.join("p_values.csv")).unwrap())
    };
    let (t1, p1) = out("1");
    let (t2, p2) = out("2");
    assert_eq!(t1.lines().next(), t2.lines().next());
    assert_eq!(t1.lines().count(), 3);
    assert_eq!(p1.lines().next(), p2.lines().next());
    assert_ne!(p1, p2);

    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "T = 30\na2 = 0\nb = 0.3\nR = 4\nB = 10\nseed = 1\n").unwrap();
    let r = run(&["simulate", "--config", p(&cfg), "--alpha", "0.05"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("T,b,a2,R,B,alpha=0.05,se_alpha=0.05"));
}

#[test]
fn null_density_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("nd");
    let r = run(&["simulate", "--null-density", "2", "--T", "30", "--b", "0.3", "--R", "12", "--B", "15", "--out", p(&o)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(fs::read_to_string(o.join("exact.csv")).unwrap().lines().count(), 1 + 12);
    assert_eq!(fs::read_to_string(o.join("bootstrap.csv")).unwrap().lines().count(), 1 + 2 * 15);
}
