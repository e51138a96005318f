use std::process::Command;

use hardyheat::cli::main_with;
use hardyheat_core::CouplingParams;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = main_with(std::iter::once("hardyheat").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{args:?}: {out}");
    serde_json::from_str(&out).unwrap()
}

const POINT: [&str; 6] = ["--t", "1", "--r", "1", "--s", "1"];

fn with_point(args: &[&'static str]) -> Vec<&'static str> {
    let mut v = args.to_vec();
    v.extend(POINT);
    v
}

#[test]
fn eval_examples() {
    let v = json(&with_point(&["eval", "--zeta", "0", "--alpha", "1"]));
    // ζ = 0, α = 1: (t/π)(1/(t²+(r−s)²) + 1/(t²+(r+s)²)) = (1/π)(1 + 1/5)
    let exact = 1.2 / std::f64::consts::PI;
    assert!((v["value"].as_f64().unwrap() / exact - 1.0).abs() < 1e-14);
    assert_eq!(v["method"], "closed_alpha1");

    let v = json(&with_point(&["eval", "--zeta", "1", "--alpha", "2", "--eta", "0.5"]));
    assert_eq!(v["method"], "closed_alpha2");
    assert!((v["value"].as_f64().unwrap() - 0.322518).abs() < 5e-7);
}

#[test]
fn channel_flags_match_direct_flags() {
    let a = json(&with_point(&["eval", "--d", "3", "--ell", "0", "--alpha", "2", "--kappa", "0"]));
    let b = json(&with_point(&["eval", "--zeta", "1", "--alpha", "2"]));
    assert_eq!(a, b);
    // κ = Ψ(η) for η = 1/2 at ζ = 1, α = 2 (d = 3, ℓ = 0)
    let kappa = CouplingParams::new(1.0, 2.0, 0.5).unwrap().kappa.to_string();
    let mut args = vec!["eval", "--d", "3", "--alpha", "2", "--kappa", kappa.as_str()];
    args.extend(POINT);
    let a = json(&args);
    let b = json(&with_point(&["eval", "--zeta", "1", "--alpha", "2", "--eta", "0.5"]));
    assert!((a["eta"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((a["value"].as_f64().unwrap() / b["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["certify", "--suite", "nonsense"]).0, 64);
    assert_eq!(run(&["eval", "--zeta", "1"]).0, 64);
    assert_eq!(run(&["eval", "--bogus"]).0, 64);
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&with_point(&["eval", "--zeta", "1", "--alpha", "1.5", "--method", "closed"])).0, 64);
    // η above the critical value is inadmissible
    assert_eq!(run(&with_point(&["eval", "--zeta", "1", "--alpha", "1", "--eta", "5"])).0, 2);
    assert_eq!(run(&["eval", "--zeta", "1", "--alpha", "1", "--t=-1", "--r", "1", "--s", "1"]).0, 2);

    let out = Command::new(env!("CARGO_BIN_EXE_hardyheat")).args(["certify", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown suite") && err.lines().count() == 1, "{err}");
}

const SMALL_GRID: &str = r#"{"rs": {"min_exp": -2, "max_exp": 2, "per_octave": 2}}"#;

#[test]
fn sweep_rows_are_deterministic() {
    let args = ["sweep", "--zeta", "1", "--alpha", "1", "--t", "1", "--grid", SMALL_GRID, "--ratio", "envelope"];
    let (code, a) = run(&args);
    assert_eq!(code, 0);
    let (_, b) = run(&args);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "check,zeta,alpha,eta,t,r,s,value,envelope,ratio,method,err_est,error");
    // 9 × 9 points in (r, s)
    assert_eq!(lines.len(), 82);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let (value, env, ratio): (f64, f64, f64) = (f[7].parse().unwrap(), f[8].parse().unwrap(), f[9].parse().unwrap());
        assert_eq!(ratio, value / env);
        assert_eq!(f[12], "");
    }
    // rows in (t, r, s) order
    assert!(lines[1].starts_with("sweep,1.0,1.0,0.0,1.0,0.25,0.25,"));
    assert!(lines[2].starts_with("sweep,1.0,1.0,0.0,1.0,0.25,0.35355"));

    let (_, plain) = run(&args[..args.len() - 2]);
    assert_eq!(plain.lines().nth(1).unwrap().split(',').nth(9), Some(""));
}

#[test]
fn certify_writes_reports_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("threeg.json");
    let out_s = out.to_str().unwrap();
    let (code, _) = run(&["certify", "--suite", "threeg", "--out", out_s]);
    assert_eq!(code, 0);
    let first = std::fs::read(&out).unwrap();
    let reports: Value = serde_json::from_slice(&first).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert_eq!(r["status"], "pass");
        assert!(r.get("runtime_seconds").is_none());
        assert!(r["constants"]["c_upper"].as_f64().unwrap().is_finite());
    }
    let timing: Value = serde_json::from_slice(&std::fs::read(dir.path().join("threeg.json.timing.json")).unwrap()).unwrap();
    assert_eq!(timing["checks"].as_array().unwrap().len(), 3);

    run(&["certify", "--suite", "threeg", "--out", out_s]);
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let (_, other_seed) = run(&["certify", "--suite", "threeg", "--seed", "7"]);
    assert_ne!(other_seed.as_bytes(), first.as_slice());
}

#[test]
fn certify_narrows_the_grid_with_flags() {
    let v = json(&["certify", "--suite", "sandwich-free", "--alpha", "1"]);
    let zetas: Vec<f64> = v.as_array().unwrap().iter().map(|r| r["params"]["zeta"].as_f64().unwrap()).collect();
    assert_eq!(zetas, vec![0.0, 1.0, 2.5]);
    for r in v.as_array().unwrap() {
        assert_eq!(r["params"]["alpha"], 1.0);
        assert!(r["constants"]["c_lower"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"zeta": 0.0, "alpha": 1.0, "t": 1.0, "r": 1.0, "s": 1.0}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = json(&["--config", cfg, "eval"]);
    assert_eq!(a["zeta"], 0.0);
    let b = json(&["--config", cfg, "eval", "--zeta", "1"]);
    assert_eq!(b["zeta"], 1.0);
    assert_eq!(b, json(&with_point(&["eval", "--zeta", "1", "--alpha", "1"])));
    std::fs::write(dir.path().join("bad.json"), r#"{"zeta": 1, "typo": 2}"#).unwrap();
    assert_eq!(run(&["--config", dir.path().join("bad.json").to_str().unwrap(), "eval"]).0, 64);
}

#[test]
fn cache_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let args = ["eval", "--zeta", "1", "--alpha", "0.5", "--t", "1", "--r", "1", "--s", "2", "--cache", c];
    let first = json(&args);
    assert_eq!(first["method"], "subordination");
    let stats = json(&["cache", "stats", "--cache", c]);
    assert_eq!(stats["evals"], 1);
    assert_eq!(json(&args), first);
    assert_eq!(json(&["cache", "stats", "--cache", c])["evals"], 1);
    assert_eq!(run(&["cache", "clear", "--cache", c]).0, 0);
    assert_eq!(json(&["cache", "stats", "--cache", c])["records"], 0);
    assert_eq!(run(&["cache", "stats"]).0, 64);
}
