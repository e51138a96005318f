//! The acceptance criteria, checked from two runs of `certify --suite all`
//! that share one evaluation cache. Prints one line per criterion.

use std::time::Instant;

use hardyheat::cli::main_with;
use hardyheat_core::SeriesControl;
use serde_json::Value;

struct Reports(Vec<Value>);

impl Reports {
    fn named(&self, name: &str) -> Vec<&Value> {
        self.0.iter().filter(|r| r["check_name"] == name).collect()
    }
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn param(r: &Value, key: &str) -> f64 {
    f(&r["params"][key])
}

/// Every report passed and its largest |residual| is within `tol`.
fn residuals_within(reports: &[&Value], tol: f64) -> Result<(), String> {
    if reports.is_empty() {
        return Err("no reports".into());
    }
    for r in reports {
        let max = f(&r["residuals"]["max"]);
        if r["status"] != "pass" || max.is_nan() || max > tol {
            return Err(format!("{} {}: status {}, max residual {max:e} > {tol:e}", r["check_name"], r["params"], r["status"]));
        }
    }
    Ok(())
}

fn constants_stable(reports: &[&Value]) -> Result<(), String> {
    if reports.is_empty() {
        return Err("no reports".into());
    }
    for r in reports {
        let c = &r["constants"];
        let (lo, hi, drift) = (f(&c["c_lower"]), f(&c["c_upper"]), f(&c["drift"]));
        if r["status"] != "pass" || !(lo > 0.0 && hi.is_finite() && drift.is_finite() && drift <= 0.05) {
            return Err(format!("{} {}: c = [{lo:e}, {hi:e}], drift {drift:e}", r["check_name"], r["params"]));
        }
    }
    Ok(())
}

fn all_pass(reports: &[&Value]) -> Result<(), String> {
    if reports.is_empty() {
        return Err("no reports".into());
    }
    match reports.iter().find(|r| r["status"] != "pass") {
        Some(r) => Err(format!("{} {}: {} {}", r["check_name"], r["params"], r["status"], r["failures"])),
        None => Ok(()),
    }
}

/// The covered values of `key` across `reports`, sorted.
fn covered(reports: &[&Value], key: &str) -> Vec<f64> {
    let mut v: Vec<f64> = reports.iter().map(|r| param(r, key)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn require(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok { Ok(()) } else { Err(what.into()) }
}

fn run_certify(args: &[&str]) -> (i32, f64) {
    let started = Instant::now();
    let mut sink = Vec::new();
    let code = main_with(std::iter::once("hardyheat").chain(args.iter().copied()), &mut sink);
    (code, started.elapsed().as_secs_f64())
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (out1, out2) = (dir.path().join("first.json"), dir.path().join("second.json"));
    let args = |out: &std::path::Path| {
        vec!["certify", "--suite", "all", "--seed", "0", "--cache", cache.to_str().unwrap(), "--out"]
            .into_iter()
            .map(String::from)
            .chain([out.to_str().unwrap().to_string()])
            .collect::<Vec<_>>()
    };
    let a1 = args(&out1);
    let a2 = args(&out2);
    let (code1, secs1) = run_certify(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    let (code2, secs2) = run_certify(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    let reports = Reports(serde_json::from_slice::<Vec<Value>>(&bytes1).unwrap());
    let timing: Value = serde_json::from_slice(&std::fs::read(dir.path().join("first.json.timing.json")).unwrap()).unwrap();
    let seconds_of = |name: &str| -> f64 {
        timing["checks"].as_array().unwrap().iter().filter(|c| c["check_name"] == name).map(|c| f(&c["runtime_seconds"])).sum()
    };
    let tail_tol = SeriesControl::default().tail_tol;

    let criteria: Vec<(&str, Result<(), String>)> = vec![
        ("closed-form cross-check (alpha = 1)", {
            let r = reports.named("identities.closed_alpha1");
            residuals_within(&r, 1e-6)
                .and(require(covered(&r, "zeta") == [0.0, 0.75, 1.0, 2.0], "zeta set"))
                .and(require(r.iter().all(|x| x["grid"]["points"] == 200), "200 points"))
                .and(require(seconds_of("identities.closed_alpha1") <= 120.0, "runtime over 2 min"))
        }),
        ("spectral-oracle agreement", {
            let g = reports.named("identities.spectral_gaussian");
            let s = reports.named("identities.spectral_subordination");
            residuals_within(&g, 1e-8)
                .and(residuals_within(&s, 1e-4))
                .and(require(covered(&s, "alpha") == [0.5, 1.0, 1.5], "alpha set"))
                .and(require(g.iter().chain(&s).all(|x| x["grid"]["points"] == 50), "50 points"))
        }),
        ("semigroup identities", {
            let ck = reports.named("identities.chapman_kolmogorov.perturbed");
            let target: Vec<&Value> = ck.iter().copied().filter(|r| param(r, "eta") == 0.5 && param(r, "zeta") == 1.0 && param(r, "alpha") == 1.0).collect();
            residuals_within(&reports.named("normalization.free"), 1e-6)
                .and(residuals_within(&reports.named("identities.chapman_kolmogorov.free"), 1e-4))
                .and(require(!target.is_empty(), "no perturbed CK at (1, 1, 0.5)"))
                .and(residuals_within(&ck, 3.0 * tail_tol))
                .and(residuals_within(&reports.named("identities.scaling.free"), 1e-10))
                .and(residuals_within(&reports.named("identities.scaling.perturbed"), 1e-10))
        }),
        ("invariance of the ground state", {
            let r = reports.named("identities.invariance");
            let (exact, series): (Vec<&Value>, Vec<&Value>) = r.iter().partition(|x| param(x, "alpha") == 2.0);
            residuals_within(&series, 1e-3)
                .and(residuals_within(&exact, 1e-8))
                .and(require(covered(&series, "eta") == [-0.4, 0.25, 0.5], "eta set"))
        }),
        ("envelope sandwich, free kernel", {
            let r = reports.named("sandwich.free");
            constants_stable(&r)
                .and(require(covered(&r, "zeta") == [0.0, 1.0, 2.5], "zeta set"))
                .and(require(covered(&r, "alpha") == [0.5, 1.0, 1.5], "alpha set"))
        }),
        ("envelope sandwich, perturbed kernel", {
            let r = reports.named("sandwich.perturbed");
            let etas = covered(&r, "eta");
            constants_stable(&r)
                .and(require(etas.contains(&-0.4) && etas.contains(&0.5), "eta set"))
                .and(require(r.iter().any(|x| param(x, "alpha") == 2.0 && x["params"]["gaussian_constants"].is_array()), "alpha = 2"))
        }),
        ("monotonicity in eta", {
            let r = reports.named("identities.monotonicity");
            all_pass(&r)
                .and(require(r.iter().any(|x| param(x, "eta") > 0.0) && r.iter().any(|x| param(x, "eta") < 0.0), "both signs"))
                .and(require(r.iter().all(|x| x["grid"]["points"] == 100), "100 points"))
        }),
        ("ground-state representation", {
            let r = reports.named("forms.ground_state_representation");
            residuals_within(&r, 1e-4).and(require(covered(&r, "eta") == [-0.5, 0.5], "eta set"))
        }),
        ("Hardy sharpness", all_pass(&reports.named("forms.hardy_sharpness"))),
        ("compensation identity", residuals_within(&reports.named("identities.compensation"), 1e-4)),
        ("integral regimes", {
            let r = reports.named("regimes.integrated_moment");
            all_pass(&r).and(require(covered(&r, "delta") == [0.5, 1.0, 2.0], "delta set"))
        }),
        ("3G inequalities", {
            let mut r = reports.named("threeg.weighted");
            r.extend(reports.named("threeg.time_scaled"));
            constants_stable(&r).and(require(covered(&r, "zeta") == [-0.25, 1.0], "zeta set"))
        }),
        ("small-time Levy limit", {
            let free = reports.named("identities.levy_limit.free");
            let pert = reports.named("identities.levy_limit.perturbed");
            all_pass(&free).and(all_pass(&pert))
        }),
        ("determinism", {
            require(code1 == 0 && code2 == 0, format!("exit codes {code1}, {code2}"))
                .and(require(bytes1 == bytes2, "reports differ"))
                .and(require(secs1 <= 1800.0, format!("first run {secs1:.0} s > 30 min")))
        }),
    ];

    let mut failed = 0;
    for (i, (name, verdict)) in criteria.iter().enumerate() {
        match verdict {
            Ok(()) => println!("criterion {:2} PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("certify all: {secs1:.0} s, then {secs2:.0} s with the cache");
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
