//! Pointwise identities: cross-method agreement, semigroup identities,
//! invariance of the ground state, compensation, the small-time Lévy limit
//! and monotonicity in η.

use serde_json::json;

use hardyheat_core::kernels::{bessel_heat_2, cauchy_heat_closed, levy_kernel};
use hardyheat_core::perturbation::compensation_residual;
use hardyheat_core::quad::{best_effort, integrate_breaks, log_breaks, Estimate, Tolerance};
use hardyheat_core::{CouplingParams, EvalPoint, Method, PerturbedKernel};

use super::moment;
use crate::error::Result;
use crate::grid::{log_uniform, sample_rng, GridSpec};
use crate::report::{CheckReport, Tally};
use crate::store::KernelStore;

const CLOSED_ZETAS: [f64; 4] = [0.0, 0.75, 1.0, 2.0];
const CLOSED_POINTS: usize = 200;
const CLOSED_TOL: f64 = 1e-6;
const SPECTRAL_POINTS: usize = 50;
const GAUSS_TOL: f64 = 1e-8;
const SUBORDINATION_TOL: f64 = 1e-4;
const CK_TOL: f64 = 1e-4;
const SCALING_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-3;
const INVARIANCE_TOL_EXACT: f64 = 1e-8;
const COMPENSATION_TOL: f64 = 1e-4;
const MIN_SLOPE: f64 = 0.8;
const MONOTONE_POINTS: usize = 100;
const MONOTONE_TOL: f64 = 1e-8;

/// Sampling streams, one per check, so adding points to one check leaves
/// the others unchanged.
const STREAM_CLOSED: u64 = 10;
const STREAM_SPECTRAL: u64 = 11;
const STREAM_SCALING: u64 = 12;
const STREAM_MONOTONE: u64 = 13;

/// (t, r, s) with t ~ 2^U(−t_oct, t_oct) and r, s ~ 2^U(−r_oct, r_oct).
fn sample_point(seed: u64, stream: u64, i: usize, t_oct: f64, r_oct: f64) -> EvalPoint {
    let mut rng = sample_rng(seed, stream, i as u64);
    let t = log_uniform(&mut rng, -t_oct, t_oct);
    let r = log_uniform(&mut rng, -r_oct, r_oct);
    let s = log_uniform(&mut rng, -r_oct, r_oct);
    EvalPoint { t, r, s }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b) / b
}

fn at(p: EvalPoint) -> String {
    format!("(t={}, r={}, s={})", p.t, p.r, p.s)
}

pub fn check_identities(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    out.extend(closed_alpha_one(grid, store)?);
    out.extend(spectral(grid, store)?);
    out.extend(chapman_kolmogorov(grid, store)?);
    out.extend(scaling(grid, store)?);
    out.extend(invariance(grid, store)?);
    out.push(compensation());
    out.extend(levy_limit(grid, store)?);
    out.extend(monotonicity(grid, store)?);
    Ok(out)
}

/// Subordination against the α = 1 closed form.
fn closed_alpha_one(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for zeta in CLOSED_ZETAS {
        let mut tally = Tally::new(
            "identities.closed_alpha1",
            json!({"zeta": zeta, "alpha": 1.0}),
            json!({"points": CLOSED_POINTS, "seed": grid.seed, "t": "2^U(-4,4)", "r_s": "2^U(-6,6)"}),
            format!("|subordination / closed form - 1| <= {CLOSED_TOL:e}"),
        );
        for i in 0..CLOSED_POINTS {
            let p = sample_point(grid.seed, STREAM_CLOSED, i, 4.0, 6.0);
            let sub = store.free_point(zeta, 1.0, p, Some(Method::Subordination));
            let (Some(sub), Some(closed)) = (tally.check(at(p), sub), tally.check(at(p), cauchy_heat_closed(zeta, p))) else {
                continue;
            };
            let res = rel(sub.value, closed.value);
            tally.residual(at(p), res, res.abs() <= CLOSED_TOL);
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}

/// The Hankel-transform evaluation against the Bessel heat kernel (α = 2)
/// and against subordination (α < 2).
fn spectral(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut alphas = vec![2.0];
    alphas.extend(grid.alpha_values.iter().filter(|&&a| a < 2.0));
    for &zeta in &grid.zeta_values {
        for &alpha in &alphas {
            let (name, tol, other) = if alpha == 2.0 {
                ("identities.spectral_gaussian", GAUSS_TOL, "bessel heat kernel")
            } else {
                ("identities.spectral_subordination", SUBORDINATION_TOL, "subordination")
            };
            let mut tally = Tally::new(
                name,
                json!({"zeta": zeta, "alpha": alpha}),
                spectral_grid_json(grid.seed, alpha),
                format!("|spectral / {other} - 1| <= {tol:e}"),
            );
            for p in spectral_points(grid.seed, alpha) {
                let spec = store.free_point(zeta, alpha, p, Some(Method::Spectral));
                let reference = if alpha == 2.0 {
                    bessel_heat_2(zeta, p).map_err(Into::into)
                } else {
                    store.free_point(zeta, alpha, p, Some(Method::Subordination))
                };
                let (Some(spec), Some(reference)) = (tally.check(at(p), spec), tally.check(at(p), reference)) else {
                    continue;
                };
                let res = rel(spec.value, reference.value);
                tally.residual(at(p), res, res.abs() <= tol);
            }
            out.push(tally.finish(None));
        }
    }
    Ok(out)
}

/// At α = 2 the Hankel integral is accurate in absolute terms only, so the
/// samples stay where the Gaussian factor is above e^{−GAUSS_EXPONENT}.
const GAUSS_EXPONENT: f64 = 8.0;

fn spectral_points(seed: u64, alpha: f64) -> Vec<EvalPoint> {
    (0..)
        .map(|i| sample_point(seed, STREAM_SPECTRAL, i, 2.0, 3.0))
        .filter(|p| alpha < 2.0 || (p.r - p.s).powi(2) / (4.0 * p.t) <= GAUSS_EXPONENT)
        .take(SPECTRAL_POINTS)
        .collect()
}

fn spectral_grid_json(seed: u64, alpha: f64) -> serde_json::Value {
    let mut g = json!({"points": SPECTRAL_POINTS, "seed": seed, "t": "2^U(-2,2)", "r_s": "2^U(-3,3)"});
    if alpha == 2.0 {
        g["max_gaussian_exponent"] = json!(GAUSS_EXPONENT);
    }
    g
}

/// ∫ p(t₁,r,z) p(t₂,z,s) z^{2ζ} dz for kernels growing like z^{−η} at 0.
#[allow(clippy::too_many_arguments)]
fn composed(
    p1: impl Fn(f64) -> f64,
    p2: impl Fn(f64) -> f64,
    (zeta, alpha, eta): (f64, f64, f64),
    t1: f64,
    t2: f64,
    r: f64,
    s: f64,
) -> hardyheat_core::Result<Estimate> {
    let w1 = t1.powf(1.0 / alpha);
    let w2 = t2.powf(1.0 / alpha);
    let e_lo = 2.0 * zeta + 1.0 - 2.0 * eta.max(0.0);
    let e_hi = if alpha == 2.0 { 8.0 } else { 2.0 * alpha + 2.0 * zeta + 1.0 };
    let pts = log_breaks(&[r, s, w1, w2], &[(r, w1), (s, w2)], e_lo, e_hi);
    best_effort(integrate_breaks(
        |w| {
            let z = w.exp();
            p1(z) * p2(z) * z.powf(2.0 * zeta + 1.0)
        },
        &pts,
        &Tolerance::rel(1e-11).with_max_subdivisions(2000),
    ))
}

const CK_POINTS: [(f64, f64); 4] = [(1.0, 1.0), (0.5, 2.0), (0.1, 0.3), (3.0, 0.2)];

fn chapman_kolmogorov(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let (t1, t2) = (0.5, 0.5);
    let grid_json = json!({"t": [t1, t2], "r_s": CK_POINTS});
    for &zeta in &grid.zeta_values {
        for &alpha in &grid.alpha_values {
            let k = store.free(zeta, alpha)?;
            let mut tally = Tally::new(
                "identities.chapman_kolmogorov.free",
                json!({"zeta": zeta, "alpha": alpha}),
                grid_json.clone(),
                format!("|(P_t1 P_t2)(r,s) / p(t1+t2,r,s) - 1| <= {CK_TOL:e}"),
            );
            for (r, s) in CK_POINTS {
                let here = format!("(r={r}, s={s})");
                let m = composed(|z| k.value(t1, r, z), |z| k.value(t2, z, s), (zeta, alpha, 0.0), t1, t2, r, s);
                if let Some(m) = tally.check(&here, m) {
                    let res = rel(m.value, k.value(t1 + t2, r, s));
                    tally.residual(&here, res, res.abs() <= CK_TOL);
                }
            }
            out.push(tally.finish(None));
        }
    }
    for params in grid.perturbed_params()?.into_iter().filter(|p| p.eta > 0.0) {
        let k = store.perturbed(params)?;
        let tol = 3.0 * k.control().tail_tol;
        let mut tally = Tally::new(
            "identities.chapman_kolmogorov.perturbed",
            json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta}),
            grid_json.clone(),
            format!("|(P_t1 P_t2)(r,s) / p(t1+t2,r,s) - 1| <= 3 tail_tol = {tol:e}"),
        );
        for (r, s) in CK_POINTS {
            let here = format!("(r={r}, s={s})");
            let m = composed(|z| k.value(t1, r, z), |z| k.value(t2, z, s), (params.zeta, params.alpha, params.eta), t1, t2, r, s);
            if let Some(m) = tally.check(&here, m) {
                let res = rel(m.value, k.value(t1 + t2, r, s));
                tally.residual(&here, res, res.abs() <= tol);
            }
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}

const SCALING_POINTS: usize = 20;
const DILATIONS: [f64; 2] = [0.1, 7.0];

/// p(λ^α t, λr, λs) = λ^{−(2ζ+1)} p(t,r,s) and p(t,r,s) = p(t,s,r), for the
/// free and the perturbed kernels.
fn scaling(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let grid_json = json!({"points": SCALING_POINTS, "seed": grid.seed, "t": "2^U(-2,2)", "r_s": "2^U(-4,4)", "lambda": DILATIONS});
    let criterion = format!("scaling and symmetry relative residuals <= {SCALING_TOL:e}");
    let run = |tally: &mut Tally, zeta: f64, alpha: f64, p: &dyn Fn(f64, f64, f64) -> f64| {
        for i in 0..SCALING_POINTS {
            let x = sample_point(grid.seed, STREAM_SCALING, i, 2.0, 4.0);
            let v = p(x.t, x.r, x.s);
            let res = rel(p(x.t, x.s, x.r), v);
            tally.residual(format!("symmetry {}", at(x)), res, res.abs() <= SCALING_TOL);
            for lambda in DILATIONS {
                let w = p(lambda.powf(alpha) * x.t, lambda * x.r, lambda * x.s) * lambda.powf(2.0 * zeta + 1.0);
                let res = rel(w, v);
                tally.residual(format!("lambda={lambda} {}", at(x)), res, res.abs() <= SCALING_TOL);
            }
        }
    };
    for &zeta in &grid.zeta_values {
        for &alpha in &grid.alpha_values {
            let k = store.free(zeta, alpha)?;
            let mut tally = Tally::new("identities.scaling.free", json!({"zeta": zeta, "alpha": alpha}), grid_json.clone(), criterion.clone());
            run(&mut tally, zeta, alpha, &|t, r, s| k.value(t, r, s));
            out.push(tally.finish(None));
        }
    }
    for params in grid.perturbed_params()? {
        let k = store.perturbed(params)?;
        let mut tally = Tally::new(
            "identities.scaling.perturbed",
            json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta}),
            grid_json.clone(),
            criterion.clone(),
        );
        run(&mut tally, params.zeta, params.alpha, &|t, r, s| k.value(t, r, s));
        out.push(tally.finish(None));
    }
    Ok(out)
}

const INVARIANCE_T: f64 = 1.0;
const INVARIANCE_R: [f64; 3] = [0.5, 1.0, 2.0];

/// ∫ p̃(t,r,s) s^{2ζ−η} ds = r^{−η}.
fn invariance(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut all = grid.perturbed_params()?;
    // the exact α = 2 path
    all.push(CouplingParams::new(1.0, 2.0, 0.5)?);
    for params in all {
        let k = store.perturbed(params)?;
        let tol = if params.alpha == 2.0 { INVARIANCE_TOL_EXACT } else { INVARIANCE_TOL };
        let mut tally = Tally::new(
            "identities.invariance",
            json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta}),
            json!({"t": INVARIANCE_T, "r": INVARIANCE_R}),
            format!("|r^eta * integral of p(t,r,s) s^(2 zeta - eta) ds - 1| <= {tol:e}"),
        );
        for r in INVARIANCE_R {
            let here = format!("(t={INVARIANCE_T}, r={r})");
            if let Some(m) = tally.check(&here, invariant_mass(&k, INVARIANCE_T, r)) {
                let res = rel(m.value, r.powf(-params.eta));
                tally.residual(&here, res, res.abs() <= tol);
            }
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}

fn invariant_mass(k: &PerturbedKernel, t: f64, r: f64) -> hardyheat_core::Result<Estimate> {
    let p = k.params();
    let e_hi = if p.alpha == 2.0 { 8.0 } else { p.alpha + p.eta };
    let width = t.powf(1.0 / p.alpha);
    moment(|s| k.value(t, r, s), (p.zeta, p.eta, p.eta.max(0.0)), e_hi, r, width)
}

const COMPENSATION: (f64, f64, f64, f64) = (1.0, 1.0, -0.5, 1.0);

fn compensation() -> CheckReport {
    let (zeta, alpha, eta, t) = COMPENSATION;
    let mut tally = Tally::new(
        "identities.compensation",
        json!({"zeta": zeta, "alpha": alpha, "eta": eta}),
        json!({"t": t, "r": INVARIANCE_R}),
        format!("|compensation residual| <= {COMPENSATION_TOL:e}"),
    );
    for r in INVARIANCE_R {
        let here = format!("(t={t}, r={r})");
        if let Some(res) = tally.check(&here, compensation_residual(zeta, alpha, eta, t, r)) {
            tally.residual(&here, res, res.abs() <= COMPENSATION_TOL);
        }
    }
    tally.finish(None)
}

const LEVY_TIMES: [f64; 3] = [1e-1, 1e-2, 1e-3];
const LEVY_POINT: (f64, f64) = (1.0, 2.0);

/// Least-squares slope of ln y against ln x.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// |p(t,r,s)/t − ν(r,s)| / ν decreases as t → 0 with log-log slope at least
/// MIN_SLOPE, for the free kernels and the perturbed kernels with η < 0.
fn levy_limit(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let (r, s) = LEVY_POINT;
    let grid_json = json!({"t": LEVY_TIMES, "r": r, "s": s});
    let criterion = format!("|p/t - nu|/nu decreasing in t, log-log slope >= {MIN_SLOPE}");
    let run = |tally: &mut Tally, zeta: f64, alpha: f64, p: &dyn Fn(f64) -> f64| {
        let Some(nu) = tally.check("levy kernel", levy_kernel(zeta, alpha, r, s)) else {
            return;
        };
        let dev: Vec<f64> = LEVY_TIMES.iter().map(|&t| ((p(t) / t - nu) / nu).abs()).collect();
        for (i, (&t, &d)) in LEVY_TIMES.iter().zip(&dev).enumerate() {
            let decreasing = i == 0 || d < dev[i - 1];
            tally.residual(format!("t={t}"), d, decreasing && d.is_finite());
        }
        let slope = log_slope(&LEVY_TIMES, &dev);
        if slope.is_nan() || slope < MIN_SLOPE {
            tally.fail(format!("slope {slope} < {MIN_SLOPE}"));
        }
    };
    for &zeta in &grid.zeta_values {
        for &alpha in grid.alpha_values.iter().filter(|&&a| a < 2.0) {
            let k = store.free(zeta, alpha)?;
            let mut tally = Tally::new("identities.levy_limit.free", json!({"zeta": zeta, "alpha": alpha}), grid_json.clone(), criterion.clone());
            run(&mut tally, zeta, alpha, &|t| k.value(t, r, s));
            out.push(tally.finish(None));
        }
    }
    for params in grid.perturbed_params()?.into_iter().filter(|p| p.eta < 0.0 && p.alpha < 2.0) {
        let k = store.perturbed(params)?;
        let mut tally = Tally::new(
            "identities.levy_limit.perturbed",
            json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta}),
            grid_json.clone(),
            criterion.clone(),
        );
        run(&mut tally, params.zeta, params.alpha, &|t| k.value(t, r, s));
        out.push(tally.finish(None));
    }
    Ok(out)
}

/// sign(η)(p̃ − p) ≥ −MONOTONE_TOL · p at sampled points, for each sign of η.
fn monotonicity(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let params = grid.perturbed_params()?;
    for sign in [1.0, -1.0] {
        let Some(&params) = params.iter().find(|p| p.eta * sign > 0.0) else {
            continue;
        };
        let k = store.perturbed(params)?;
        let mut tally = Tally::new(
            "identities.monotonicity",
            json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta}),
            json!({"points": MONOTONE_POINTS, "seed": grid.seed, "t": "2^U(-3,3)", "r_s": "2^U(-6,6)"}),
            format!("sign(eta) (p_eta - p) / p >= -{MONOTONE_TOL:e}"),
        );
        for i in 0..MONOTONE_POINTS {
            let p = sample_point(grid.seed, STREAM_MONOTONE, i, 3.0, 6.0);
            if let Some(gap) = tally.check(at(p), k.monotonicity_gap(p)) {
                let res = gap / k.free().value(p.t, p.r, p.s);
                tally.residual(at(p), res, res >= -MONOTONE_TOL);
            }
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}
