//! Quadratic-form checks: the ground-state representation, sharpness of the
//! Hardy inequality and the semigroup approximation of the forms.

use serde_json::json;

use hardyheat_core::forms::{bump_suite, dirichlet_form, gsr_terms, hardy_excess, hardy_form, semigroup_form_with, TestFunction};
use hardyheat_core::{CouplingParams, PerturbedKernel, SeriesControl};

use crate::error::Result;
use crate::grid::GridSpec;
use crate::report::{CheckReport, Tally};
use crate::store::KernelStore;

const GSR_ETAS: [f64; 2] = [-0.5, 0.5];
const GSR_TOL: f64 = 1e-4;
/// Potential strength of the witness, as a multiple of κ_c.
const WITNESS_FACTOR: f64 = 1.05;
/// Log-width of the witness r^{−η_c}·bump(ln r).
const WITNESS_LOG_WIDTH: f64 = 16.0;
const MONOTONE_TIMES: [f64; 3] = [0.5, 0.25, 0.125];
const LIMIT_TIMES: [f64; 3] = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
const LIMIT_TOL: f64 = 1e-3;

pub fn check_forms(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let suite = bump_suite();
    let suite_json = json!(suite.iter().map(describe).collect::<Vec<_>>());
    for &[zeta, alpha] in &grid.perturbed {
        if alpha >= 2.0 {
            continue;
        }
        out.extend(ground_state(zeta, alpha, &suite, &suite_json)?);
        out.push(sharpness(zeta, alpha, &suite, &suite_json)?);
        out.extend(semigroup(zeta, alpha, grid, store)?);
    }
    Ok(out)
}

fn describe(u: &TestFunction) -> serde_json::Value {
    match u {
        TestFunction::SmoothBump { center, width, .. } => json!({"center": center, "width": width}),
        other => json!(format!("{other:?}")),
    }
}

/// |ℰ_ζ[u] − ℐ_{ζ,η}[u] − Ψ_ζ(η) ∫|u|² r^{2ζ−α}| ≤ GSR_TOL·ℰ_ζ[u].
fn ground_state(zeta: f64, alpha: f64, suite: &[TestFunction], suite_json: &serde_json::Value) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for eta in GSR_ETAS {
        let params = CouplingParams::new(zeta, alpha, eta)?;
        let mut tally = Tally::new(
            "forms.ground_state_representation",
            json!({"zeta": zeta, "alpha": alpha, "eta": eta, "kappa": params.kappa}),
            json!({"test_functions": suite_json}),
            format!("|E[u] - I[u] - kappa * potential[u]| <= {GSR_TOL:e} E[u]"),
        );
        for u in suite {
            let at = describe(u);
            if let Some(g) = tally.check(&at, gsr_terms(params, u)) {
                let res = g.residual / g.dirichlet.value;
                tally.residual(&at, res, res.abs() <= GSR_TOL);
            }
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}

/// ℰ_ζ[u] − κ_c ∫|u|² r^{2ζ−α} ≥ 0 on the suite, and a function on which
/// it turns negative at WITNESS_FACTOR·κ_c.
fn sharpness(zeta: f64, alpha: f64, suite: &[TestFunction], suite_json: &serde_json::Value) -> Result<CheckReport> {
    let free = CouplingParams::free(zeta, alpha)?;
    let kc = free.kappa_crit();
    let eta_c = free.critical_eta();
    let mut tally = Tally::new(
        "forms.hardy_sharpness",
        json!({"zeta": zeta, "alpha": alpha, "kappa_crit": kc}),
        json!({"test_functions": suite_json, "witness": {"log_width": WITNESS_LOG_WIDTH, "power": eta_c}}),
        format!("E[u] - kappa_c potential[u] >= -err on the suite; < 0 at {WITNESS_FACTOR} kappa_c for the witness"),
    );
    for u in suite {
        let at = describe(u);
        if let Some(x) = tally.check(&at, hardy_excess(zeta, alpha, kc, u)) {
            tally.residual(&at, x.value, x.value >= -x.err_est);
        }
    }
    let witness = TestFunction::log_bump(1.0, WITNESS_LOG_WIDTH, eta_c)?;
    if let Some(x) = tally.check("witness", hardy_excess(zeta, alpha, WITNESS_FACTOR * kc, &witness)) {
        if x.value + x.err_est >= 0.0 {
            tally.fail(format!("witness excess {:e} (err {:e}) is not negative", x.value, x.err_est));
        }
    }
    Ok(tally.finish(None))
}

fn richardson(e: [f64; 3]) -> f64 {
    let r1 = 2.0 * e[1] - e[0];
    let r2 = 2.0 * e[2] - e[1];
    (4.0 * r2 - r1) / 3.0
}

/// (1/t)⟨u, (1 − P_t)u⟩ increases as t decreases, and its extrapolated limit
/// is the Dirichlet form (η = 0) or the ground-state form (η > 0).
fn semigroup(zeta: f64, alpha: f64, grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let u = TestFunction::smooth_bump(1.0, 1.0, 1.0)?;
    let mut params = vec![CouplingParams::free(zeta, alpha)?];
    params.extend(grid.perturbed_params()?.into_iter().filter(|p| p.zeta == zeta && p.alpha == alpha && p.eta > 0.0));
    for params in params {
        let kernel = if params.eta == 0.0 {
            std::sync::Arc::new(PerturbedKernel::new(params, SeriesControl::default())?)
        } else {
            store.perturbed(params)?
        };
        let mut tally = Tally::new(
            "forms.semigroup_limit",
            json!({"zeta": zeta, "alpha": alpha, "eta": params.eta}),
            json!({"test_function": describe(&u), "monotone_t": MONOTONE_TIMES, "extrapolation_t": LIMIT_TIMES}),
            format!("nondecreasing as t decreases; Richardson limit within {LIMIT_TOL:e} of the form"),
        );
        let mut at = |t: f64| tally_value(&mut tally, t, semigroup_form_with(&kernel, t, &u));
        let mono = MONOTONE_TIMES.map(&mut at);
        let tail = LIMIT_TIMES.map(&mut at);
        if mono.iter().chain(&tail).all(|v| v.is_finite()) {
            for i in 1..mono.len() {
                if mono[i] < mono[i - 1] {
                    tally.fail(format!("form decreases from {:e} to {:e} at t = {}", mono[i - 1], mono[i], MONOTONE_TIMES[i]));
                }
            }
            let limit = if params.eta == 0.0 { dirichlet_form(zeta, alpha, &u) } else { hardy_form(params, &u) };
            if let Some(limit) = tally.check("limit form", limit) {
                let res = richardson(tail) / limit.value - 1.0;
                tally.residual("richardson limit", res, res.abs() <= LIMIT_TOL);
            }
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}

fn tally_value(tally: &mut Tally, t: f64, v: hardyheat_core::Result<hardyheat_core::forms::FormValue>) -> f64 {
    tally.check(format!("t={t}"), v).map_or(f64::NAN, |f| f.value)
}
