//! Nonlocal quadratic forms on radial test functions: the Dirichlet form ℰ_ζ,
//! the ground-state form ℐ_{ζ,η}, their semigroup approximations and the
//! Hardy potential term.
//!
//! Both double-integral forms carry the factor 1/2:
//!
//!   ℰ_ζ[u]     = (1/2) ∬ |u(r) − u(s)|² ν_ζ(r,s) (rs)^{2ζ} dr ds,
//!   ℐ_{ζ,η}[u] = (1/2) ∬ ν_ζ(r,s) |u/h(r) − u/h(s)|² h(r) h(s) (rs)^{2ζ} dr ds,
//!
//! with h(r) = r^{−η}, so that ℐ_{ζ,0} = ℰ_ζ and ℰ_ζ is the t → 0 limit of
//! (1/t)⟨u, (1 − P_t) u⟩.

mod nonlocal;
mod test_function;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub use test_function::{bump_suite, Interpolation, TestFunction};

use crate::error::{ensure, Result};
use crate::kernels::FreeKernel;
use crate::params::CouplingParams;
use crate::perturbation::{nested_time_space, power_moment, PerturbedKernel, SeriesControl};
use crate::quad::{best_effort, integrate_breaks, Tolerance};
use nonlocal::Weighted;

/// A form value with an absolute error estimate and, for the double-integral
/// forms, its split into the [a,b]² block and the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FormValue {
    pub value: f64,
    pub err_est: f64,
    pub decomposition: Option<(f64, f64)>,
}

impl FormValue {
    fn plain(value: f64, err_est: f64) -> Self {
        FormValue {
            value,
            err_est,
            decomposition: None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    ensure!(
        alpha > 0.0 && alpha < 2.0,
        "the nonlocal forms need alpha in (0, 2), got {alpha} (alpha = 2 is a local form)"
    );
    Ok(())
}

fn weighted(zeta: f64, alpha: f64, p: f64, g: &dyn Fn(f64) -> (f64, f64), u: &TestFunction) -> Result<FormValue> {
    let w = Weighted {
        zeta,
        alpha,
        p,
        g,
        kinks: u.breakpoints(),
    };
    let b = w.evaluate()?;
    Ok(FormValue {
        value: b.diagonal.0 + b.off_diagonal.0,
        err_est: b.diagonal.1 + b.off_diagonal.1,
        decomposition: Some((b.diagonal.0, b.off_diagonal.0)),
    })
}

/// ℰ_ζ[u].
pub fn dirichlet_form(zeta: f64, alpha: f64, u: &TestFunction) -> Result<FormValue> {
    check_alpha(alpha)?;
    ensure!(zeta > -0.5, "zeta = {zeta} must exceed -1/2");
    u.validate()?;
    weighted(zeta, alpha, 0.0, &|r| u.eval(r), u)
}

/// ℐ_{ζ,η}[u], computed as the weighted form of g = u·r^η with weight r^{−η}.
pub fn hardy_form(params: CouplingParams, u: &TestFunction) -> Result<FormValue> {
    CouplingParams::new(params.zeta, params.alpha, params.eta)?;
    check_alpha(params.alpha)?;
    u.validate()?;
    let eta = params.eta;
    if eta == 0.0 {
        return weighted(params.zeta, params.alpha, 0.0, &|r| u.eval(r), u);
    }
    let g = |r: f64| {
        let (v, d) = u.eval(r);
        let w = r.powf(eta);
        (v * w, d * w + eta * v * w / r)
    };
    weighted(params.zeta, params.alpha, eta, &g, u)
}

/// ∫ |u(r)|² r^{2ζ−α} dr.
pub fn potential_term(zeta: f64, alpha: f64, u: &TestFunction) -> Result<FormValue> {
    u.validate()?;
    let pts = u.breakpoints();
    let e = best_effort(integrate_breaks(
        |r| {
            let v = u.value(r);
            v * v * r.powf(2.0 * zeta - alpha)
        },
        &pts,
        &Tolerance::rel(1e-12),
    ))?;
    Ok(FormValue::plain(e.value, e.err))
}

/// ℰ_ζ[u] − ℐ_{ζ,η}[u] − Ψ_ζ(η) ∫ |u|² r^{2ζ−α} dr.
pub fn gsr_residual(params: CouplingParams, u: &TestFunction) -> Result<f64> {
    Ok(gsr_terms(params, u)?.residual)
}

/// The three terms of the ground-state representation and their residual.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GsrTerms {
    pub dirichlet: FormValue,
    pub hardy: FormValue,
    pub potential: FormValue,
    pub residual: f64,
    /// Combined quadrature error of the three terms.
    pub err_est: f64,
}

pub fn gsr_terms(params: CouplingParams, u: &TestFunction) -> Result<GsrTerms> {
    let dirichlet = dirichlet_form(params.zeta, params.alpha, u)?;
    let hardy = hardy_form(params, u)?;
    let potential = potential_term(params.zeta, params.alpha, u)?;
    let residual = dirichlet.value - hardy.value - params.kappa * potential.value;
    Ok(GsrTerms {
        dirichlet,
        hardy,
        potential,
        residual,
        err_est: dirichlet.err_est + hardy.err_est + params.kappa.abs() * potential.err_est,
    })
}

/// ℰ_ζ[u] − κ ∫ |u|² r^{2ζ−α} dr; nonnegative for all u iff κ ≤ κ_c.
pub fn hardy_excess(zeta: f64, alpha: f64, kappa: f64, u: &TestFunction) -> Result<FormValue> {
    let e = dirichlet_form(zeta, alpha, u)?;
    let v = potential_term(zeta, alpha, u)?;
    Ok(FormValue {
        value: e.value - kappa * v.value,
        err_est: e.err_est + kappa.abs() * v.err_est,
        decomposition: None,
    })
}

/// ℰ_{ζ,η}(t)[u] = (1/t) ⟨u, (1 − P_t) u⟩ in L²(r^{2ζ} dr). Builds the
/// perturbed kernel for this call; see [`semigroup_form_with`] to reuse one.
pub fn semigroup_form(params: CouplingParams, t: f64, u: &TestFunction) -> Result<FormValue> {
    let k = PerturbedKernel::new(params, SeriesControl::default())?;
    semigroup_form_with(&k, t, u)
}

pub fn semigroup_form_with(kernel: &PerturbedKernel, t: f64, u: &TestFunction) -> Result<FormValue> {
    ensure!(t > 0.0 && t.is_finite(), "t = {t} must be positive");
    u.validate()?;
    let params = kernel.params();
    let two_zeta = 2.0 * params.zeta;
    let free = FreeKernel::new(params.zeta, params.alpha)?;
    let p = |r: f64, s: f64| if params.eta == 0.0 { free.value(t, r, s) } else { kernel.value(t, r, s) };
    let kinks = u.breakpoints();
    let (a, b) = u.support();
    let width = t.powf(1.0 / params.alpha);
    let tol = Tolerance::rel(1e-11).with_max_subdivisions(400);
    let norm = best_effort(integrate_breaks(
        |r| {
            let v = u.value(r);
            v * v * r.powf(two_zeta)
        },
        &kinks,
        &tol,
    ))?;
    let mut inner_err = 0.0f64;
    let cross = best_effort(integrate_breaks(
        |r| {
            let ur = u.value(r);
            if ur == 0.0 {
                return 0.0;
            }
            let mut pts: Vec<f64> = kinks.clone();
            for f in [0.25, 1.0, 4.0] {
                for s in [r - f * width, r + f * width] {
                    if s > a && s < b {
                        pts.push(s);
                    }
                }
            }
            if r > a && r < b {
                pts.push(r);
            }
            pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            pts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
            match best_effort(integrate_breaks(|s| u.value(s) * s.powf(two_zeta) * p(r, s), &pts, &tol)) {
                Ok(e) => {
                    inner_err += e.err * (ur * r.powf(two_zeta)).abs();
                    ur * r.powf(two_zeta) * e.value
                }
                Err(_) => f64::NAN,
            }
        },
        &kinks,
        &tol,
    ))?;
    ensure!(cross.value.is_finite(), "semigroup pairing did not evaluate");
    let value = (norm.value - cross.value) / t;
    // the kernel's own relative accuracy enters through the pairing
    let kernel_rel = if params.eta == 0.0 { 1e-13 } else { kernel.control().tail_tol };
    let err = (norm.err + cross.err + inner_err * (b - a) + kernel_rel * cross.value.abs()) / t;
    Ok(FormValue::plain(value, err))
}

/// ∫₀^t dτ ∫₀^∞ p_ζ(τ,r,s) s^{2ζ−δ} ds.
pub fn integral_regimes(zeta: f64, alpha: f64, delta: f64, t: f64, r: f64) -> Result<f64> {
    ensure!(alpha > 0.0 && alpha <= 2.0, "alpha = {alpha} must lie in (0, 2]");
    ensure!(delta > 0.0 && delta < 2.0 * zeta + 1.0, "delta = {delta} must lie in (0, 2 zeta + 1)");
    ensure!(t > 0.0 && r > 0.0 && t.is_finite() && r.is_finite(), "t and r must be positive");
    let k = FreeKernel::new(zeta, alpha)?;
    let mut err = None;
    let v = nested_time_space(t, alpha, &[r.powf(alpha)], |tau| match power_moment(&k, tau, r, delta) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    v
}

/// The three-regime comparison function: t (r^α ∨ t)^{−δ/α} for δ < α,
/// ln(1 + t/r^α) for δ = α, r^{−δ}(t ∧ r^α) for δ > α.
pub fn regime_prediction(alpha: f64, delta: f64, t: f64, r: f64) -> f64 {
    let ra = r.powf(alpha);
    if delta < alpha {
        t * ra.max(t).powf(-delta / alpha)
    } else if delta == alpha {
        (t / ra).ln_1p()
    } else {
        r.powf(-delta) * t.min(ra)
    }
}
