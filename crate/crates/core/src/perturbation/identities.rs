//! Identities and auxiliary integrals of the free kernel that enter the
//! perturbation theory: the compensation identity for η < 0 and the
//! G-integrals bounding the first Duhamel term.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure, Result};
use crate::kernels::FreeKernel;
use crate::quad::{best_effort, integrate_breaks, log_breaks, Tolerance};
use crate::specfun::coupling_psi;

const INNER: Tolerance = Tolerance {
    rel: 1e-10,
    abs: 0.0,
    max_subdivisions: 800,
};
/// Smallest peak width, relative to its position, that quadrature resolves.
const RESOLVABLE: f64 = 1e-8;

const OUTER: Tolerance = Tolerance {
    rel: 1e-9,
    abs: 0.0,
    max_subdivisions: 400,
};

/// ∫₀^t dτ f(τ) for f with a finite limit at τ → 0, integrated in ln τ;
/// `scales` are the times at which f changes behaviour. Below the floor,
/// where spatial peaks of width τ^{1/α} are no longer resolvable, f is
/// taken constant.
pub(crate) fn nested_time_space<F: FnMut(f64) -> f64>(t: f64, alpha: f64, scales: &[f64], mut f: F) -> Result<f64> {
    let top = t.ln();
    let low = scales.iter().fold(top, |m, s| m.min(s.ln()));
    let floor = (low + alpha * RESOLVABLE.ln()).min(top - 1.0);
    let mut pts = vec![floor];
    for &s in scales {
        if s.ln() < top && s.ln() > floor {
            pts.push(s.ln());
        }
    }
    let mut w = floor + 2.0;
    while w < top {
        pts.push(w);
        w += 2.0;
    }
    pts.push(top);
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup_by(|p, q| (*p - *q).abs() < 1e-12);
    let head = floor.exp() * f(floor.exp());
    Ok(head
        + integrate_breaks(
            |u| {
                let tau = u.exp();
                tau * f(tau)
            },
            &pts,
            &OUTER,
        )?
        .value)
}

/// ∫₀^∞ ds s^{2ζ−β} p_ζ(τ,r,s).
pub(crate) fn power_moment(k: &FreeKernel, tau: f64, r: f64, beta: f64) -> Result<f64> {
    let (zeta, alpha) = (k.zeta(), k.alpha());
    let width = tau.powf(1.0 / alpha);
    let e_hi = if alpha == 2.0 { 4.0 } else { alpha + beta };
    let pts = log_breaks(&[r, width], &[(r, width)], 2.0 * zeta + 1.0 - beta, e_hi);
    Ok(best_effort(integrate_breaks(
        |w| {
            let s = w.exp();
            s.powf(2.0 * zeta + 1.0 - beta) * k.value(tau, r, s)
        },
        &pts,
        &INNER,
    ))?
    .value)
}

/// Residual of the compensation identity for η ∈ (−α, 0):
/// ∫ s^{2ζ} p_ζ(t,r,s) s^{−η} ds − r^{−η} + Ψ_ζ(η) ∫₀^t dτ ∫ s^{2ζ} p_ζ(τ,r,s) s^{−η−α} ds.
pub fn compensation_residual(zeta: f64, alpha: f64, eta: f64, t: f64, r: f64) -> Result<f64> {
    ensure!(alpha > 0.0 && alpha <= 2.0, "alpha = {alpha} must lie in (0, 2]");
    ensure!(eta > -alpha && eta < 0.0, "the identity is stated for eta in (-alpha, 0), got {eta}");
    ensure!(t > 0.0 && r > 0.0, "t and r must be positive");
    let k = FreeKernel::new(zeta, alpha)?;
    let psi = coupling_psi(zeta, alpha, eta)?;
    let at_t = power_moment(&k, t, r, eta)?;
    let mut err = None;
    let integrated = nested_time_space(t, alpha, &[r.powf(alpha)], |tau| match power_moment(&k, tau, r, eta + alpha) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let integrated = integrated?;
    Ok(at_t - r.powf(-eta) + psi * integrated)
}

/// The iterated integrals (G_η(t,r,s), G̃(t,r,s)):
/// G_η = ∫₀^t dτ ∫₀^∞ dz z^{2ζ−α−η} ((r+s+z)/(s+z))^{2ζ} p_ζ(τ,r,z),
/// G̃ = ∫₀^t dτ ∫₀^s dz z^{2ζ−α} ((t^{1/α}+r+s)/((t−τ)^{1/α}+z+s))^{2ζ} p_ζ(τ,r,z).
pub fn g_integrals(zeta: f64, alpha: f64, eta: f64, t: f64, r: f64, s: f64) -> Result<(f64, f64)> {
    ensure!(alpha > 0.0 && alpha < 2.0, "alpha = {alpha} must lie in (0, 2)");
    ensure!(
        eta > -alpha && eta < 2.0 * zeta + 1.0 - alpha,
        "eta = {eta} must lie in (-alpha, 2 zeta + 1 - alpha)"
    );
    ensure!(t > 0.0 && r > 0.0 && s > 0.0, "t, r, s must be positive");
    let k = FreeKernel::new(zeta, alpha)?;
    let tl = t.powf(1.0 / alpha);
    let mut err = None;
    let mut record = |res: Result<f64>| match res {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let scales = [r.powf(alpha), s.powf(alpha)];
    let g_eta = nested_time_space(t, alpha, &scales, |tau| {
        let width = tau.powf(1.0 / alpha);
        let pts = log_breaks(&[r, s, width], &[(r, width)], 2.0 * zeta + 1.0 - alpha - eta, 2.0 * alpha + eta);
        record(
            best_effort(integrate_breaks(
                |w| {
                    let z = w.exp();
                    z.powf(2.0 * zeta + 1.0 - alpha - eta) * ((r + s + z) / (s + z)).powf(2.0 * zeta) * k.value(tau, r, z)
                },
                &pts,
                &INNER,
            ))
            .map(|e| e.value),
        )
    });
    let g_tilde = nested_time_space(t, alpha, &scales, |tau| {
        let width = tau.powf(1.0 / alpha);
        let rest = (t - tau).max(0.0).powf(1.0 / alpha);
        let mut pts: Vec<f64> = log_breaks(&[r, width], &[(r, width)], 2.0 * zeta + 1.0 - alpha, 1.0)
            .into_iter()
            .filter(|&w| w < s.ln())
            .collect();
        pts.push(s.ln());
        record(
            best_effort(integrate_breaks(
                |w| {
                    let z = w.exp();
                    z.powf(2.0 * zeta + 1.0 - alpha) * ((tl + r + s) / (rest + z + s)).powf(2.0 * zeta) * k.value(tau, r, z)
                },
                &pts,
                &INNER,
            ))
            .map(|e| e.value),
        )
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((g_eta?, g_tilde?))
}
