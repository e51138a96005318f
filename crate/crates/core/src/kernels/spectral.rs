//! Hankel-transform representation of the kernel, used as an independent
//! check of the other evaluators:
//! p_ζ^{(α)}(t,r,s) = (rs)^{1/2−ζ} ∫₀^∞ e^{−t k^α} J_{ζ−1/2}(kr) J_{ζ−1/2}(ks) k dk.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{EvalPoint, EvalResult, Method};
use crate::error::{ensure, Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::j;

/// Largest number of oscillation segments before giving up.
const MAX_SEGMENTS: usize = 400_000;

pub fn spectral_heat(zeta: f64, alpha: f64, point: EvalPoint) -> Result<EvalResult> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    ensure!(alpha > 0.0 && alpha <= 2.0, "alpha = {alpha} must lie in (0, 2]");
    point.validate()?;
    let EvalPoint { t, r, s } = point;
    let nu = zeta - 0.5;
    // e^{−t K^α} = e^{−45}: beyond K the tail is below double precision.
    let k_max = (45.0 / t).powf(1.0 / alpha);
    let step = PI / r.max(s);
    let n = (k_max / step).ceil() as usize;
    if n > MAX_SEGMENTS {
        return Err(Error::Convergence(alloc::format!(
            "spectral integral needs {n} oscillation segments; reduce t^(-1/alpha) * max(r, s)"
        )));
    }
    // near k = 0 the integrand behaves like k^{2ζ}; a few geometric points
    // resolve that before the uniform oscillation grid takes over
    let mut points = Vec::with_capacity(n + 8);
    points.push(0.0);
    for e in (1..=6).rev() {
        points.push(step * 0.25f64.powi(e));
    }
    for i in 1..=n {
        points.push((i as f64 * step).min(k_max));
    }
    points.dedup();
    let f = |k: f64| {
        if k == 0.0 {
            return 0.0;
        }
        (-t * k.powf(alpha)).exp() * j(nu, k * r) * j(nu, k * s) * k
    };
    let tol = Tolerance::new(1e-13, 0.0, 2 * points.len() + 400);
    let est = quad::best_effort(quad::integrate_breaks(f, &points, &tol))?;
    let pref = (r * s).powf(-nu);
    Ok(EvalResult {
        value: pref * est.value,
        err_est: pref * est.err,
        method: Method::Spectral,
    })
}
