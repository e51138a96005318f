//! Closed form of the α = 1 kernel:
//! p_ζ^{(1)}(t,r,s) = (2Γ(ζ+1)/√π) · t/R^{ζ+1} · ₂F̃₁((ζ+1)/2, (ζ+2)/2; ζ+1/2; 4r²s²/R²),
//! R = r² + s² + t².
//!
//! The upper parameters are (ζ+1)/2 and (ζ+2)/2: with these the formula
//! reduces to the rational kernels at ζ = 0 (reflected Cauchy) and ζ = 1, and
//! its t → 0 limit reproduces the Lévy kernel at α = 1. Writing them as ζ+1
//! and ζ+2 matches neither.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{EvalPoint, EvalResult, Method};
use crate::error::{ensure, Result};
use crate::specfun::hyp2f1_regularized_split;

pub fn cauchy_heat_closed(zeta: f64, point: EvalPoint) -> Result<EvalResult> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    point.validate()?;
    let v = cauchy_value(zeta, point.t, point.r, point.s)?;
    let err = if zeta == 0.0 || zeta == 1.0 { 8.0 } else { 1e3 } * f64::EPSILON * v;
    Ok(EvalResult {
        value: v,
        err_est: err,
        method: Method::ClosedAlpha1,
    })
}

pub(crate) fn cauchy_value(zeta: f64, t: f64, r: f64, s: f64) -> Result<f64> {
    let big_r = r * r + s * s + t * t;
    let dm = r - s;
    let dp = r + s;
    // R² − 4r²s² = ((r−s)² + t²)((r+s)² + t²), free of cancellation
    let den = (dm * dm + t * t) * (dp * dp + t * t);
    if zeta == 0.0 {
        return Ok(2.0 * t * big_r / (PI * den));
    }
    if zeta == 1.0 {
        return Ok(4.0 / PI * t / den);
    }
    let z = 4.0 * (r * s) * (r * s) / (big_r * big_r);
    let w = (den / (big_r * big_r)).min(1.0);
    let f = hyp2f1_regularized_split(0.5 * (zeta + 1.0), 0.5 * (zeta + 2.0), zeta + 0.5, z.min(1.0), w)?;
    let lead = 2.0 * libm::tgamma(zeta + 1.0) / PI.sqrt();
    Ok(lead * t * big_r.powf(-(zeta + 1.0)) * f)
}
