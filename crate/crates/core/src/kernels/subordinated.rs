//! p_ζ^{(α)}(t,r,s) = ∫₀^∞ p_ζ^{(2)}(τ,r,s) σ_t^{(α/2)}(τ) dτ.
//!
//! With τ = t^{2/α} e^v the stable density becomes σ₁(e^v) e^v dv and the
//! integral is taken over a finite v-window with breakpoints at the Gaussian
//! scale (r−s)², the subordinator bulk v = 0, and the scales rs and (r+s)².

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::heat2::heat2_value;
use super::{EvalPoint, EvalResult, Method};
use crate::error::{ensure, Result};
use crate::quad::{self, Estimate, Tolerance};
use crate::specfun::StableDensity;

/// Evaluates the subordination integral, building the stable density table
/// for this call. [`super::FreeKernel`] keeps the table between calls.
pub fn subordinated_heat(zeta: f64, alpha: f64, point: EvalPoint) -> Result<EvalResult> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    ensure!(alpha > 0.0 && alpha < 2.0, "subordination needs alpha in (0, 2), got {alpha}");
    point.validate()?;
    let stable = StableDensity::new(0.5 * alpha)?;
    let est = subordinate(zeta, &stable, point.t, point.r, point.s, &Tolerance::new(1e-11, 0.0, 600))?;
    Ok(EvalResult {
        value: est.value,
        err_est: est.err,
        method: Method::Subordination,
    })
}

pub(crate) fn subordinate(
    zeta: f64,
    stable: &StableDensity,
    t: f64,
    r: f64,
    s: f64,
    tol: &Tolerance,
) -> Result<Estimate> {
    let beta = stable.beta();
    let big_t = t.powf(1.0 / beta);
    let ln_t = big_t.ln();
    let d = (r - s).abs();
    let mut v_lo = stable.support_floor().ln();
    if d > 0.0 {
        v_lo = v_lo.max((d * d / 3200.0).ln() - ln_t);
    }
    let mut marks = Vec::with_capacity(8);
    if d > 0.0 {
        marks.push((0.25 * d * d).ln() - ln_t);
    }
    marks.push(0.0);
    marks.push((r * s).ln() - ln_t);
    marks.push(((r + s) * (r + s)).ln() - ln_t);
    let top = marks.iter().cloned().fold(0.0, f64::max);
    let rate = (beta + zeta + 0.5).min(beta + 0.5);
    let v_hi = top.max(v_lo) + 42.0 / rate;
    let mut points = Vec::with_capacity(64);
    let n = ((v_hi - v_lo) / 3.0).ceil().max(1.0) as usize;
    for i in 0..=n {
        points.push(v_lo + (v_hi - v_lo) * i as f64 / n as f64);
    }
    for m in marks {
        if m > v_lo && m < v_hi {
            points.push(m);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let f = |v: f64| {
        let u = v.exp();
        let sigma = stable.unit(u);
        if sigma == 0.0 {
            return 0.0;
        }
        heat2_value(zeta, big_t * u, r, s) * sigma * u
    };
    quad::integrate_breaks(f, &points, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::cauchy::cauchy_value;

    #[test]
    fn matches_cauchy_closed_form() {
        let stable = StableDensity::new(0.5).unwrap();
        let tol = Tolerance::new(1e-11, 0.0, 600);
        for &zeta in &[0.0, 1.0, 0.75, -0.25] {
            for &(t, r, s) in &[(1.0, 1.0, 1.0), (0.01, 1.0, 1.3), (10.0, 0.2, 0.05), (1.0, 64.0, 1.0 / 64.0), (0.5, 3.0, 3.0)] {
                let v = subordinate(zeta, &stable, t, r, s, &tol).unwrap().value;
                let c = cauchy_value(zeta, t, r, s).unwrap();
                assert!((v / c - 1.0).abs() < 1e-9, "zeta={zeta} ({t},{r},{s}): {v} vs {c}");
            }
        }
    }

    #[test]
    fn public_entry_point() {
        let p = EvalPoint::new(1.0, 1.0, 1.0).unwrap();
        let v = subordinated_heat(1.0, 1.0, p).unwrap();
        assert_eq!(v.method, Method::Subordination);
        assert!((v.value - 4.0 / (5.0 * core::f64::consts::PI)).abs() < 1e-10);
        assert!(subordinated_heat(1.0, 2.0, p).is_err());
    }
}
