//! The Bessel heat kernel
//! p_ζ^{(2)}(t,r,s) = (rs)^{1/2−ζ}/(2t) · e^{−(r²+s²)/(4t)} · I_{ζ−1/2}(rs/(2t)).

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{EvalPoint, EvalResult, Method};
use crate::error::{ensure, Result};
use crate::specfun::{i_scaled, rgamma};

pub fn bessel_heat_2(zeta: f64, point: EvalPoint) -> Result<EvalResult> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    point.validate()?;
    let v = heat2_value(zeta, point.t, point.r, point.s);
    Ok(EvalResult::closed(v, Method::ClosedAlpha2))
}

/// Unchecked evaluation for inner loops.
pub(crate) fn heat2_value(zeta: f64, t: f64, r: f64, s: f64) -> f64 {
    let d = r - s;
    let gauss = (-d * d / (4.0 * t)).exp();
    if zeta == 0.0 {
        let e = r + s;
        return (4.0 * PI * t).powf(-0.5) * (gauss + (-e * e / (4.0 * t)).exp());
    }
    let rs = r * s;
    if zeta == 1.0 {
        return (4.0 * PI * t).powf(-0.5) * gauss * -(-rs / t).exp_m1() / rs;
    }
    let nu = zeta - 0.5;
    let x = rs / (2.0 * t);
    if x < 1.0 {
        // (4t)^{−ν}/(2t) · e^{−(r²+s²)/(4t)} · Σ (x²/4)^k / (k! Γ(k+ν+1))
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * (nu + k));
            sum += term;
            k += 1.0;
        }
        let gauss_full = (-(r * r + s * s) / (4.0 * t)).exp();
        return (4.0 * t).powf(-nu) / (2.0 * t) * gauss_full * rgamma(nu + 1.0) * sum;
    }
    rs.powf(-nu) / (2.0 * t) * gauss * i_scaled(nu, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_breaks, Tolerance};

    #[test]
    fn reflected_gaussian_at_zeta_zero() {
        let v = bessel_heat_2(0.0, EvalPoint::new(1.0, 1.0, 1.0).unwrap()).unwrap().value;
        let exact = (4.0 * PI).powf(-0.5) * (1.0 + (-1f64).exp());
        assert!((v - exact).abs() < 1e-15);
    }

    #[test]
    fn closed_branches_match_bessel_formula() {
        // ζ = 0 and ζ = 1 shortcuts vs the general Bessel expression
        for &zeta in &[0.0f64, 1.0] {
            for &(t, r, s) in &[(1.0, 1.0, 1.0), (0.3, 2.0, 0.5), (5.0, 0.1, 0.2), (0.01, 3.0, 3.05)] {
                let nu = zeta - 0.5;
                let x = r * s / (2.0 * t);
                let general = (r * s).powf(-nu) / (2.0 * t) * (-(r - s) * (r - s) / (4.0 * t)).exp() * i_scaled(nu, x);
                let fast = heat2_value(zeta, t, r, s);
                assert!((fast / general - 1.0).abs() < 1e-13, "zeta={zeta} ({t},{r},{s})");
            }
        }
    }

    #[test]
    fn small_argument_series_is_continuous() {
        for &zeta in &[-0.25, 0.75, 2.5] {
            let t = 0.5;
            let below = heat2_value(zeta, t, 1.0, 1.0 - 1e-12);
            let above = heat2_value(zeta, t, 1.0, 1.0 + 1e-12);
            assert!((below / above - 1.0).abs() < 1e-11, "zeta={zeta}");
        }
    }

    #[test]
    fn normalization() {
        for &zeta in &[0.0, 0.75, 1.0, 2.5, -0.25] {
            let f = |v: f64| {
                let s = v.exp();
                heat2_value(zeta, 1.0, 1.0, s) * s.powf(2.0 * zeta) * s
            };
            let pts: alloc::vec::Vec<f64> = (-100..=5).map(|k| 2.0 * k as f64).collect();
            let m = integrate_breaks(f, &pts, &Tolerance::rel(1e-13)).unwrap().value;
            assert!((m - 1.0).abs() < 1e-10, "zeta={zeta}: {m}");
        }
    }

    #[test]
    fn symmetric_in_r_and_s() {
        for i in 0..50 {
            let r = 0.1 + 0.37 * i as f64;
            let s = 5.0 / (1.0 + i as f64);
            for &zeta in &[0.3, 1.0, 4.0] {
                assert_eq!(heat2_value(zeta, 0.7, r, s), heat2_value(zeta, 0.7, s, r));
            }
        }
    }
}
