//! The Lévy kernel ν_ζ(r,s) = lim_{t→0} p_ζ^{(α)}(t,r,s)/t:
//!
//! ν_ζ = 2^{1+α} Γ(α/2+1) sin(πα/2)/π · Γ(ζ+α/2+1/2) · (r²+s²)^{−(ζ+α/2+1/2)}
//!       · ₂F̃₁(A, A+1/2; ζ+1/2; 4r²s²/(r²+s²)²),   A = (ζ+α/2+1/2)/2.
//!
//! Near the diagonal the hypergeometric argument tends to 1; its complement
//! ((r−s)(r+s)/(r²+s²))² is formed from the difference directly, so the
//! evaluation stays accurate up to r = s.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure, Result};
use crate::specfun::{hyp2f1_regularized_split, sin_pi};

pub fn levy_kernel(zeta: f64, alpha: f64, r: f64, s: f64) -> Result<f64> {
    check(zeta, alpha, r, s)?;
    ensure!(r != s, "the Lévy kernel is singular on the diagonal r = s = {r}");
    levy_value(zeta, alpha, r, s, s - r)
}

/// ν_ζ(r, r+h) with the offset h supplied exactly (h ≠ 0, r + h > 0).
pub fn levy_kernel_offset(zeta: f64, alpha: f64, r: f64, h: f64) -> Result<f64> {
    let s = r + h;
    check(zeta, alpha, r, s)?;
    ensure!(h != 0.0, "the Lévy kernel is singular on the diagonal");
    levy_value(zeta, alpha, r, s, h)
}

fn check(zeta: f64, alpha: f64, r: f64, s: f64) -> Result<()> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    ensure!(alpha > 0.0 && alpha < 2.0, "the Lévy kernel needs alpha in (0, 2), got {alpha}");
    ensure!(r > 0.0 && s > 0.0 && r.is_finite() && s.is_finite(), "radii must be positive, got ({r}, {s})");
    Ok(())
}

/// Prefactor 2^{1+α} Γ(α/2+1) sin(πα/2)/π · Γ(ζ+α/2+1/2).
pub(crate) fn levy_constant(zeta: f64, alpha: f64) -> f64 {
    (1.0 + alpha).exp2() * libm::tgamma(0.5 * alpha + 1.0) * sin_pi(0.5 * alpha) / core::f64::consts::PI
        * libm::tgamma(zeta + 0.5 * alpha + 0.5)
}

pub(crate) fn levy_value(zeta: f64, alpha: f64, r: f64, s: f64, h: f64) -> Result<f64> {
    let e = zeta + 0.5 * alpha + 0.5;
    let a = 0.5 * e;
    let q = r * r + s * s;
    let z = 4.0 * (r * s) * (r * s) / (q * q);
    let c = h.abs() * (r + s) / q;
    let w = c * c;
    let f = hyp2f1_regularized_split(a, a + 0.5, zeta + 0.5, z.min(1.0), w)?;
    Ok(levy_constant(zeta, alpha) * q.powf(-e) * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn zeta_zero_alpha_one_closed_form() {
        let v = levy_kernel(0.0, 1.0, 1.0, 2.0).unwrap();
        let exact = (1.0 + 1.0 / 9.0) / PI;
        assert!((v - exact).abs() < 1e-14);
        assert!((v - 0.3536776).abs() < 1e-7);
        for &(r, s) in &[(0.3, 0.31), (5.0, 0.1), (1.0, 1.0 + 1e-7)] {
            let d: f64 = r - s;
            let e: f64 = r + s;
            let exact = (d.powi(-2) + e.powi(-2)) / PI;
            let v = levy_kernel(0.0, 1.0, r, s).unwrap();
            assert!((v / exact - 1.0).abs() < 1e-9, "({r},{s}): {v} vs {exact}");
        }
    }

    #[test]
    fn symmetric_and_homogeneous() {
        for &(zeta, alpha) in &[(0.5, 0.5), (1.0, 1.0), (2.0, 1.5), (-0.25, 0.7)] {
            let (r, s) = (0.7, 1.9);
            let a = levy_kernel(zeta, alpha, r, s).unwrap();
            let b = levy_kernel(zeta, alpha, s, r).unwrap();
            assert!((a / b - 1.0).abs() < 1e-14);
            // degree −(2ζ+1+α)
            let l: f64 = 3.0;
            let c = levy_kernel(zeta, alpha, l * r, l * s).unwrap();
            assert!((c / (a * l.powf(-(2.0 * zeta + 1.0 + alpha))) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn comparable_to_singular_profile() {
        for &zeta in &[0.5, 1.0, 2.0] {
            for &alpha in &[0.5, 1.0, 1.5] {
                let mut lo = f64::INFINITY;
                let mut hi: f64 = 0.0;
                for i in 0..20 {
                    for j in 0..20 {
                        if i == j {
                            continue;
                        }
                        let r = (0.35 * i as f64 - 3.0).exp();
                        let s = (0.35 * j as f64 - 3.0).exp();
                        let v = levy_kernel(zeta, alpha, r, s).unwrap();
                        let ratio = v * (r + s).powf(2.0 * zeta) * (r - s).abs().powf(1.0 + alpha);
                        lo = lo.min(ratio);
                        hi = hi.max(ratio);
                    }
                }
                assert!(lo > 0.0 && hi < f64::INFINITY && hi / lo < 1e3, "zeta={zeta} alpha={alpha}: [{lo},{hi}]");
            }
        }
    }

    #[test]
    fn offset_form_reaches_the_diagonal() {
        // ν(r, r+h) |h|^{1+α} (2r)^{2ζ} tends to a constant as h → 0
        let (zeta, alpha, r) = (1.0, 1.0, 1.0);
        let a = levy_kernel_offset(zeta, alpha, r, 1e-6).unwrap() * 1e-12 * 4.0;
        let b = levy_kernel_offset(zeta, alpha, r, 1e-9).unwrap() * 1e-18 * 4.0;
        assert!((a / b - 1.0).abs() < 1e-5, "{a} vs {b}");
        assert!(levy_kernel(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(levy_kernel(1.0, 2.0, 1.0, 2.0).is_err());
    }
}
