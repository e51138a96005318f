//! Coupling constants of the Hardy potential κ/r^α and their inverse.


#[allow(unused_imports)]
use num_traits::Float;

use super::gamma::rgamma;
use crate::error::{ensure, Result};

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Ψ_ζ(η) = 2^α Γ((2ζ+1−η)/2) Γ((α+η)/2) / (Γ(η/2) Γ((2ζ+1−η−α)/2)).
///
/// The denominator enters through 1/Γ, so Ψ vanishes exactly at η = 0 and
/// η = 2ζ+1−α. For α = 2 this is the polynomial η(2ζ−1−η).
pub fn coupling_psi(zeta: f64, alpha: f64, eta: f64) -> Result<f64> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    ensure!(
        alpha > 0.0 && alpha <= 2.0 && alpha < 2.0 * zeta + 1.0,
        "alpha = {alpha} must lie in (0, 2] and below 2*zeta+1 = {}",
        2.0 * zeta + 1.0
    );
    ensure!(eta.is_finite(), "eta must be finite");
    if alpha == 2.0 {
        return Ok(eta * (2.0 * zeta - 1.0 - eta));
    }
    let d = 2.0 * zeta + 1.0;
    ensure!(
        eta > -alpha && eta < d,
        "eta = {eta} outside ({}, {d}) where the coupling is defined",
        -alpha
    );
    let (n1, n2) = (0.5 * (d - eta), 0.5 * (alpha + eta));
    ensure!(!is_pole(n1) && !is_pole(n2), "eta = {eta} hits a pole of the numerator");
    let r = rgamma(0.5 * eta) * rgamma(0.5 * (d - eta - alpha));
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(alpha.exp2() * libm::tgamma(n1) * libm::tgamma(n2) * r)
}

/// Φ_{d_ℓ}^{(α)}(η) = 2^α Γ((η+α)/2) Γ((d_ℓ−η)/2) / (Γ(η/2) Γ((d_ℓ−η−α)/2)),
/// evaluated through signed log-Gamma values; exactly η(d_ℓ−η−2) for α = 2.
pub fn coupling_phi(d_ell: f64, alpha: f64, eta: f64) -> Result<f64> {
    ensure!(d_ell > 0.0 && d_ell.is_finite(), "effective dimension {d_ell} must be positive");
    ensure!(
        alpha > 0.0 && alpha <= 2.0 && alpha < d_ell,
        "alpha = {alpha} must lie in (0, 2] and below d_ell = {d_ell}"
    );
    ensure!(eta.is_finite(), "eta must be finite");
    if alpha == 2.0 {
        return Ok(eta * (d_ell - eta - 2.0));
    }
    ensure!(
        eta > -alpha && eta < d_ell,
        "eta = {eta} outside ({}, {d_ell})",
        -alpha
    );
    let den1 = 0.5 * eta;
    let den2 = 0.5 * (d_ell - eta - alpha);
    if is_pole(den1) || is_pole(den2) {
        return Ok(0.0);
    }
    let (l1, s1) = libm::lgamma_r(0.5 * (eta + alpha));
    let (l2, s2) = libm::lgamma_r(0.5 * (d_ell - eta));
    let (l3, s3) = libm::lgamma_r(den1);
    let (l4, s4) = libm::lgamma_r(den2);
    let sign = (s1 * s2 * s3 * s4) as f64;
    Ok(sign * (alpha * core::f64::consts::LN_2 + l1 + l2 - l3 - l4).exp())
}

/// κ_c^{(α)}(d_ℓ) = 2^α Γ((d_ℓ+α)/4)² / Γ((d_ℓ−α)/4)², the largest coupling
/// with a nonnegative Hardy form.
pub fn kappa_crit(d_ell: f64, alpha: f64) -> Result<f64> {
    ensure!(d_ell > 0.0 && d_ell.is_finite(), "effective dimension {d_ell} must be positive");
    ensure!(
        alpha > 0.0 && alpha <= 2.0 && alpha < d_ell,
        "alpha = {alpha} must lie in (0, 2] and below d_ell = {d_ell}"
    );
    if alpha == 2.0 {
        return Ok(0.25 * (d_ell - 2.0) * (d_ell - 2.0));
    }
    let ratio = libm::tgamma(0.25 * (d_ell + alpha)) * rgamma(0.25 * (d_ell - alpha));
    Ok(alpha.exp2() * ratio * ratio)
}

/// The unique η ≤ (2ζ+1−α)/2 with Ψ_ζ(η) = κ.
pub fn eta_from_kappa(zeta: f64, alpha: f64, kappa: f64) -> Result<f64> {
    let d = 2.0 * zeta + 1.0;
    let kc = kappa_crit(d, alpha)?;
    ensure!(kappa.is_finite(), "kappa must be finite");
    ensure!(
        kappa <= kc * (1.0 + 1e-12) + 1e-300,
        "kappa = {kappa} exceeds the critical coupling {kc}: the form is unbounded below"
    );
    let eta_star = 0.5 * (d - alpha);
    if kappa >= kc {
        return Ok(eta_star);
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    if alpha == 2.0 {
        // η² − (2ζ−1)η + κ = 0, smaller root, written without cancellation
        let b = 2.0 * zeta - 1.0;
        let disc = (b * b - 4.0 * kappa).max(0.0);
        return Ok(2.0 * kappa / (b + disc.sqrt()));
    }
    let psi = |eta: f64| coupling_psi(zeta, alpha, eta);
    let mut hi = eta_star;
    let mut lo = if kappa > 0.0 { 0.0 } else { -0.5 * alpha };
    // Ψ → −∞ as η → −α, so halving the distance to −α brackets any κ < 0.
    let mut k = 1;
    while psi(lo)? > kappa {
        k += 1;
        ensure!(k < 1100, "could not bracket kappa = {kappa}");
        hi = lo;
        lo = -alpha + alpha * (0.5f64).powi(k);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid)? < kappa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = ((psi(lo)? - kappa).abs(), (psi(hi)? - kappa).abs());
    Ok(if flo <= fhi { lo } else { hi })
}
