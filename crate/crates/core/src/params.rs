//! Parameter bundles with their admissibility checks.

use crate::error::{ensure, Result};
use crate::quad::Tolerance;
use crate::specfun::{coupling_psi, eta_from_kappa, kappa_crit};

/// The triple (ζ, α, η) of a Hardy-perturbed kernel, with κ = Ψ_ζ(η).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CouplingParams {
    pub zeta: f64,
    pub alpha: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl CouplingParams {
    /// Validates 0 < α ≤ 2, α < 2ζ+1 and −S < η ≤ (2ζ+1−α)/2 (S = α for
    /// α < 2, unbounded for α = 2).
    pub fn new(zeta: f64, alpha: f64, eta: f64) -> Result<Self> {
        ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
        ensure!(alpha > 0.0 && alpha <= 2.0, "alpha = {alpha} must lie in (0, 2]");
        ensure!(
            alpha < 2.0 * zeta + 1.0,
            "alpha = {alpha} must be below 2*zeta+1 = {}",
            2.0 * zeta + 1.0
        );
        let top = 0.5 * (2.0 * zeta + 1.0 - alpha);
        ensure!(eta.is_finite() && eta <= top, "eta = {eta} exceeds the critical value {top}");
        ensure!(alpha == 2.0 || eta > -alpha, "eta = {eta} must exceed -alpha = {}", -alpha);
        let kappa = coupling_psi(zeta, alpha, eta)?;
        Ok(CouplingParams { zeta, alpha, eta, kappa })
    }

    /// η = 0, no potential.
    pub fn free(zeta: f64, alpha: f64) -> Result<Self> {
        Self::new(zeta, alpha, 0.0)
    }

    /// Parameterizes by the coupling κ ≤ κ_c instead of η.
    pub fn from_kappa(zeta: f64, alpha: f64, kappa: f64) -> Result<Self> {
        ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
        let eta = eta_from_kappa(zeta, alpha, kappa)?;
        let mut p = Self::new(zeta, alpha, eta)?;
        // keep the caller's κ; Ψ(η) reproduces it to ~1e-12
        p.kappa = kappa;
        Ok(p)
    }

    /// Effective dimension 2ζ + 1.
    pub fn dimension(&self) -> f64 {
        2.0 * self.zeta + 1.0
    }

    pub fn critical_eta(&self) -> f64 {
        0.5 * (self.dimension() - self.alpha)
    }

    pub fn kappa_crit(&self) -> f64 {
        kappa_crit(self.dimension(), self.alpha).unwrap_or(f64::NAN)
    }
}

/// A physical channel: dimension d and angular momentum ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelParams {
    pub d: u32,
    pub ell: u32,
}

impl ChannelParams {
    pub fn new(d: u32, ell: u32) -> Result<Self> {
        ensure!(d >= 1, "dimension must be at least 1");
        ensure!(d >= 2 || ell <= 1, "in one dimension the angular momentum is 0 or 1, got {ell}");
        Ok(ChannelParams { d, ell })
    }

    /// d_ℓ = d + 2ℓ.
    pub fn d_ell(&self) -> u32 {
        self.d + 2 * self.ell
    }

    /// ζ = (d_ℓ − 1)/2.
    pub fn zeta(&self) -> f64 {
        0.5 * (self.d_ell() as f64 - 1.0)
    }

    pub fn coupling(&self, alpha: f64, kappa: f64) -> Result<CouplingParams> {
        CouplingParams::from_kappa(self.zeta(), alpha, kappa)
    }
}

/// Accuracy targets for quadrature and series.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AccuracyBudget {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub series_terms_max: usize,
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        AccuracyBudget {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 400,
            series_terms_max: 60,
        }
    }
}

impl AccuracyBudget {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.rel_tol > 0.0, "rel_tol must be positive");
        ensure!(self.abs_tol >= 0.0, "abs_tol must be nonnegative");
        ensure!(self.max_subdivisions >= 1 && self.series_terms_max >= 1, "caps must be at least 1");
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, self.abs_tol, self.max_subdivisions)
    }

    /// A budget that is at least as strict as `self` in every field
    /// satisfies requests made with `self`.
    pub fn covers(&self, request: &AccuracyBudget) -> bool {
        self.rel_tol <= request.rel_tol && self.abs_tol <= request.abs_tol.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_map() {
        let c = ChannelParams::new(3, 0).unwrap();
        assert_eq!(c.d_ell(), 3);
        assert_eq!(c.zeta(), 1.0);
        assert_eq!(ChannelParams::new(2, 3).unwrap().zeta(), 3.5);
        assert!(ChannelParams::new(1, 2).is_err());
        assert!(ChannelParams::new(0, 0).is_err());
    }

    #[test]
    fn coupling_validation() {
        assert!(CouplingParams::new(1.0, 1.0, 0.5).is_ok());
        assert!(CouplingParams::new(1.0, 1.0, 1.1).is_err());
        assert!(CouplingParams::new(1.0, 1.0, -1.0).is_err());
        assert!(CouplingParams::new(1.0, 2.0, -5.0).is_ok());
        assert!(CouplingParams::new(0.25, 1.5, 0.0).is_err());
        let p = CouplingParams::new(1.0, 1.0, 1.0).unwrap();
        assert!((p.kappa - p.kappa_crit()).abs() < 1e-15);
    }

    #[test]
    fn channel_and_direct_inputs_agree() {
        let c = ChannelParams::new(3, 0).unwrap();
        let via_kappa = c.coupling(1.0, 0.5).unwrap();
        let direct = CouplingParams::new(1.0, 1.0, via_kappa.eta).unwrap();
        assert!((direct.kappa - 0.5).abs() < 1e-10);
    }
}
