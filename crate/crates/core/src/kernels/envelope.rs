//! Comparison functions of the two-sided free-kernel bounds.

#[allow(unused_imports)]
use num_traits::Float;

use super::EvalPoint;
use crate::error::{ensure, Result};

/// Lower and upper comparison values at one point. For α < 2 both are the
/// same function (the bounds differ only by multiplicative constants); for
/// α = 2 they differ in the constant inside the Gaussian factor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
    pub exp_const_lower: Option<f64>,
    pub exp_const_upper: Option<f64>,
}

impl Envelope {
    pub(crate) fn same(v: f64) -> Self {
        Envelope {
            lower: v,
            upper: v,
            exp_const_lower: None,
            exp_const_upper: None,
        }
    }

    /// Multiplies both sides by a common nonnegative factor.
    pub fn scaled(&self, f: f64) -> Self {
        Envelope {
            lower: self.lower * f,
            upper: self.upper * f,
            ..*self
        }
    }
}

/// Constants c in exp(−(r−s)²/(c t)) for the α = 2 bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianConstants {
    pub lower: f64,
    pub upper: f64,
}

impl Default for GaussianConstants {
    fn default() -> Self {
        GaussianConstants { lower: 4.0, upper: 8.0 }
    }
}

/// α < 2: t / (|r−s|^{1+α}(r+s)^{2ζ} + t^{(1+α)/α}(t^{1/α}+r+s)^{2ζ}).
/// α = 2: t^{−1/2} exp(−(r−s)²/(c t)) / (rs+t)^ζ with c from `consts`.
pub fn free_envelope(zeta: f64, alpha: f64, point: EvalPoint, consts: GaussianConstants) -> Result<Envelope> {
    ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
    ensure!(alpha > 0.0 && alpha <= 2.0, "alpha = {alpha} must lie in (0, 2]");
    ensure!(consts.lower > 0.0 && consts.upper > 0.0, "Gaussian constants must be positive");
    point.validate()?;
    let EvalPoint { t, r, s } = point;
    let d = (r - s).abs();
    if alpha == 2.0 {
        let base = t.powf(-0.5) * (r * s + t).powf(-zeta);
        let g = |c: f64| (-d * d / (c * t)).exp();
        return Ok(Envelope {
            lower: base * g(consts.lower),
            upper: base * g(consts.upper),
            exp_const_lower: Some(consts.lower),
            exp_const_upper: Some(consts.upper),
        });
    }
    let tl = t.powf(1.0 / alpha);
    let den = d.powf(1.0 + alpha) * (r + s).powf(2.0 * zeta) + t.powf((1.0 + alpha) / alpha) * (tl + r + s).powf(2.0 * zeta);
    Ok(Envelope::same(t / den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_and_symmetric() {
        for &alpha in &[0.5, 1.0, 2.0] {
            for &(t, r, s) in &[(1.0, 0.3, 2.0), (0.01, 5.0, 5.0), (100.0, 1e-3, 4.0)] {
                let a = free_envelope(1.3, alpha, EvalPoint::new(t, r, s).unwrap(), Default::default()).unwrap();
                let b = free_envelope(1.3, alpha, EvalPoint::new(t, s, r).unwrap(), Default::default()).unwrap();
                assert!(a.lower > 0.0 && a.lower <= a.upper);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn scaling() {
        for &alpha in &[0.5, 1.0, 1.5, 2.0] {
            let zeta = 0.75;
            let p = EvalPoint::new(3.7, 0.4, 2.9).unwrap();
            let e = free_envelope(zeta, alpha, p, Default::default()).unwrap();
            let e1 = free_envelope(zeta, alpha, p.unit_time(alpha), Default::default()).unwrap();
            let f = p.t.powf(-(2.0 * zeta + 1.0) / alpha);
            assert!((e.upper / (f * e1.upper) - 1.0).abs() < 1e-13, "alpha={alpha}");
            assert!((e.lower / (f * e1.lower) - 1.0).abs() < 1e-13, "alpha={alpha}");
        }
    }
}
