//! A free kernel p_ζ^{(α)} with its evaluation state (the stable density table
//! and the quadrature tolerance).

use super::cauchy::cauchy_value;
use super::envelope::{free_envelope, Envelope, GaussianConstants};
use super::heat2::heat2_value;
use super::levy::levy_kernel;
use super::spectral::spectral_heat;
use super::subordinated::subordinate;
use super::{EvalPoint, EvalResult, Method};
use crate::error::{ensure, Error, Result};
use crate::params::AccuracyBudget;
use crate::quad::{self, Tolerance};
use crate::specfun::StableDensity;

#[derive(Debug, Clone)]
pub struct FreeKernel {
    zeta: f64,
    alpha: f64,
    stable: Option<StableDensity>,
    tol: Tolerance,
}

impl FreeKernel {
    pub fn new(zeta: f64, alpha: f64) -> Result<Self> {
        ensure!(zeta > -0.5 && zeta.is_finite(), "zeta = {zeta} must exceed -1/2");
        ensure!(alpha > 0.0 && alpha <= 2.0, "alpha = {alpha} must lie in (0, 2]");
        let stable = if alpha < 2.0 { Some(StableDensity::new(0.5 * alpha)?) } else { None };
        Ok(FreeKernel {
            zeta,
            alpha,
            stable,
            tol: Tolerance::new(1e-11, 0.0, 600),
        })
    }

    pub fn with_budget(mut self, budget: &AccuracyBudget) -> Self {
        self.tol = budget.tolerance();
        self
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The method `auto` picks: closed forms at α = 2 and α = 1, otherwise
    /// subordination.
    pub fn default_method(&self) -> Method {
        if self.alpha == 2.0 {
            Method::ClosedAlpha2
        } else if self.alpha == 1.0 {
            Method::ClosedAlpha1
        } else {
            Method::Subordination
        }
    }

    pub fn eval(&self, point: EvalPoint) -> Result<EvalResult> {
        self.eval_with(point, self.default_method())
    }

    pub fn eval_with(&self, point: EvalPoint, method: Method) -> Result<EvalResult> {
        point.validate()?;
        let EvalPoint { t, r, s } = point;
        match method {
            Method::ClosedAlpha2 => {
                ensure!(self.alpha == 2.0, "the Gaussian closed form needs alpha = 2");
                Ok(EvalResult::closed(heat2_value(self.zeta, t, r, s), method))
            }
            Method::ClosedAlpha1 => {
                ensure!(self.alpha == 1.0, "the Cauchy closed form needs alpha = 1");
                let v = cauchy_value(self.zeta, t, r, s)?;
                let err = if self.zeta == 0.0 || self.zeta == 1.0 { 8.0 } else { 1e3 } * f64::EPSILON * v;
                Ok(EvalResult { value: v, err_est: err, method })
            }
            Method::Subordination => {
                let stable = self
                    .stable
                    .as_ref()
                    .ok_or_else(|| Error::Domain("subordination needs alpha < 2".into()))?;
                let est = subordinate(self.zeta, stable, t, r, s, &self.tol)?;
                Ok(EvalResult {
                    value: est.value,
                    err_est: est.err,
                    method,
                })
            }
            Method::Spectral => spectral_heat(self.zeta, self.alpha, point),
            Method::Series | Method::Picard => {
                Err(Error::Domain(alloc::format!("method {method} applies to perturbed kernels only")))
            }
        }
    }

    /// Value by the default method, for use inside integrands. Quadrature
    /// budget exhaustion returns the partial value; other failures give NaN.
    pub fn value(&self, t: f64, r: f64, s: f64) -> f64 {
        if self.alpha == 2.0 {
            return heat2_value(self.zeta, t, r, s);
        }
        if self.alpha == 1.0 {
            return cauchy_value(self.zeta, t, r, s).unwrap_or(f64::NAN);
        }
        let stable = self.stable.as_ref().expect("stable table exists for alpha < 2");
        quad::best_effort(subordinate(self.zeta, stable, t, r, s, &self.tol))
            .map(|e| e.value)
            .unwrap_or(f64::NAN)
    }

    pub fn levy(&self, r: f64, s: f64) -> Result<f64> {
        levy_kernel(self.zeta, self.alpha, r, s)
    }

    pub fn envelope(&self, point: EvalPoint, consts: GaussianConstants) -> Result<Envelope> {
        free_envelope(self.zeta, self.alpha, point, consts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_method_selection() {
        let p = EvalPoint::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(FreeKernel::new(1.0, 2.0).unwrap().eval(p).unwrap().method, Method::ClosedAlpha2);
        assert_eq!(FreeKernel::new(1.0, 1.0).unwrap().eval(p).unwrap().method, Method::ClosedAlpha1);
        assert_eq!(FreeKernel::new(1.0, 1.5).unwrap().eval(p).unwrap().method, Method::Subordination);
        assert!(FreeKernel::new(1.0, 1.5).unwrap().eval_with(p, Method::ClosedAlpha1).is_err());
        assert!(FreeKernel::new(1.0, 2.0).unwrap().eval_with(p, Method::Subordination).is_err());
        assert!(FreeKernel::new(1.0, 1.0).unwrap().eval_with(p, Method::Series).is_err());
    }

    #[test]
    fn scaling_relation() {
        for &alpha in &[0.5, 1.0, 1.5, 2.0] {
            let k = FreeKernel::new(1.0, alpha).unwrap();
            let p = EvalPoint::new(16.0, 2.0, 3.0).unwrap();
            let u = p.unit_time(alpha);
            let a = k.eval(p).unwrap().value;
            let b = 16f64.powf(-3.0 / alpha) * k.eval(u).unwrap().value;
            assert!((a / b - 1.0).abs() < 1e-9, "alpha={alpha}: {a} vs {b}");
        }
    }
}
