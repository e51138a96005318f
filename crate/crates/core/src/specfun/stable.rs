//! Density of the one-sided β-stable law with Laplace transform e^{−tλ^β}.
//!
//! Below x = 1 the unit-time density σ₁ is evaluated through Kanter's
//! representation as an integral over (0, π) with a positive integrand; above
//! it through the convergent series in x^{−β}. [`StableDensity`] tabulates
//! ln σ₁ once per β with piecewise Chebyshev interpolants for fast repeated
//! evaluation.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::gamma::sin_pi;
use crate::error::{ensure, Result};
use crate::quad::{self, Tolerance};

/// σ_t^{(β)}(τ), evaluated directly (no table).
pub fn stable_density(beta: f64, t: f64, tau: f64) -> Result<f64> {
    check_beta(beta)?;
    ensure!(t > 0.0 && t.is_finite(), "stable_density: time {t} must be positive");
    ensure!(tau > 0.0 && tau.is_finite(), "stable_density: argument {tau} must be positive");
    let scale = t.powf(1.0 / beta);
    Ok(sigma1_direct(beta, tau / scale) / scale)
}

fn check_beta(beta: f64) -> Result<()> {
    ensure!(beta > 0.0 && beta < 1.0, "stable index beta = {beta} outside (0, 1)");
    Ok(())
}

/// ln(sin u / u), accurate near u = 0.
fn ln_sinc(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        -u2 * (1.0 / 6.0 + u2 * (1.0 / 180.0 + u2 * (1.0 / 2835.0 + u2 * (1.0 / 37800.0 + u2 / 467775.0))))
    } else {
        (u.sin() / u).ln()
    }
}

#[derive(Debug, Clone)]
struct Kanter {
    beta: f64,
    /// A(0) = (1−β) β^{β/(1−β)}
    a0: f64,
}

impl Kanter {
    fn new(beta: f64) -> Self {
        let a0 = (1.0 - beta) * beta.powf(beta / (1.0 - beta));
        Kanter { beta, a0 }
    }

    /// ln A(φ) − ln A(0)
    fn log_ratio(&self, phi: f64) -> f64 {
        let b = self.beta;
        ln_sinc((1.0 - b) * phi) + b / (1.0 - b) * ln_sinc(b * phi) - ln_sinc(phi) / (1.0 - b)
    }

    /// ln σ₁(x) for 0 < x.
    fn ln_density(&self, x: f64) -> f64 {
        let v = x.ln();
        self.ln_density_parts(v) + self.ln_integral(v)
    }

    /// ln σ₁(e^v) minus ln of the φ-integral: the explicit, rapidly varying
    /// part ln(β/((1−β)π)) − v/(1−β) − A(0) e^{−vβ/(1−β)}.
    fn ln_density_parts(&self, v: f64) -> f64 {
        let b = self.beta;
        let p = 1.0 / (1.0 - b);
        (b * p / PI).ln() - p * v - self.a0 * (-b * p * v).exp()
    }

    /// ln ∫₀^π A(φ) exp(−(A(φ) − A(0)) y) dφ with y = x^{−β/(1−β)}, x = e^v;
    /// smooth and slowly varying in v.
    fn ln_integral(&self, v: f64) -> f64 {
        let b = self.beta;
        let y = (-b / (1.0 - b) * v).exp();
        let width = (2.0 / (self.a0 * b * y)).sqrt();
        let mut points = Vec::with_capacity(6);
        points.push(0.0);
        for k in [1.0, 3.0, 9.0, 27.0] {
            let phi = k * width;
            if phi < PI {
                points.push(phi);
            }
        }
        points.push(PI);
        let integrand = |phi: f64| {
            if phi >= PI {
                return 0.0;
            }
            let d = self.log_ratio(phi);
            let v = self.a0 * d.exp() * (-self.a0 * d.exp_m1() * y).exp();
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let tol = Tolerance::new(1e-13, 0.0, 2000);
        quad::best_effort(quad::integrate_breaks(integrand, &points, &tol))
            .map(|e| e.value.ln())
            .unwrap_or(f64::NAN)
    }
}

/// Coefficients of σ₁(x) = x^{−1} Σ_{k≥1} c_k x^{−kβ},
/// c_k = (−1)^{k+1} Γ(kβ+1) sin(πkβ) / (π k!).
fn series_coefficients(beta: f64) -> Vec<f64> {
    let mut c = Vec::new();
    for k in 1..2000usize {
        let kf = k as f64;
        let mag = (libm::lgamma(kf * beta + 1.0) - libm::lgamma(kf + 1.0)).exp() / PI;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        c.push(sign * mag * sin_pi(kf * beta));
        if mag < 1e-19 {
            break;
        }
    }
    c
}

fn series_eval(coeffs: &[f64], beta: f64, x: f64) -> f64 {
    let u = x.powf(-beta);
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc * u / x
}

fn sigma1_direct(beta: f64, x: f64) -> f64 {
    if x >= 1.0 {
        series_eval(&series_coefficients(beta), beta, x)
    } else {
        Kanter::new(beta).ln_density(x).exp()
    }
}

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, v: f64) -> f64 {
        let s = (2.0 * v - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s * b1 - b2 + self.coeffs[0]
    }
}

const CHEB_DEGREE: usize = 20;

fn chebyshev_fit<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let n = CHEB_DEGREE + 1;
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let s = (PI * (j as f64 + 0.5) / n as f64).cos();
            f(0.5 * (lo + hi) + 0.5 * (hi - lo) * s)
        })
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = 0.0;
        for (j, v) in values.iter().enumerate() {
            acc += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        }
        let c = 2.0 * acc / n as f64;
        coeffs.push(if k == 0 { 0.5 * c } else { c });
    }
    Piece { lo, hi, coeffs }
}

/// Tabulated unit-time density σ₁^{(β)} for repeated evaluation.
#[derive(Debug, Clone)]
pub struct StableDensity {
    beta: f64,
    series: Vec<f64>,
    kanter: Kanter,
    /// Pieces of the smooth part of ln σ₁(e^v) covering [v_min, 0], sorted
    /// by `lo`.
    pieces: Vec<Piece>,
    v_min: f64,
}

impl StableDensity {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let kanter = Kanter::new(beta);
        // Below v_min the density is under e^{−800}.
        let y_max = 800.0 / kanter.a0;
        let v_min = -(1.0 - beta) / beta * y_max.ln();
        let f = |v: f64| kanter.ln_integral(v);
        let mut pieces = Vec::new();
        let mut stack = Vec::new();
        let n0 = ((-v_min) / 2.0).ceil().max(1.0) as usize;
        for i in (0..n0).rev() {
            let lo = v_min * (i + 1) as f64 / n0 as f64;
            let hi = v_min * i as f64 / n0 as f64;
            stack.push((lo, hi));
        }
        while let Some((lo, hi)) = stack.pop() {
            let piece = chebyshev_fit(&f, lo, hi);
            let worst = [0.13, 0.37, 0.61, 0.89]
                .iter()
                .map(|&q| {
                    let v = lo + q * (hi - lo);
                    (piece.eval(v) - f(v)).abs()
                })
                .fold(0.0, f64::max);
            if worst > 2e-13 && hi - lo > 1e-3 {
                let mid = 0.5 * (lo + hi);
                stack.push((mid, hi));
                stack.push((lo, mid));
            } else {
                pieces.push(piece);
            }
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(StableDensity {
            beta,
            series: series_coefficients(beta),
            kanter,
            pieces,
            v_min,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// σ₁(x).
    pub fn unit(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        if x >= 1.0 {
            return series_eval(&self.series, self.beta, x);
        }
        let v = x.ln();
        if v < self.v_min {
            return 0.0;
        }
        let idx = self.pieces.partition_point(|p| p.hi < v).min(self.pieces.len() - 1);
        (self.kanter.ln_density_parts(v) + self.pieces[idx].eval(v)).exp()
    }

    /// σ_t(τ) = t^{−1/β} σ₁(τ t^{−1/β}).
    pub fn density(&self, t: f64, tau: f64) -> f64 {
        let scale = t.powf(1.0 / self.beta);
        self.unit(tau / scale) / scale
    }

    /// Smallest x where the table reports a nonzero density.
    pub fn support_floor(&self) -> f64 {
        self.v_min.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levy_half(t: f64, tau: f64) -> f64 {
        t / (4.0 * PI).sqrt() * tau.powf(-1.5) * (-t * t / (4.0 * tau)).exp()
    }

    /// Inversion integral (1/π)∫₀^∞ e^{−xu} e^{−u^β cos πβ} sin(u^β sin πβ) du,
    /// well conditioned when cos πβ > 0.
    fn pollard(beta: f64, x: f64) -> f64 {
        let (c, s) = ((PI * beta).cos(), (PI * beta).sin());
        let f = |v: f64| {
            let u = v.exp();
            let ub = u.powf(beta);
            u * (-x * u - ub * c).exp() * (ub * s).sin()
        };
        let tol = Tolerance::new(1e-13, 0.0, 4000);
        quad::integrate_breaks(f, &[-80.0, -10.0, 0.0, 5.0, 10.0, 20.0], &tol).unwrap().value / PI
    }

    #[test]
    fn half_order_closed_form() {
        let v = stable_density(0.5, 1.0, 1.0).unwrap();
        assert!((v - 0.219_695_644_733_861_3).abs() < 1e-12);
        let table = StableDensity::new(0.5).unwrap();
        for &x in &[1e-3, 0.01, 0.07, 0.3, 0.99, 1.0, 3.0, 50.0, 1e3, 1e6] {
            let exact = levy_half(1.0, x);
            assert!((sigma1_direct(0.5, x) / exact - 1.0).abs() < 1e-11, "direct x={x}");
            assert!((table.unit(x) / exact - 1.0).abs() < 1e-10, "table x={x}");
        }
    }

    #[test]
    fn matches_inversion_integral_for_small_beta() {
        for &beta in &[0.2, 0.3, 0.45] {
            let table = StableDensity::new(beta).unwrap();
            for &x in &[0.05, 0.3, 1.0, 2.5, 40.0] {
                let o = pollard(beta, x);
                assert!((table.unit(x) / o - 1.0).abs() < 1e-9, "beta={beta} x={x}");
            }
        }
    }

    fn log_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
        // ∫₀^∞ f(τ) dτ in τ = e^v
        let g = |v: f64| {
            let tau = v.exp();
            f(tau) * tau
        };
        let pts: Vec<f64> = (-20..=35).map(|k| 4.0 * k as f64).collect();
        quad::integrate_breaks(g, &pts, &Tolerance::new(1e-13, 1e-16, 4000)).unwrap().value
    }

    #[test]
    fn mass_and_laplace_transform() {
        for &beta in &[0.25, 0.5, 0.75] {
            let table = StableDensity::new(beta).unwrap();
            for &t in &[0.5, 1.0, 2.0] {
                let mass = log_integral(|tau| table.density(t, tau));
                // heavy tail beyond e^140: ∫ ≈ t·τ^{−β}/Γ(1−β)
                let tail = t * (-140.0 * beta).exp() / libm::tgamma(1.0 - beta);
                assert!((mass + tail - 1.0).abs() < 1e-8, "beta={beta} t={t} mass={mass}");
                for &lam in &[0.5, 1.0, 4.0] {
                    let lt = log_integral(|tau| (-lam * tau).exp() * table.density(t, tau));
                    let exact = (-t * lam.powf(beta)).exp();
                    assert!((lt - exact).abs() < 1e-8, "beta={beta} t={t} lambda={lam}");
                }
            }
        }
    }

    #[test]
    fn table_agrees_with_direct_evaluation() {
        for &beta in &[0.1, 0.25, 0.6, 0.75, 0.9] {
            let table = StableDensity::new(beta).unwrap();
            let mut x = 1e-3;
            while x < 1e3 {
                let d = sigma1_direct(beta, x);
                if d > 1e-280 {
                    assert!((table.unit(x) / d - 1.0).abs() < 1e-11, "beta={beta} x={x}");
                }
                x *= 1.37;
            }
        }
    }

    #[test]
    fn table_is_compact() {
        for &beta in &[0.1, 0.5, 0.9] {
            let table = StableDensity::new(beta).unwrap();
            assert!(table.pieces.len() < 200, "beta={beta}: {} pieces", table.pieces.len());
        }
    }

    #[test]
    fn scaling_is_exact() {
        let table = StableDensity::new(0.75).unwrap();
        let (t, tau) = (2.7, 0.8);
        let scale = t.powf(1.0 / 0.75);
        assert_eq!(table.density(t, tau), table.unit(tau / scale) / scale);
        assert!(stable_density(1.0, 1.0, 1.0).is_err());
        assert!(stable_density(0.5, 0.0, 1.0).is_err());
    }
}
