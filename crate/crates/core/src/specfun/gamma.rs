//! Gamma-type functions on the real line.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure, Result};

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    ensure!(x.is_finite() && x > 0.0, "log_gamma needs a positive finite argument, got {x}");
    Ok(libm::lgamma(x))
}

/// Γ(x); infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    libm::tgamma(x)
}

/// 1/Γ(x), an entire function: exactly zero at 0, −1, −2, …
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 170.0 {
        return (-libm::lgamma(x)).exp();
    }
    if x < -170.0 {
        // 1/Γ(x) = sin(πx) Γ(1−x) / π
        let (lg, _) = libm::lgamma_r(1.0 - x);
        return sin_pi(x) * lg.exp() / PI;
    }
    1.0 / libm::tgamma(x)
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    let y = x - 2.0 * (0.5 * x).floor(); // [0, 2)
    let (s, y) = if y >= 1.0 { (-1.0, y - 1.0) } else { (1.0, y) };
    let y = if y > 0.5 { 1.0 - y } else { y };
    s * (PI * y).sin()
}

/// cos(πx) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Digamma ψ(x) = Γ'(x)/Γ(x); NaN at the poles.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        if x == x.floor() {
            return f64::NAN;
        }
        // ψ(1−x) − ψ(x) = π cot(πx)
        return digamma(1.0 - x) - PI * cos_pi(x) / sin_pi(x);
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let w = 1.0 / (y * y);
    let series = w
        * (1.0 / 12.0
            - w * (1.0 / 120.0
                - w * (1.0 / 252.0 - w * (1.0 / 240.0 - w * (1.0 / 132.0 - w * (691.0 / 32760.0 - w / 12.0))))));
    acc + y.ln() - 0.5 / y - series
}
