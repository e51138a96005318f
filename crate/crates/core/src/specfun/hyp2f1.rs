//! Regularized Gauss hypergeometric function ₂F̃₁(a,b;c;z) = ₂F₁(a,b;c;z)/Γ(c)
//! on 0 ≤ z < 1.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::gamma::{digamma, rgamma, sin_pi};
use crate::error::{ensure, Error, Result};

const MAX_TERMS: usize = 20_000;
/// Distance from an integer below which c − a − b is treated as that integer.
const INTEGER_GAP: f64 = 1e-8;

/// ₂F̃₁(a,b;c;z) for z ∈ [0, 1).
pub fn hyp2f1_regularized(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    ensure!((0.0..1.0).contains(&z), "hyp2f1: argument {z} outside [0, 1)");
    hyp2f1_regularized_split(a, b, c, z, 1.0 - z)
}

/// Same as [`hyp2f1_regularized`] with the complement `w = 1 − z` supplied by
/// the caller. Kernels near the diagonal know `w` exactly even when `z`
/// rounds to 1.
pub fn hyp2f1_regularized_split(a: f64, b: f64, c: f64, z: f64, w: f64) -> Result<f64> {
    ensure!(a.is_finite() && b.is_finite() && c.is_finite(), "hyp2f1: non-finite parameter");
    ensure!((0.0..=1.0).contains(&z), "hyp2f1: argument {z} outside [0, 1]");
    ensure!(w > 0.0 && w <= 1.0, "hyp2f1: complement {w} outside (0, 1]");
    if let Some(v) = polynomial_case(a, b, c, z)? {
        return Ok(v);
    }
    if z <= 0.75 {
        return series(a, b, c, z);
    }
    let s = c - a - b;
    if s < 0.0 {
        // Euler: ₂F̃₁(a,b;c;z) = w^{c−a−b} ₂F̃₁(c−a,c−b;c;z)
        return Ok(w.powf(s) * near_one(c - a, c - b, c, w)?);
    }
    near_one(a, b, c, w)
}

/// Nonpositive integer a or b: ₂F₁ is a polynomial.
fn polynomial_case(a: f64, b: f64, c: f64, z: f64) -> Result<Option<f64>> {
    let is_neg_int = |x: f64| x <= 0.0 && x == x.floor();
    if !(is_neg_int(a) || is_neg_int(b)) {
        return Ok(None);
    }
    let degree = if is_neg_int(a) && is_neg_int(b) { (-a).min(-b) } else if is_neg_int(a) { -a } else { -b };
    if degree > MAX_TERMS as f64 {
        return Err(Error::Convergence("hyp2f1: polynomial degree too large".into()));
    }
    series(a, b, c, z).map(Some)
}

/// Σ (a)_n (b)_n z^n / (n! Γ(c+n)), starting past the vanishing terms when c
/// is a nonpositive integer.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let start = if c <= 0.0 && c == c.floor() { (1.0 - c) as usize } else { 0 };
    let mut term = if start == 0 {
        rgamma(c)
    } else {
        // (a)_n (b)_n z^n / n! with Γ(c + n) = Γ(1) = 1
        let mut t = 1.0;
        for k in 0..start {
            let kf = k as f64;
            t *= (a + kf) * (b + kf) * z / (kf + 1.0);
        }
        t
    };
    if start == 0 && term == 0.0 {
        unreachable!("rgamma vanishes only at nonpositive integers");
    }
    let mut sum = term;
    let mut n = start;
    let mut small = 0;
    while n < start + MAX_TERMS {
        let nf = n as f64;
        let denom = (nf + 1.0) * (c + nf);
        term *= (a + nf) * (b + nf) * z / denom;
        sum += term;
        n += 1;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= 1e-17 * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(alloc::format!(
        "hyp2f1 series ({a}, {b}; {c}; {z}) did not converge"
    )))
}

/// Connection to w = 1 − z, for c − a − b ≥ 0 (possibly after Euler).
fn near_one(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() < INTEGER_GAP {
        return integer_gap(a, b, m as usize, w);
    }
    // Γ(s)Γ(1−s) = π / sin(πs) folds both Gamma ratios into regularized series.
    let lead = PI / sin_pi(s);
    let first = rgamma(c - a) * rgamma(c - b);
    let first = if first == 0.0 { 0.0 } else { first * series(a, b, 1.0 - s, w)? };
    let second = rgamma(a) * rgamma(b);
    let second = if second == 0.0 { 0.0 } else { second * w.powf(s) * series(c - a, c - b, 1.0 + s, w)? };
    Ok(lead * (first - second))
}

/// c = a + b + m with integer m ≥ 0: the logarithmic connection formula.
fn integer_gap(a: f64, b: f64, m: usize, w: f64) -> Result<f64> {
    let mf = m as f64;
    // Finite part: Γ(m) rΓ(a+m) rΓ(b+m) Σ_{n<m} (a)_n (b)_n / (n! (1−m)_n) w^n
    let mut finite = 0.0;
    if m > 0 {
        let mut u = 1.0;
        let mut acc = 0.0;
        for n in 0..m {
            acc += u;
            let nf = n as f64;
            u *= (a + nf) * (b + nf) * w / ((nf + 1.0) * (1.0 - mf + nf));
        }
        let gamma_m = libm::tgamma(mf);
        finite = gamma_m * rgamma(a + mf) * rgamma(b + mf) * acc;
    }
    let pref = rgamma(a) * rgamma(b);
    if pref == 0.0 {
        return Ok(finite);
    }
    // Σ (a+m)_n (b+m)_n / (n! (n+m)!) w^n [ln w − ψ(n+1) − ψ(n+m+1) + ψ(a+n+m) + ψ(b+n+m)]
    let lw = w.ln();
    let mut t = rgamma(mf + 1.0);
    let mut p1 = digamma(1.0);
    let mut pm = digamma(mf + 1.0);
    let mut pa = digamma(a + mf);
    let mut pb = digamma(b + mf);
    let mut sum = 0.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let term = t * (lw - p1 - pm + pa + pb);
        sum += term;
        let nf = n as f64;
        if term.abs() <= 1e-17 * sum.abs() && n > 2 {
            small += 1;
            if small >= 2 {
                let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                return Ok(finite - sign * pref * w.powi(m as i32) * sum);
            }
        } else {
            small = 0;
        }
        t *= (a + mf + nf) * (b + mf + nf) * w / ((nf + 1.0) * (nf + mf + 1.0));
        p1 += 1.0 / (nf + 1.0);
        pm += 1.0 / (nf + mf + 1.0);
        pa += 1.0 / (a + mf + nf);
        pb += 1.0 / (b + mf + nf);
    }
    Err(Error::Convergence("hyp2f1 logarithmic series did not converge".into()))
}
