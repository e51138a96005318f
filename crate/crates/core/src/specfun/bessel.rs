//! Modified Bessel I (exponentially scaled) and Bessel J of real order.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::gamma::{cos_pi, rgamma, sin_pi};
use crate::error::{ensure, Result};

/// e^{−x} I_ν(x) for ν ≥ −1/2, x ≥ 0.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    ensure!(nu >= -0.5 && nu.is_finite(), "bessel_i_scaled: order {nu} below -1/2");
    ensure!(x >= 0.0 && !x.is_nan(), "bessel_i_scaled: negative argument {x}");
    Ok(i_scaled(nu, x))
}

/// e^{−x} I_ν(x) for any ν > −1. Used by the kernels, whose index ζ − 1/2
/// reaches below −1/2 when ζ < 0.
pub(crate) fn i_scaled(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if nu == -0.5 {
        return (2.0 / (PI * x)).sqrt() * 0.5 * (1.0 + (-2.0 * x).exp());
    }
    if nu == 0.5 {
        return (2.0 / (PI * x)).sqrt() * 0.5 * -(-2.0 * x).exp_m1();
    }
    if x > 20.0 && x > nu * nu {
        return i_scaled_asymptotic(nu, x);
    }
    i_scaled_series(nu, x)
}

/// Power series, all terms positive; rescaled so that large x does not
/// overflow.
fn i_scaled_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut log_offset = 0.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum && k > q.sqrt() - nu {
            break;
        }
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_offset += 250.0 * core::f64::consts::LN_10;
        }
        k += 1.0;
    }
    let lead = nu * (0.5 * x).ln() - x + log_offset;
    let scale = if nu + 1.0 < 170.0 {
        lead.exp() * rgamma(nu + 1.0)
    } else {
        (lead - libm::lgamma(nu + 1.0)).exp()
    };
    scale * sum
}

fn i_scaled_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * kf * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < f64::EPSILON * 0.1 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// J_ν(x) for ν ≥ −1/2, x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    ensure!(nu >= -0.5 && nu.is_finite(), "bessel_j: order {nu} below -1/2");
    ensure!(x >= 0.0 && x.is_finite(), "bessel_j: argument {x} must be finite and nonnegative");
    Ok(j(nu, x))
}

pub(crate) fn j(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if nu == 0.5 {
        return (2.0 / (PI * x)).sqrt() * x.sin();
    }
    if nu == -0.5 {
        return (2.0 / (PI * x)).sqrt() * x.cos();
    }
    if x <= 5.0 {
        j_series(nu, x)
    } else if x >= 25.0 + nu * nu {
        j_asymptotic(nu, x)
    } else {
        j_miller(nu, x)
    }
}

fn j_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 2.0 {
            break;
        }
        if k > 200.0 {
            break;
        }
        k += 1.0;
    }
    (nu * (0.5 * x).ln()).exp() * rgamma(nu + 1.0) * sum
}

fn j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        // a_k/x^k contributes to Q for odd k, P for even k, with sign (−1)^{⌊k/2⌋}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    // χ = x − (ν/2 + 1/4)π
    let phase = 0.5 * nu + 0.25;
    let (sx, cx) = (x.sin(), x.cos());
    let (sp, cp) = (sin_pi(phase), cos_pi(phase));
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Miller's backward recurrence normalized by
/// (x/2)^μ = Σ_k (μ+2k) Γ(μ+k)/k! J_{μ+2k}(x), accumulated on the way down.
fn j_miller(nu: f64, x: f64) -> f64 {
    let base = nu.floor();
    let mu = nu - base; // in [0, 1)
    let n = base as i64; // J_ν = J_{μ+n}, n ≥ −1
    let top = (x.max(nu) + 40.0 + 2.0 * x.sqrt()) as i64;
    let top = top + (top % 2);
    // g_m = Γ(μ+m)/m! at m = top/2, then g_{m−1} = g_m m/(μ+m−1)
    let gamma_mu1 = 1.0 / rgamma(mu + 1.0);
    let mut m = top / 2;
    let mut g = (libm::lgamma(mu + m as f64) - libm::lgamma(m as f64 + 1.0)).exp();
    let mut next = 0.0; // J_{μ+k+1}
    let mut cur = 1e-300; // J_{μ+k}
    let mut norm = 0.0;
    let mut target = if n == top { cur } else { 0.0 };
    let mut at_one = 0.0;
    let mut k = top;
    loop {
        if k % 2 == 0 {
            let c = if k == 0 { gamma_mu1 } else { (mu + k as f64) * g };
            norm += c * cur;
        }
        if k == n {
            target = cur;
        }
        if k == 1 {
            at_one = cur;
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * (mu + k as f64) / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if k % 2 == 0 && k > 0 {
            g *= m as f64 / (mu + m as f64 - 1.0);
            m -= 1;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
            at_one *= 1e-250;
        }
    }
    if n < 0 {
        // J_{μ−1} = (2μ/x) J_μ − J_{μ+1}
        target = 2.0 * mu / x * cur - at_one;
    }
    target * (mu * (0.5 * x).ln()).exp() / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn i_scaled_examples() {
        assert_eq!(bessel_i_scaled(0.0, 0.0).unwrap(), 1.0);
        let e = (-1f64).exp() * (2.0 / PI).sqrt() * 1f64.cosh();
        assert!(close(bessel_i_scaled(-0.5, 1.0).unwrap(), e, 1e-14));
        let asym = (2.0 * PI * 100.0).powf(-0.5) * (1.0 + 1.0 / 800.0 + 9.0 / (2.0 * 6400.0 * 100.0));
        assert!(close(bessel_i_scaled(0.0, 100.0).unwrap(), asym, 1e-7));
        assert!((bessel_i_scaled(0.0, 100.0).unwrap() - 0.0399438).abs() < 1e-6);
        assert!(bessel_i_scaled(-0.6, 1.0).is_err());
    }

    #[test]
    fn i_scaled_half_integer_orders() {
        // I_{3/2}(x) = √(2/(πx)) (cosh x − sinh x / x)
        for &x in &[0.3, 1.0, 4.0, 15.0, 30.0, 80.0] {
            let exact = (2.0 / (PI * x)).sqrt() * (-x).exp() * (x.cosh() - x.sinh() / x);
            assert!(close(i_scaled(1.5, x), exact, 1e-12), "x={x}");
        }
    }

    #[test]
    fn i_scaled_series_matches_asymptotic_at_switch() {
        for &nu in &[0.0, 0.25, 1.0, 2.0, 4.0] {
            let x: f64 = 20.0f64.max(nu * nu) * 1.0001 + 0.5;
            let a = i_scaled_asymptotic(nu, x);
            let s = i_scaled_series(nu, x);
            assert!(close(a, s, 1e-13), "nu={nu}: {a} vs {s}");
        }
    }

    #[test]
    fn i_scaled_wronskian() {
        // I_{ν−1} − I_{ν+1} = (2ν/x) I_ν
        for &nu in &[0.25, 0.75, 1.3, 3.0] {
            for &x in &[0.01, 0.7, 3.0, 12.0, 40.0, 300.0] {
                let l = i_scaled(nu - 1.0, x) - i_scaled(nu + 1.0, x);
                let r = 2.0 * nu / x * i_scaled(nu, x);
                assert!(close(l, r, 1e-11), "nu={nu} x={x}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn j_examples() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-12);
        assert!(bessel_j(0.0, 2.40482556).unwrap().abs() < 1e-6);
    }

    fn bisect_zero(nu: f64, mut a: f64, mut b: f64) -> f64 {
        let fa0 = j(nu, a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (j(nu, m) > 0.0) == (fa0 > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn j0_first_zero_by_root_finding() {
        let z = bisect_zero(0.0, 2.0, 3.0);
        assert!((z - 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn j_half_integer_and_recurrence() {
        // J_{3/2}(x) = √(2/(πx)) (sin x / x − cos x)
        for &x in &[0.5, 3.0, 7.0, 20.0, 60.0, 900.0] {
            let exact = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((j(1.5, x) - exact).abs() < 1e-13, "x={x}: {} vs {exact}", j(1.5, x));
        }
        // J_{ν−1} + J_{ν+1} = (2ν/x) J_ν across all three branches
        for &nu in &[0.75, 1.25, 2.0] {
            for &x in &[1.0, 4.9, 5.1, 12.0, 24.0, 31.0, 250.0] {
                let l = j(nu - 1.0, x) + j(nu + 1.0, x);
                let r = 2.0 * nu / x * j(nu, x);
                assert!((l - r).abs() < 1e-12, "nu={nu} x={x}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn j_branches_agree_at_switch_points() {
        for &nu in &[-0.25, 0.0, 0.3, 2.0] {
            assert!((j_series(nu, 5.0) - j_miller(nu, 5.0)).abs() < 1e-13);
            let x = 25.0 + nu * nu;
            assert!((j_asymptotic(nu, x) - j_miller(nu, x)).abs() < 1e-13, "nu={nu}");
        }
    }
}
