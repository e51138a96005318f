//! Adaptive Gauss–Kronrod quadrature on finite intervals.
//!
//! Every integral in the crate is reduced to finite intervals by the caller
//! (usually through a logarithmic substitution), then handed to [`integrate`]
//! with explicit breakpoints at the known peaks of the integrand.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Kronrod abscissae of the 21-point rule, descending; the odd entries are the
/// 10-point Gauss abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_643_474_262,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const fn new(rel: f64, abs: f64, max_subdivisions: usize) -> Self {
        Tolerance {
            rel,
            abs,
            max_subdivisions,
        }
    }

    pub const fn rel(rel: f64) -> Self {
        Tolerance::new(rel, 0.0, 400)
    }

    pub fn with_abs(self, abs: f64) -> Self {
        Tolerance { abs, ..self }
    }

    pub fn with_max_subdivisions(self, max_subdivisions: usize) -> Self {
        Tolerance {
            max_subdivisions,
            ..self
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::rel(1e-10)
    }
}

/// Value of an integral together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn new(value: f64, err: f64) -> Self {
        Estimate { value, err }
    }
}

impl core::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.err + rhs.err)
    }
}

impl core::ops::AddAssign for Estimate {
    fn add_assign(&mut self, rhs: Estimate) {
        *self = *self + rhs;
    }
}

/// Unwraps a quadrature result, keeping the partial estimate when only the
/// subdivision budget ran out.
pub fn best_effort(r: Result<Estimate>) -> Result<Estimate> {
    match r {
        Err(Error::Budget { value, err_est }) if value.is_finite() => {
            Ok(Estimate::new(value, err_est))
        }
        other => other,
    }
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    resabs: f64,
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    Segment {
        a,
        b,
        value,
        err,
        resabs: res_abs,
    }
}

fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<(Vec<Segment>, bool)> {
    if points.len() < 2 {
        return Err(Error::domain("quadrature needs at least two breakpoints"));
    }
    let mut segs: Vec<Segment> = Vec::with_capacity(points.len() + 16);
    for w in points.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite()) {
            return Err(Error::domain("quadrature limits must be finite"));
        }
        if w[1] > w[0] {
            segs.push(kronrod21(f, w[0], w[1]));
        }
    }
    let cap = tol.max_subdivisions.max(segs.len());
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Convergence(alloc::format!(
                "non-finite integrand value (sum {total})"
            )));
        }
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target {
            return Ok((segs, true));
        }
        if segs.len() >= cap {
            return Ok((segs, false));
        }
        // Bisect the worst segment that can still be split.
        let mut worst = None;
        let mut worst_err = -1.0;
        for (i, s) in segs.iter().enumerate() {
            let mid = 0.5 * (s.a + s.b);
            let splittable = mid > s.a && mid < s.b && (s.b - s.a) > 1e-13 * (s.a.abs() + s.b.abs());
            if splittable && s.err > worst_err {
                worst_err = s.err;
                worst = Some(i);
            }
        }
        let Some(i) = worst else {
            return Ok((segs, false));
        };
        let s = segs[i];
        let mid = 0.5 * (s.a + s.b);
        let left = kronrod21(f, s.a, mid);
        let right = kronrod21(f, mid, s.b);
        // Roundoff guard: a split that does not improve anything is final.
        if left.err + right.err >= s.err && s.err <= 100.0 * f64::EPSILON * (left.resabs + right.resabs) {
            segs[i] = Segment { err: 0.0, ..s };
            continue;
        }
        segs[i] = left;
        segs.push(right);
    }
}

fn finish(segs: &[Segment], converged: bool) -> Result<Estimate> {
    let value: f64 = segs.iter().map(|s| s.value).sum();
    let err: f64 = segs.iter().map(|s| s.err).sum();
    if converged {
        Ok(Estimate::new(value, err))
    } else {
        Err(Error::Budget {
            value,
            err_est: err,
        })
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate::default());
    }
    if a > b {
        let r = integrate(f, b, a, tol)?;
        return Ok(Estimate::new(-r.value, r.err));
    }
    let (segs, ok) = adapt(&mut f, &[a, b], tol)?;
    finish(&segs, ok)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// partition given by the (ascending) breakpoints.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: &Tolerance) -> Result<Estimate> {
    let (segs, ok) = adapt(&mut f, points, tol)?;
    finish(&segs, ok)
}

/// A quadrature rule: nodes with weights.
pub type Rule = Vec<(f64, f64)>;

/// Runs the adaptive scheme and returns, besides the estimate, the final
/// 21-point nodes and weights. Applying the rule to `f` reproduces the value.
pub fn adaptive_rule<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<(Estimate, Rule)> {
    let (segs, ok) = adapt(&mut f, points, tol)?;
    let est = match finish(&segs, ok) {
        Ok(e) => e,
        Err(Error::Budget { value, err_est }) => Estimate::new(value, err_est),
        Err(e) => return Err(e),
    };
    let mut rule = Vec::with_capacity(segs.len() * 21);
    for s in &segs {
        let center = 0.5 * (s.a + s.b);
        let half = 0.5 * (s.b - s.a);
        rule.push((center, WGK[10] * half));
        for j in 0..10 {
            let dx = half * XGK[j];
            rule.push((center - dx, WGK[j] * half));
            rule.push((center + dx, WGK[j] * half));
        }
    }
    Ok((est, rule))
}

/// Breakpoints in ln z for an integrand with power behaviour z^{e_lo} (in
/// d ln z) below the smallest scale, z^{−e_hi} above the largest, and peaks
/// (center, width) in between.
pub fn log_breaks(scales: &[f64], peaks: &[(f64, f64)], e_lo: f64, e_hi: f64) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &s in scales.iter().chain(peaks.iter().map(|(c, _)| c)) {
        lo = lo.min(s.ln());
        hi = hi.max(s.ln());
    }
    let mut b = Vec::new();
    b.push(lo - 38.0 / e_lo.max(0.05));
    for k in [8.0, 4.0, 2.0, 1.0] {
        b.push(lo - k);
    }
    let mut w = lo;
    while w < hi {
        b.push(w);
        w += 1.0;
    }
    b.push(hi);
    for k in [1.0, 2.0, 4.0, 8.0] {
        b.push(hi + k);
    }
    b.push(hi + 38.0 / e_hi.max(0.05));
    for &(c, width) in peaks {
        let mut d = 0.25 * width;
        while d < 0.5 * c {
            b.push(c.ln() + (-d / c).ln_1p());
            b.push(c.ln() + (d / c).ln_1p());
            d *= 4.0;
        }
    }
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.dedup_by(|p, q| (*p - *q).abs() < 1e-12);
    b
}

/// Fixed n-point Gauss–Legendre rule on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut rule = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                let kf = k as f64;
                p0 = ((2.0 * kf + 1.0) * x * p1 - kf * p2) / (kf + 1.0);
            }
            dp = nf * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule.reverse();
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, &Tolerance::rel(1e-14)).unwrap();
        let exact = (2f64.powi(10) - 1.0) / 10.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &Tolerance::rel(1e-10).with_max_subdivisions(2000)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn breakpoints_and_reversed_limits() {
        let tol = Tolerance::rel(1e-12);
        let r = integrate_breaks(|x: f64| (x - 1.0).abs(), &[0.0, 1.0, 3.0], &tol).unwrap();
        assert!((r.value - 2.5).abs() < 1e-12);
        let s = integrate(|x: f64| x.exp(), 1.0, 0.0, &tol).unwrap();
        assert!((s.value + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_keeps_partial_value() {
        let tol = Tolerance::rel(1e-15).with_max_subdivisions(2);
        match integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tol) {
            Err(Error::Budget { value, err_est }) => assert!(value > 0.0 && err_est > 0.0),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn rule_reproduces_estimate() {
        let f = |x: f64| (-x * x).exp() * (3.0 * x).cos();
        let (est, rule) = adaptive_rule(f, &[-4.0, 0.0, 4.0], &Tolerance::rel(1e-12)).unwrap();
        let applied: f64 = rule.iter().map(|&(x, w)| w * f(x)).sum();
        assert!((applied - est.value).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_weights() {
        for n in [5, 16, 40] {
            let rule = gauss_legendre(n);
            let w: f64 = rule.iter().map(|p| p.1).sum();
            assert!((w - 2.0).abs() < 1e-13);
            let m4: f64 = rule.iter().map(|p| p.1 * p.0.powi(4)).sum();
            assert!((m4 - 0.4).abs() < 1e-13);
        }
    }
}
