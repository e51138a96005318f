//! The weighted nonlocal double integral
//!
//!   W = (1/2) ∬ ν_ζ(r,s) |g(r) − g(s)|² m(r) m(s) (rs)^{2ζ} dr ds,   m(s) = s^{−p},
//!
//! for g supported in [a, b]. Splitting the plane into [a,b]² and the rest,
//!
//!   W = ∫_a^b dr m r^{2ζ} ∫_r^b ds ν |g(r)−g(s)|² m s^{2ζ}        (diagonal block)
//!     + ∫_a^b dr g(r)² m r^{2ζ} ∫_{s∉[a,b]} ν m s^{2ζ} ds         (off-diagonal block).
//!
//! The inner diagonal integral runs over the offset h = s − r on a log scale
//! and passes h to the Lévy kernel exactly. For h below a strip width δ the
//! difference is replaced by its midpoint Taylor form g'(r + h/2)·h, and the
//! piece below h_lo is added in closed form from ν ~ C h^{−1−α}.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::kernels::levy_value;
use crate::quad::{best_effort, integrate_breaks, Tolerance};

/// Strip width relative to the local scale.
const STRIP: f64 = 1e-3;
/// Offsets below this fraction of r are added analytically.
const H_LO: f64 = 1e-9;
/// The far tail s > FAR·b is integrated from the kernel's power decay.
const FAR: f64 = 1e3;

/// Relative accuracy floor of the blocks: the inner integrals are best-effort
/// and the strip uses a Taylor form, so the adaptive estimates alone are
/// optimistic.
const FLOOR: f64 = 1e-7;

const INNER: Tolerance = Tolerance {
    rel: 1e-10,
    abs: 0.0,
    max_subdivisions: 200,
};

const OUTER: Tolerance = Tolerance {
    rel: 1e-9,
    abs: 0.0,
    max_subdivisions: 400,
};

pub(crate) struct Weighted<'a> {
    pub zeta: f64,
    pub alpha: f64,
    pub p: f64,
    /// (g(r), g'(r)); zero outside the support.
    pub g: &'a dyn Fn(f64) -> (f64, f64),
    /// Support endpoints and interior kinks, ascending.
    pub kinks: Vec<f64>,
}

/// (value, error) of the diagonal and off-diagonal blocks.
pub(crate) struct Blocks {
    pub diagonal: (f64, f64),
    pub off_diagonal: (f64, f64),
}

impl Weighted<'_> {
    fn support(&self) -> (f64, f64) {
        (self.kinks[0], self.kinks[self.kinks.len() - 1])
    }

    fn nu(&self, r: f64, s: f64, h: f64) -> f64 {
        levy_value(self.zeta, self.alpha, r, s, h).unwrap_or(f64::NAN)
    }

    fn measure(&self, s: f64) -> f64 {
        s.powf(2.0 * self.zeta - self.p)
    }

    /// ∫_r^b ν(r,s) |g(r)−g(s)|² m(s) s^{2ζ} ds.
    fn inner(&self, r: f64) -> Result<f64> {
        let (a, b) = self.support();
        let span = b - r;
        if span <= 0.0 {
            return Ok(0.0);
        }
        let (g0, d0) = (self.g)(r);
        let delta = STRIP * r.min(b - a);
        let h_lo = (H_LO * r).min(1e-6 * span);
        let kink_inside = |h: f64| self.kinks.iter().any(|&k| k > r && k <= r + h);
        let integrand = |v: f64| {
            let h = r * v.exp();
            let s = r + h;
            let diff = if h < delta && !kink_inside(h) {
                (self.g)(r + 0.5 * h).1 * h
            } else {
                (self.g)(s).0 - g0
            };
            h * self.nu(r, s, h) * diff * diff * self.measure(s)
        };
        let (v_lo, v_hi) = ((h_lo / r).ln(), (span / r).ln());
        let mut pts = Vec::new();
        let mut v = v_lo;
        while v < v_hi {
            pts.push(v);
            v += 2.0;
        }
        pts.push(v_hi);
        if delta < span {
            pts.push((delta / r).ln());
        }
        for &k in &self.kinks {
            if k > r && k < b {
                pts.push(((k - r) / r).ln());
            }
        }
        sort_dedup(&mut pts);
        let body = best_effort(integrate_breaks(integrand, &pts, &INNER))?.value;
        // ν(r, r+h) ≈ C h^{−1−α} below h_lo
        let head = d0 * d0 * self.measure(r) * self.nu(r, r + h_lo, h_lo) * h_lo.powi(3) / (2.0 - self.alpha);
        Ok(body + head)
    }

    /// ∫_{s∉[a,b]} ν(r,s) m(s) s^{2ζ} ds.
    fn exterior(&self, r: f64) -> Result<f64> {
        let (a, b) = self.support();
        let far = FAR * b;
        // right: s = b + e^w, offset h = (b − r) + e^w
        let d = b - r;
        let right = |w: f64| {
            let e = w.exp();
            let h = d + e;
            e * self.nu(r, r + h, h) * self.measure(b + e)
        };
        let top = (far - b).ln();
        let pts = offset_breaks(d.ln(), top);
        let mut total = best_effort(integrate_breaks(right, &pts, &INNER))?.value;
        // tail beyond `far`: ν(r,s) s^{2ζ+1+α} is constant up to O(r²/s²)
        let c = self.nu(r, far, far - r) * far.powf(2.0 * self.zeta + 1.0 + self.alpha);
        total += c * far.powf(-self.alpha - self.p) / (self.alpha + self.p);

        // left near a: s = a − e^w, offset h = −((r − a) + e^w)
        let d = r - a;
        let left = |w: f64| {
            let e = w.exp();
            let h = d + e;
            e * self.nu(r, a - e, -h) * self.measure(a - e)
        };
        let top = (0.5 * a).ln();
        if d.ln() - 30.0 < top {
            let pts = offset_breaks(d.ln(), top);
            total += best_effort(integrate_breaks(left, &pts, &INNER))?.value;
        }
        // s < a/2 on a log scale, decaying like s^{2ζ+1−p}
        let decay = 2.0 * self.zeta + 1.0 - self.p;
        let bottom = top - 36.0 / decay;
        let mut pts = Vec::new();
        let mut y = bottom;
        while y < top {
            pts.push(y);
            y += 2.0;
        }
        pts.push(top);
        let deep = |y: f64| {
            let s = y.exp();
            s * self.nu(r, s, s - r) * self.measure(s)
        };
        total += best_effort(integrate_breaks(deep, &pts, &INNER))?.value;
        Ok(total)
    }

    pub fn evaluate(&self) -> Result<Blocks> {
        let (a, b) = self.support();
        let mut pts: Vec<f64> = self.kinks.iter().map(|k| k.ln()).collect();
        let n = ((b / a).ln() / 0.1).ceil() as usize;
        for k in 1..n {
            pts.push(a.ln() + (b / a).ln() * k as f64 / n as f64);
        }
        sort_dedup(&mut pts);
        let mut err = None;
        let mut keep = |v: Result<f64>| match v {
            Ok(x) => x,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        };
        let diag = integrate_breaks(
            |x| {
                let r = x.exp();
                r * self.measure(r) * keep(self.inner(r))
            },
            &pts,
            &OUTER,
        );
        let off = integrate_breaks(
            |x| {
                let r = x.exp();
                let g = (self.g)(r).0;
                if g == 0.0 {
                    return 0.0;
                }
                r * g * g * self.measure(r) * keep(self.exterior(r))
            },
            &pts,
            &OUTER,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let diag = best_effort(diag)?;
        let off = best_effort(off)?;
        Ok(Blocks {
            diagonal: (diag.value, diag.err + FLOOR * diag.value.abs()),
            off_diagonal: (off.value, off.err + FLOOR * off.value.abs()),
        })
    }
}

/// Breaks in w for ∫ dw e^w f(d + e^w) up to `top`: dense around ln d, where
/// the offset crosses over from d to e^w.
fn offset_breaks(ln_d: f64, top: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = [-30.0, -16.0, -8.0, -4.0, -2.0, 0.0, 1.0]
        .iter()
        .map(|k| ln_d + k)
        .filter(|&w| w < top)
        .collect();
    let mut w = ln_d + 2.0;
    while w < top {
        pts.push(w);
        w += 2.0;
    }
    pts.push(top);
    sort_dedup(&mut pts);
    pts
}

fn sort_dedup(pts: &mut Vec<f64>) {
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup_by(|p, q| (*p - *q).abs() < 1e-12);
}
