//! The Duhamel operator at unit time, discretized on a log grid.
//!
//! With F(x,y) = p_{ζ,η}(1,x,y) and σ = 1−τ, λ = σ^{−1/α}, the scaling relation
//! turns the Duhamel equation into a fixed-point problem at unit time:
//!
//!   F(x,y) = p(1,x,y) + ∫₀¹ dτ ∫ dz z^{2ζ} p(τ,x,z) q(z) σ^{−(2ζ+1)/α} F(λz, λy).
//!
//! The unknown is the ratio G = F / (w(x) w(y) p(1,x,y)), w(x) = (1 + 1/x)^η,
//! which stays bounded and smooth in (ln x, ln y) where F itself has narrow
//! diagonal peaks. The weight and free kernel are applied exactly at each
//! quadrature node and only G is interpolated (product integration), so the
//! rule resolves peaks of width τ^{1/α} and σ^{1/α} regardless of the grid.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::grid::{SpaceGrid, STENCIL};
use crate::kernels::FreeKernel;
use crate::quad::{gauss_legendre, Rule};

/// Cut-off of the τ-integral near either end, relative to the local time
/// scale min(1, x^α); the omitted pieces are added in their limiting form.
const END_CUT: f64 = 1e-4;
/// Width of the τ panels in ln τ (and ln(1−τ)).
const TIME_PANEL: f64 = 2.0;
/// Integrand decay, in units of ln, kept in the z-tails.
const TAIL_DECADES: f64 = 32.0;

pub(crate) struct UnitProblem<'a> {
    pub kernel: &'a FreeKernel,
    pub zeta: f64,
    pub alpha: f64,
    pub eta: f64,
    pub kappa: f64,
    pub grid: SpaceGrid,
    pub gl: Rule,
}

impl UnitProblem<'_> {
    fn dim(&self) -> f64 {
        2.0 * self.zeta + 1.0
    }

    pub fn weight(&self, x: f64) -> f64 {
        (1.0 + 1.0 / x).powf(self.eta)
    }

    /// The normalization E(x,y) = w(x) w(y) p(1,x,y) of the ratio G.
    pub fn envelope(&self, x: f64, y: f64) -> f64 {
        self.weight(x) * self.weight(y) * self.kernel.value(1.0, x, y)
    }

    fn q(&self, z: f64) -> f64 {
        self.kappa * z.powf(-self.alpha)
    }

    /// Nodes (τ, 1−τ, weight) on (0, 1), geometric towards both ends.
    fn time_rule(&self, x: f64, y: f64) -> (Vec<(f64, f64, f64)>, f64, f64) {
        let tau_min = END_CUT * x.powf(self.alpha).min(1.0);
        let sigma_min = END_CUT * y.powf(self.alpha).min(1.0);
        let mut out = Vec::new();
        for (lo, flip) in [(tau_min, false), (sigma_min, true)] {
            let (a, b) = (lo.ln(), 0.5f64.ln());
            let panels = ((b - a) / TIME_PANEL).ceil().max(1.0) as usize;
            let h = (b - a) / panels as f64;
            for k in 0..panels {
                let c = a + (k as f64 + 0.5) * h;
                for &(g, wg) in &self.gl {
                    let e = (c + 0.5 * h * g).exp();
                    let wt = 0.5 * h * wg * e;
                    out.push(if flip { (1.0 - e, e, wt) } else { (e, 1.0 - e, wt) });
                }
            }
        }
        (out, tau_min, sigma_min)
    }

    /// Nodes in z for fixed τ: peaks at x (width a) and y (width b), power
    /// behaviour at both ends.
    fn space_rule(&self, x: f64, y: f64, a: f64, b: f64, out: &mut Vec<(f64, f64)>, breaks: &mut Vec<f64>) {
        out.clear();
        breaks.clear();
        let e_lo = self.dim() - self.alpha - self.eta;
        let e_hi = self.dim() + 3.0 * self.alpha;
        let lo = x.min(y).min(a).min(b).ln();
        let hi = x.max(y).max(a).max(b).ln();
        let mut w = lo;
        let mut step = 1.0;
        let cap_lo = (3.0 / e_lo).max(1.0);
        while w > lo - TAIL_DECADES / e_lo {
            breaks.push(w);
            w -= step;
            step = (2.0 * step).min(cap_lo);
        }
        breaks.push(w);
        let n_mid = ((hi - lo) / 0.75).ceil() as usize;
        for k in 1..n_mid {
            breaks.push(lo + (hi - lo) * k as f64 / n_mid as f64);
        }
        let mut w = hi;
        let mut step = 1.0;
        let cap_hi = (3.0 / e_hi).max(1.0);
        while w < hi + TAIL_DECADES / e_hi {
            breaks.push(w);
            w += step;
            step = (2.0 * step).min(cap_hi);
        }
        breaks.push(w);
        for (c, width) in [(x, a), (y, b)] {
            if width >= 0.5 * c {
                continue;
            }
            breaks.push(c.ln());
            let mut d = 0.5 * width;
            while d < 0.5 * c {
                breaks.push((c - d).ln());
                breaks.push((c + d).ln());
                d *= 4.0;
            }
        }
        breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
        breaks.dedup_by(|p, q| (*p - *q).abs() < 1e-12);
        for pair in breaks.windows(2) {
            let (l, r) = (pair[0], pair[1]);
            let (c, h) = (0.5 * (l + r), 0.5 * (r - l));
            for &(g, wg) in &self.gl {
                let z = (c + h * g).exp();
                out.push((z, h * wg * z));
            }
        }
    }

    /// Row of the discretized operator for the target node (i, j), written
    /// into `row` (length n², indexed by i'·n + j').
    pub fn assemble_row(&self, i: usize, j: usize, row: &mut [f64], scratch: &mut Scratch) {
        let n = self.grid.len();
        let x = self.grid.node(i);
        let y = self.grid.node(j);
        let ex = self.envelope(x, y);
        row.iter_mut().for_each(|v| *v = 0.0);
        let (times, tau_min, sigma_min) = self.time_rule(x, y);
        // τ < τ_min: the z-integral has collapsed onto z = x
        row[i * n + j] += tau_min * self.q(x);
        // σ < σ_min: the perturbed factor has collapsed onto z = y, where G
        // sits at its large-argument end value
        row[n * n - 1] += sigma_min * self.q(y) / (self.weight(x) * self.weight(y));
        let d_over_a = self.dim() / self.alpha;
        for &(tau, sigma, wt) in &times {
            let lam = sigma.powf(-1.0 / self.alpha);
            let ly = lam * y;
            let (j0, wy) = self.grid.stencil(ly);
            let pre = wt * sigma.powf(-d_over_a) / ex * self.weight(ly);
            self.space_rule(
                x,
                y,
                tau.powf(1.0 / self.alpha),
                sigma.powf(1.0 / self.alpha),
                &mut scratch.nodes,
                &mut scratch.breaks,
            );
            let v = &mut scratch.acc;
            v.iter_mut().for_each(|e| *e = 0.0);
            for &(z, wz) in &scratch.nodes {
                let k1 = z.powf(2.0 * self.zeta) * self.kernel.value(tau, x, z) * self.q(z);
                let lz = lam * z;
                let e2 = self.weight(lz) * self.kernel.value(1.0, lz, ly);
                let c = pre * wz * k1 * e2;
                if c == 0.0 || !c.is_finite() {
                    continue;
                }
                let (i0, wx) = self.grid.stencil(lz);
                for a in 0..STENCIL {
                    v[i0 + a] += c * wx[a];
                }
            }
            for (a, &va) in v.iter().enumerate() {
                if va == 0.0 {
                    continue;
                }
                let base = a * n + j0;
                for b in 0..STENCIL {
                    row[base + b] += va * wy[b];
                }
            }
        }
    }

    /// The free kernel in ratio form, 1/(w(x) w(y)) at the nodes.
    pub fn base(&self) -> Vec<f64> {
        let n = self.grid.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = 1.0 / (self.weight(self.grid.node(i)) * self.weight(self.grid.node(j)));
            }
        }
        g
    }

    pub fn new_scratch(&self) -> Scratch {
        Scratch {
            nodes: Vec::new(),
            breaks: Vec::new(),
            acc: vec![0.0; self.grid.len()],
        }
    }
}

pub(crate) struct Scratch {
    nodes: Vec<(f64, f64)>,
    breaks: Vec<f64>,
    acc: Vec<f64>,
}

pub(crate) fn default_rule(nodes: usize) -> Rule {
    gauss_legendre(nodes.max(2))
}

/// Dense operator, row-major over the n² target nodes.
pub(crate) struct Operator {
    pub size: usize,
    pub matrix: Vec<f64>,
}

impl Operator {
    pub fn assemble(problem: &UnitProblem<'_>) -> Operator {
        let n = problem.grid.len();
        let size = n * n;
        let mut matrix = vec![0.0; size * size];
        let mut scratch = problem.new_scratch();
        for i in 0..n {
            for j in 0..n {
                let t = i * n + j;
                problem.assemble_row(i, j, &mut matrix[t * size..(t + 1) * size], &mut scratch);
            }
        }
        Operator { size, matrix }
    }

    pub fn apply(&self, g: &[f64], out: &mut [f64]) {
        for (t, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[t * self.size..(t + 1) * self.size];
            *o = row.iter().zip(g).map(|(a, b)| a * b).sum();
        }
    }
}
