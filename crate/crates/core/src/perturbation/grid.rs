//! Uniform grid in ln x with six-point Lagrange interpolation, clamped to
//! the end values outside the grid.

#[allow(unused_imports)]
use num_traits::Float;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub(crate) const STENCIL: usize = 8;

/// Nodes x_k = exp(−half_width + k·step), k = 0..n.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SpaceGrid {
    pub half_width: f64,
    pub step: f64,
}

impl Default for SpaceGrid {
    fn default() -> Self {
        SpaceGrid {
            half_width: 8.0,
            step: 0.2,
        }
    }
}

impl SpaceGrid {
    pub fn len(&self) -> usize {
        (2.0 * self.half_width / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        (-self.half_width + k as f64 * self.step).exp()
    }

    pub fn nodes(&self) -> alloc::vec::Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// First stencil index and the six Lagrange weights for the value at x.
    pub(crate) fn stencil(&self, x: f64) -> (usize, [f64; STENCIL]) {
        let n = self.len();
        let p = (x.ln() + self.half_width) / self.step;
        let mut w = [0.0; STENCIL];
        if !(p > 0.0) {
            w[0] = 1.0;
            return (0, w);
        }
        if p >= (n - 1) as f64 {
            w[STENCIL - 1] = 1.0;
            return (n - STENCIL, w);
        }
        let m = p.floor() as usize;
        let start = m.saturating_sub(STENCIL / 2 - 1).min(n - STENCIL);
        let q = p - start as f64;
        for (a, wa) in w.iter_mut().enumerate() {
            let mut v = 1.0;
            for b in 0..STENCIL {
                if b != a {
                    v *= (q - b as f64) / (a as f64 - b as f64);
                }
            }
            *wa = v;
        }
        (start, w)
    }

    /// Interpolates a row-major n×n table at (x, y).
    pub(crate) fn interpolate(&self, table: &[f64], x: f64, y: f64) -> f64 {
        let n = self.len();
        let (i0, wx) = self.stencil(x);
        let (j0, wy) = self.stencil(y);
        let mut acc = 0.0;
        for a in 0..STENCIL {
            if wx[a] == 0.0 {
                continue;
            }
            let row = &table[(i0 + a) * n + j0..(i0 + a) * n + j0 + STENCIL];
            let mut r = 0.0;
            for b in 0..STENCIL {
                r += wy[b] * row[b];
            }
            acc += wx[a] * r;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn reproduces_quintics_in_log_coordinate() {
        let g = SpaceGrid::default();
        let f = |u: f64| 0.3 - u + 0.2 * u * u - 0.01 * u.powi(5);
        let vals: Vec<f64> = g.nodes().iter().map(|x| f(x.ln())).collect();
        for &u in &[-7.9, -3.0, 0.0, 0.1, 5.5, 7.99] {
            let (k, w) = g.stencil(u.exp());
            let v: f64 = (0..STENCIL).map(|a| w[a] * vals[k + a]).sum();
            assert!((v - f(u)).abs() < 1e-10 * (1.0 + f(u).abs()), "u={u}");
        }
    }

    #[test]
    fn clamps_outside() {
        let g = SpaceGrid::default();
        let n = g.len();
        let t: Vec<f64> = (0..n * n).map(|k| k as f64).collect();
        assert_eq!(g.interpolate(&t, 1e-9, 1e-9), 0.0);
        assert_eq!(g.interpolate(&t, 1e9, 1e9), (n * n - 1) as f64);
        assert!((g.interpolate(&t, g.node(3), g.node(5)) - (3 * n + 5) as f64).abs() < 1e-9);
    }
}
