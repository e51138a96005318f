//! Compactly supported radial test functions.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Interpolation between the samples of a tabulated function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Interpolation {
    #[default]
    Linear,
    /// C¹ cubic Hermite with centered-difference slopes.
    Cubic,
}

/// A radial test function compactly supported in (0, ∞).
///
/// `SmoothBump` is A·exp(1 − 1/(1−x²)) for |x| < 1 and 0 otherwise, with
/// x = (r − center)/(width/2), so the support is [center − width/2,
/// center + width/2]. With `log = true` the bump is taken in ln r instead
/// (x = (ln r − ln center)/(width/2)), and `power` multiplies it by
/// r^{−power}; together they give truncated ground-state profiles.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TestFunction {
    SmoothBump {
        center: f64,
        width: f64,
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        amplitude: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        log: bool,
        #[cfg_attr(feature = "serde", serde(default))]
        power: f64,
    },
    /// Piecewise linear hat: 0 at center ± width/2, `amplitude` at center.
    PiecewiseLinearHat {
        center: f64,
        width: f64,
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        amplitude: f64,
    },
    /// Samples on increasing nodes; the first and last values must be 0 and
    /// the function vanishes outside [nodes[0], nodes[last]].
    Tabulated {
        nodes: Vec<f64>,
        values: Vec<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        interpolation: Interpolation,
    },
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

/// sup over |x| < 1 of |d/dx exp(1 − 1/(1−x²))|, by golden-section search
/// on g(x) = 2x/(1−x²)² · exp(1 − 1/(1−x²)), which is unimodal on (0, 1).
fn bump_slope_max() -> f64 {
    let g = |x: f64| {
        let q = 1.0 - x * x;
        2.0 * x / (q * q) * (1.0 - 1.0 / q).exp()
    };
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    g(0.5 * (a + b))
}

impl TestFunction {
    pub fn smooth_bump(center: f64, width: f64, amplitude: f64) -> Result<Self> {
        let u = TestFunction::SmoothBump {
            center,
            width,
            amplitude,
            log: false,
            power: 0.0,
        };
        u.validate()?;
        Ok(u)
    }

    /// r^{−power} times a bump in ln r centered at ln `center` with log-width
    /// `width`.
    pub fn log_bump(center: f64, width: f64, power: f64) -> Result<Self> {
        let u = TestFunction::SmoothBump {
            center,
            width,
            amplitude: 1.0,
            log: true,
            power,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn hat(center: f64, width: f64, amplitude: f64) -> Result<Self> {
        let u = TestFunction::PiecewiseLinearHat { center, width, amplitude };
        u.validate()?;
        Ok(u)
    }

    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        let u = TestFunction::Tabulated {
            nodes,
            values,
            interpolation,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::SmoothBump {
                center,
                width,
                amplitude,
                log,
                power,
            } => {
                ensure!(center.is_finite() && width.is_finite() && *width > 0.0, "bump needs finite center and positive width");
                ensure!(amplitude.is_finite() && power.is_finite(), "bump amplitude and power must be finite");
                ensure!(*center > 0.0, "bump center {center} must be positive");
                ensure!(*log || *center > 0.5 * width, "bump support [{}, {}] must lie in (0, inf)", center - 0.5 * width, center + 0.5 * width);
            }
            TestFunction::PiecewiseLinearHat { center, width, amplitude } => {
                ensure!(center.is_finite() && width.is_finite() && *width > 0.0, "hat needs finite center and positive width");
                ensure!(amplitude.is_finite(), "hat amplitude must be finite");
                ensure!(*center > 0.5 * width, "hat support must lie in (0, inf)");
            }
            TestFunction::Tabulated { nodes, values, .. } => {
                ensure!(nodes.len() >= 3 && nodes.len() == values.len(), "a table needs at least 3 nodes and one value per node");
                ensure!(nodes[0] > 0.0, "table support must lie in (0, inf)");
                ensure!(nodes.windows(2).all(|w| w[1] > w[0]) && nodes.iter().all(|x| x.is_finite()), "table nodes must increase");
                ensure!(values.iter().all(|v| v.is_finite()), "table values must be finite");
                ensure!(values[0] == 0.0 && values[values.len() - 1] == 0.0, "table values must vanish at both ends");
            }
        }
        Ok(())
    }

    /// The support [a, b].
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::SmoothBump { center, width, log: true, .. } => {
                (center * (-0.5 * width).exp(), center * (0.5 * width).exp())
            }
            TestFunction::SmoothBump { center, width, .. } | TestFunction::PiecewiseLinearHat { center, width, .. } => {
                (center - 0.5 * width, center + 0.5 * width)
            }
            TestFunction::Tabulated { nodes, .. } => (nodes[0], nodes[nodes.len() - 1]),
        }
    }

    /// Points in the support where the function is not smooth, endpoints
    /// included, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.support();
        match self {
            TestFunction::SmoothBump { .. } => alloc::vec![a, b],
            TestFunction::PiecewiseLinearHat { center, .. } => alloc::vec![a, *center, b],
            TestFunction::Tabulated { nodes, .. } => nodes.clone(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// (u(r), u'(r)); at kinks the right derivative.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (a, b) = self.support();
        if !(r > a && r < b) {
            return (0.0, 0.0);
        }
        match self {
            TestFunction::SmoothBump {
                center,
                width,
                amplitude,
                log,
                power,
            } => {
                let half = 0.5 * width;
                let (x, dx) = if *log { ((r / center).ln() / half, 1.0 / (half * r)) } else { ((r - center) / half, 1.0 / half) };
                let q = 1.0 - x * x;
                let e = amplitude * (1.0 - 1.0 / q).exp();
                let de = e * (-2.0 * x / (q * q)) * dx;
                if *power == 0.0 {
                    (e, de)
                } else {
                    let p = r.powf(-power);
                    (e * p, de * p - power * e * p / r)
                }
            }
            TestFunction::PiecewiseLinearHat { center, width, amplitude } => {
                let half = 0.5 * width;
                let slope = amplitude / half;
                if r < *center {
                    (slope * (r - a), slope)
                } else {
                    (slope * (b - r), -slope)
                }
            }
            TestFunction::Tabulated {
                nodes,
                values,
                interpolation,
            } => {
                let k = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1) - 1;
                let (x0, x1) = (nodes[k], nodes[k + 1]);
                let (y0, y1) = (values[k], values[k + 1]);
                let h = x1 - x0;
                match interpolation {
                    Interpolation::Linear => (y0 + (y1 - y0) * (r - x0) / h, (y1 - y0) / h),
                    Interpolation::Cubic => {
                        let slope = |i: usize| -> f64 {
                            if i == 0 || i == nodes.len() - 1 {
                                0.0
                            } else {
                                (values[i + 1] - values[i - 1]) / (nodes[i + 1] - nodes[i - 1])
                            }
                        };
                        let (m0, m1) = (slope(k) * h, slope(k + 1) * h);
                        let t = (r - x0) / h;
                        let (t2, t3) = (t * t, t * t * t);
                        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
                        let dv = (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * m1;
                        (v, dv / h)
                    }
                }
            }
        }
    }

    /// An upper bound for sup |u'|.
    pub fn derivative_bound(&self) -> f64 {
        match self {
            TestFunction::SmoothBump {
                width,
                amplitude,
                log: false,
                ..
            } => amplitude.abs() * bump_slope_max() / (0.5 * width),
            TestFunction::SmoothBump { .. } => {
                // no closed form with the log map and power factor; bound by
                // sampling plus a margin for the spacing
                let (a, b) = self.support();
                let n = 4000;
                let mut m = 0.0f64;
                for k in 1..n {
                    let r = a + (b - a) * k as f64 / n as f64;
                    m = m.max(self.derivative(r).abs());
                }
                1.01 * m
            }
            TestFunction::PiecewiseLinearHat { width, amplitude, .. } => amplitude.abs() / (0.5 * width),
            TestFunction::Tabulated { nodes, .. } => {
                let (a, b) = self.support();
                let n = 40 * nodes.len();
                let mut m = 0.0f64;
                for k in 0..n {
                    let r = a + (b - a) * (k as f64 + 0.5) / n as f64;
                    m = m.max(self.derivative(r).abs());
                }
                1.01 * m
            }
        }
    }

    /// The function multiplied by a constant.
    pub fn scaled(&self, c: f64) -> TestFunction {
        match self.clone() {
            TestFunction::SmoothBump {
                center,
                width,
                amplitude,
                log,
                power,
            } => TestFunction::SmoothBump {
                center,
                width,
                amplitude: c * amplitude,
                log,
                power,
            },
            TestFunction::PiecewiseLinearHat { center, width, amplitude } => TestFunction::PiecewiseLinearHat {
                center,
                width,
                amplitude: c * amplitude,
            },
            TestFunction::Tabulated {
                nodes,
                values,
                interpolation,
            } => TestFunction::Tabulated {
                nodes,
                values: values.iter().map(|v| c * v).collect(),
                interpolation,
            },
        }
    }

    /// u_λ(r) = u(λr).
    pub fn dilated(&self, lambda: f64) -> TestFunction {
        match self.clone() {
            TestFunction::SmoothBump {
                center,
                width,
                amplitude,
                log,
                power,
            } => TestFunction::SmoothBump {
                center: center / lambda,
                width: if log { width } else { width / lambda },
                amplitude: if power == 0.0 { amplitude } else { amplitude * lambda.powf(-power) },
                log,
                power,
            },
            TestFunction::PiecewiseLinearHat { center, width, amplitude } => TestFunction::PiecewiseLinearHat {
                center: center / lambda,
                width: width / lambda,
                amplitude,
            },
            TestFunction::Tabulated {
                nodes,
                values,
                interpolation,
            } => TestFunction::Tabulated {
                nodes: nodes.iter().map(|x| x / lambda).collect(),
                values,
                interpolation,
            },
        }
    }
}

/// The five canonical smooth bumps (center, width) = (0.5, 0.5), (1, 0.5),
/// (1, 1), (2, 0.5), (2, 1): every pairing of centers {0.5, 1, 2} with widths
/// {0.5, 1} whose support stays inside (0, ∞).
pub fn bump_suite() -> Vec<TestFunction> {
    [(0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (2.0, 0.5), (2.0, 1.0)]
        .iter()
        .map(|&(c, w)| TestFunction::smooth_bump(c, w, 1.0).expect("suite bumps are admissible"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_differences() {
        let fs = [
            TestFunction::smooth_bump(1.0, 0.8, 2.0).unwrap(),
            TestFunction::log_bump(1.0, 3.0, 0.7).unwrap(),
            TestFunction::hat(2.0, 1.0, 1.5).unwrap(),
            TestFunction::tabulated(alloc::vec![0.5, 0.8, 1.0, 1.6, 2.0], alloc::vec![0.0, 1.0, 0.5, 2.0, 0.0], Interpolation::Cubic).unwrap(),
        ];
        for u in &fs {
            let (a, b) = u.support();
            for k in 1..50 {
                let r = a + (b - a) * (k as f64 + 0.37) / 51.0;
                let h = 1e-6 * r;
                let fd = (u.value(r + h) - u.value(r - h)) / (2.0 * h);
                assert!((fd - u.derivative(r)).abs() < 1e-5 * (1.0 + fd.abs()), "{u:?} at {r}");
                assert!(u.derivative(r).abs() <= u.derivative_bound());
            }
        }
    }

    #[test]
    fn bump_slope_constant() {
        // the maximum of |d/dx e^{1−1/(1−x²)}| on (−1, 1)
        let m = bump_slope_max();
        let mut brute = 0.0f64;
        for k in 1..200000 {
            let x = k as f64 / 200000.0;
            let q = 1.0 - x * x;
            brute = brute.max(2.0 * x / (q * q) * (1.0 - 1.0 / q).exp());
        }
        assert!((m - brute).abs() < 1e-8, "{m} vs {brute}");
    }

    #[test]
    fn support_and_vanishing() {
        let u = TestFunction::smooth_bump(1.5, 1.0, 1.0).unwrap();
        assert_eq!(u.support(), (1.0, 2.0));
        assert_eq!(u.value(1.0), 0.0);
        assert_eq!(u.value(2.5), 0.0);
        assert_eq!(u.value(1.5), 1.0);
        assert!(TestFunction::smooth_bump(0.5, 1.0, 1.0).is_err());
        assert!(TestFunction::tabulated(alloc::vec![1.0, 2.0, 3.0], alloc::vec![0.0, 1.0, 1.0], Interpolation::Linear).is_err());
    }

    #[test]
    fn dilation_and_scaling() {
        let u = TestFunction::log_bump(2.0, 2.0, 0.5).unwrap();
        let v = u.dilated(3.0);
        let w = u.scaled(-2.0);
        for &r in &[0.5, 0.7, 1.1, 2.0, 3.5] {
            assert!((v.value(r) - u.value(3.0 * r)).abs() < 1e-14);
            assert_eq!(w.value(r), -2.0 * u.value(r));
        }
    }

    #[test]
    fn suite_has_five_admissible_bumps() {
        let s = bump_suite();
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(|u| u.support().0 > 0.0));
    }
}
