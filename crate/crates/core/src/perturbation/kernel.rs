//! The perturbed kernel: exact at α = 2, otherwise a unit-time ratio table
//! obtained from the discretized Duhamel equation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::duhamel::{default_rule, Operator, UnitProblem};
use super::grid::SpaceGrid;
use super::krylov::gmres;
use super::{envelope_with, SeriesControl};
use crate::error::{ensure, Error, Result};
use crate::kernels::{EvalPoint, EvalResult, Envelope, FreeKernel, Method};
use crate::params::CouplingParams;

const GMRES_RESTART: usize = 60;

/// How the table was obtained and how well it converged.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SolveDiagnostics {
    /// Series terms summed (series path).
    pub terms: usize,
    /// Largest nodewise ratio term_n / term_{n−1} at the last term.
    pub last_ratio: f64,
    /// Certified relative bound on the omitted series tail.
    pub tail_bound: f64,
    /// Krylov iterations of the linear solve (Picard path).
    pub picard_iterations: usize,
    /// Final relative fixed-point residual max|g₀ + TG − G| / max|G|.
    pub picard_residual: f64,
    /// Largest relative asymmetry |G(x,y) − G(y,x)| before symmetrization, a
    /// proxy for the discretization error.
    pub asymmetry: f64,
}

/// Unit-time ratio G = p_{ζ,η}(1,x,y) / (w(x) w(y) p_ζ(1,x,y)) on the grid,
/// w(x) = (1 + 1/x)^η.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PerturbedTable {
    pub params: CouplingParams,
    pub grid: SpaceGrid,
    pub method: Method,
    pub ratio: Vec<f64>,
    pub diagnostics: SolveDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Path {
    Free,
    ExactAlpha2,
    Table,
}

pub struct PerturbedKernel {
    params: CouplingParams,
    free: FreeKernel,
    control: SeriesControl,
    path: Path,
    table: Option<PerturbedTable>,
    operator: Option<Operator>,
}

impl core::fmt::Debug for PerturbedKernel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PerturbedKernel")
            .field("params", &self.params)
            .field("path", &self.path)
            .field("diagnostics", &self.table.as_ref().map(|t| t.diagnostics))
            .finish()
    }
}

impl PerturbedKernel {
    /// Builds the kernel. For α < 2 and η ≠ 0 this assembles and solves the
    /// unit-time Duhamel system, which is the expensive step.
    pub fn new(params: CouplingParams, control: SeriesControl) -> Result<Self> {
        let mut k = Self::unsolved(params, control)?;
        if k.path == Path::Table {
            k.solve()?;
            // only duhamel_term needs it, and it reassembles on demand
            k.operator = None;
        }
        Ok(k)
    }

    /// Validated kernel without the table; only `duhamel_term` works on it
    /// when α < 2 and η ≠ 0.
    pub(crate) fn unsolved(params: CouplingParams, control: SeriesControl) -> Result<Self> {
        let checked = CouplingParams::new(params.zeta, params.alpha, params.eta)?;
        let params = CouplingParams {
            kappa: params.kappa,
            ..checked
        };
        control.validate()?;
        let free = FreeKernel::new(params.zeta, params.alpha)?;
        let path = if params.alpha == 2.0 {
            Path::ExactAlpha2
        } else if params.eta == 0.0 {
            Path::Free
        } else {
            Path::Table
        };
        Ok(PerturbedKernel {
            params,
            free,
            control,
            path,
            table: None,
            operator: None,
        })
    }

    /// Rebuilds from a stored table; `duhamel_term` will reassemble the
    /// operator on first use.
    pub fn from_table(table: PerturbedTable, control: SeriesControl) -> Result<Self> {
        let n = table.grid.len();
        ensure!(table.ratio.len() == n * n, "table has {} entries, grid needs {}", table.ratio.len(), n * n);
        ensure!(table.params.alpha < 2.0 && table.params.eta != 0.0, "only the grid path is tabulated");
        let mut k = Self::unsolved(table.params, SeriesControl { space_grid: table.grid, ..control })?;
        k.table = Some(table);
        Ok(k)
    }

    pub fn params(&self) -> CouplingParams {
        self.params
    }

    pub fn control(&self) -> &SeriesControl {
        &self.control
    }

    pub fn free(&self) -> &FreeKernel {
        &self.free
    }

    pub fn table(&self) -> Option<&PerturbedTable> {
        self.table.as_ref()
    }

    pub fn method(&self) -> Method {
        match self.path {
            Path::Free => self.free.default_method(),
            Path::ExactAlpha2 => Method::ClosedAlpha2,
            Path::Table => self.table.as_ref().map(|t| t.method).unwrap_or(Method::Series),
        }
    }

    fn problem(&self) -> UnitProblem<'_> {
        UnitProblem {
            kernel: &self.free,
            zeta: self.params.zeta,
            alpha: self.params.alpha,
            eta: self.params.eta,
            kappa: self.params.kappa,
            grid: self.control.space_grid,
            gl: default_rule(self.control.time_grid),
        }
    }

    fn solve(&mut self) -> Result<()> {
        let problem = self.problem();
        let op = Operator::assemble(&problem);
        let base = problem.base();
        drop(problem);
        let (mut g, method, mut diag) = if self.params.eta > 0.0 {
            let (g, d) = series_sum(&op, &base, &self.control)?;
            (g, Method::Series, d)
        } else {
            let (g, d) = picard_solve(&op, &base, &self.control)?;
            (g, Method::Picard, d)
        };
        diag.asymmetry = symmetrize(&mut g, self.control.space_grid.len());
        self.table = Some(PerturbedTable {
            params: self.params,
            grid: self.control.space_grid,
            method,
            ratio: g,
            diagnostics: diag,
        });
        self.operator = Some(op);
        Ok(())
    }

    fn unit_envelope(&self, x: f64, y: f64) -> f64 {
        let w = |v: f64| (1.0 + 1.0 / v).powf(self.params.eta);
        w(x) * w(y) * self.free.value(1.0, x, y)
    }

    /// b(x)b(y) minus its grid interpolant, b = 1/w.
    fn free_part_defect(&self, grid: &SpaceGrid, x: f64, y: f64) -> f64 {
        let b = |v: f64| (1.0 + 1.0 / v).powf(-self.params.eta);
        let interp = |v: f64| {
            let (k0, wk) = grid.stencil(v);
            wk.iter().enumerate().map(|(a, w)| w * b(grid.node(k0 + a))).sum::<f64>()
        };
        b(x) * b(y) - interp(x) * interp(y)
    }

    fn scale(&self, t: f64) -> (f64, f64) {
        let l = t.powf(1.0 / self.params.alpha);
        (l, t.powf(-(2.0 * self.params.zeta + 1.0) / self.params.alpha))
    }

    /// p_{ζ,η}^{(α)}(t, r, s).
    pub fn eval(&self, point: EvalPoint) -> Result<EvalResult> {
        point.validate()?;
        let EvalPoint { t, r, s } = point;
        match self.path {
            Path::Free => self.free.eval(point),
            Path::ExactAlpha2 => {
                let (zeta, eta) = (self.params.zeta, self.params.eta);
                let v = (r * s).powf(-eta) * crate::kernels::heat2_value(zeta - eta, t, r, s);
                Ok(EvalResult {
                    value: v,
                    err_est: 1e-14 * v,
                    method: Method::ClosedAlpha2,
                })
            }
            Path::Table => {
                let table = self.table.as_ref().expect("table path has a table");
                let (l, f) = self.scale(t);
                let (x, y) = (r / l, s / l);
                // the free part 1/(w(x)w(y)) of G is known exactly; only the
                // correction is interpolated
                let g = table.grid.interpolate(&table.ratio, x, y) + self.free_part_defect(&table.grid, x, y);
                let v = f * self.unit_envelope(x, y) * g;
                let d = &table.diagnostics;
                let rel = d.tail_bound + d.picard_residual + d.asymmetry + 1e-8;
                Ok(EvalResult {
                    value: v,
                    err_est: rel * v.abs(),
                    method: table.method,
                })
            }
        }
    }

    /// Value only, NaN on failure; for use inside integrands.
    pub fn value(&self, t: f64, r: f64, s: f64) -> f64 {
        match EvalPoint::new(t, r, s) {
            Ok(p) => self.eval(p).map(|e| e.value).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    }

    /// The n-th Duhamel term p_t^{(n,D)}(r, s); n = 0 is the free kernel.
    pub fn duhamel_term(&mut self, n: usize, point: EvalPoint) -> Result<f64> {
        point.validate()?;
        ensure!(self.params.alpha < 2.0, "Duhamel terms are computed for alpha < 2");
        ensure!(n <= self.control.max_terms, "term {n} exceeds max_terms = {}", self.control.max_terms);
        if n == 0 {
            return Ok(self.free.value(point.t, point.r, point.s));
        }
        if self.params.eta == 0.0 {
            return Ok(0.0);
        }
        if self.operator.is_none() {
            let problem = self.problem();
            let op = Operator::assemble(&problem);
            self.operator = Some(op);
        }
        let op = self.operator.as_ref().expect("assembled above");
        let base = self.problem().base();
        let mut term = base;
        let mut next = vec![0.0; term.len()];
        for _ in 0..n {
            op.apply(&term, &mut next);
            core::mem::swap(&mut term, &mut next);
        }
        symmetrize(&mut term, self.control.space_grid.len());
        let (l, f) = self.scale(point.t);
        let (x, y) = (point.r / l, point.s / l);
        let g = self.control.space_grid.interpolate(&term, x, y);
        Ok(f * self.unit_envelope(x, y) * g)
    }

    pub fn envelope(&self, point: EvalPoint) -> Result<Envelope> {
        point.validate()?;
        envelope_with(&self.free, self.params, point)
    }

    /// sign(η)·(p_{ζ,η} − p_ζ) at the point; nonnegative by monotonicity in η.
    pub fn monotonicity_gap(&self, point: EvalPoint) -> Result<f64> {
        ensure!(self.params.eta != 0.0, "the gap is defined for eta != 0");
        let p = self.eval(point)?.value;
        let p0 = self.free.value(point.t, point.r, point.s);
        Ok(self.params.eta.signum() * (p - p0))
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Σ_n T^n g₀ with the geometric tail test: stop once two consecutive
/// nodewise term ratios stay below 1 and term·ρ/(1−ρ) is below tail_tol
/// relative to the partial sum.
fn series_sum(op: &Operator, base: &[f64], control: &SeriesControl) -> Result<(Vec<f64>, SolveDiagnostics)> {
    let mut sum = base.to_vec();
    let mut term = base.to_vec();
    let mut next = vec![0.0; base.len()];
    let mut good = 0;
    let mut diag = SolveDiagnostics::default();
    for n in 1..=control.max_terms {
        op.apply(&term, &mut next);
        let mut ratio = 0.0f64;
        let mut rel = 0.0f64;
        for k in 0..base.len() {
            if term[k] > 0.0 {
                ratio = ratio.max(next[k] / term[k]);
            }
            sum[k] += next[k];
            rel = rel.max(next[k].abs() / sum[k].abs());
        }
        core::mem::swap(&mut term, &mut next);
        diag.terms = n;
        diag.last_ratio = ratio;
        if ratio < 1.0 {
            good += 1;
            diag.tail_bound = rel * ratio / (1.0 - ratio);
            if good >= 2 && diag.tail_bound <= control.tail_tol {
                return Ok((sum, diag));
            }
        } else {
            good = 0;
            diag.tail_bound = f64::INFINITY;
        }
    }
    Err(Error::Convergence(format!(
        "Duhamel series not certified after {} terms: last term ratio {:.4}, tail bound {:.3e}",
        diag.terms, diag.last_ratio, diag.tail_bound
    )))
}

/// Solves G = g₀ + TG for η < 0. Here |κ| exceeds κ_c and plain fixed-point
/// iteration diverges, so (I − T) G = g₀ is solved by restarted GMRES; the
/// reported residual is the fixed-point residual of the result.
fn picard_solve(op: &Operator, base: &[f64], control: &SeriesControl) -> Result<(Vec<f64>, SolveDiagnostics)> {
    let m = op.size;
    let mut g = base.to_vec();
    let mut tg = vec![0.0; m];
    let mut diag = SolveDiagnostics::default();
    // GMRES controls the Euclidean residual; tighten until the nodewise
    // fixed-point residual meets picard_tol
    let mut tol = control.picard_tol;
    while diag.picard_iterations < control.max_terms {
        let outcome = gmres(
            |v, out| {
                op.apply(v, out);
                out.iter_mut().zip(v).for_each(|(o, vi)| *o = vi - *o);
            },
            base,
            &mut g,
            tol,
            GMRES_RESTART,
            control.max_terms - diag.picard_iterations,
        );
        diag.picard_iterations += outcome.iterations;
        op.apply(&g, &mut tg);
        let res = (0..m).map(|k| (base[k] + tg[k] - g[k]).abs()).fold(0.0, f64::max);
        diag.picard_residual = res / max_abs(&g);
        if diag.picard_residual <= control.picard_tol {
            return Ok((g, diag));
        }
        if !outcome.converged || tol < 1e-15 {
            break;
        }
        tol *= 0.01;
    }
    Err(Error::Convergence(format!(
        "fixed-point residual {:.3e} above picard_tol {:.1e} after {} iterations",
        diag.picard_residual, control.picard_tol, diag.picard_iterations
    )))
}

/// Replaces G by (G + Gᵀ)/2 and returns the largest relative asymmetry.
fn symmetrize(g: &mut [f64], n: usize) -> f64 {
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (g[i * n + j], g[j * n + i]);
            let scale = a.abs().max(b.abs());
            if scale > 0.0 {
                asym = asym.max((a - b).abs() / scale);
            }
            let m = 0.5 * (a + b);
            g[i * n + j] = m;
            g[j * n + i] = m;
        }
    }
    asym
}
