//! Hardy-perturbed kernels p_{ζ,η}^{(α)}: the Schrödinger perturbation of the
//! free kernel by q(z) = Ψ_ζ(η) z^{−α}.
//!
//! Three code paths:
//! - α = 2: exact, p_{ζ,η}^{(2)}(t,r,s) = (rs)^{−η} p_{ζ−η}^{(2)}(t,r,s);
//! - α < 2, η > 0: the Duhamel series Σ_n p^{(n,D)}, all terms nonnegative;
//! - α < 2, η < 0: the Duhamel equation solved as a linear system.
//!
//! For α < 2 the scaling relation reduces everything to unit time, where the
//! kernel is tabulated on a log grid (see `duhamel`).

mod duhamel;
mod grid;
mod identities;
mod kernel;
mod krylov;

#[allow(unused_imports)]
use num_traits::Float;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub use grid::SpaceGrid;
pub use identities::{compensation_residual, g_integrals};
pub(crate) use identities::{nested_time_space, power_moment};
pub use kernel::{PerturbedKernel, PerturbedTable, SolveDiagnostics};

use crate::error::{ensure, Result};
use crate::kernels::{free_envelope, EvalPoint, EvalResult, Envelope, FreeKernel, GaussianConstants};
use crate::params::CouplingParams;

/// Truncation and discretization controls of the perturbed kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SeriesControl {
    /// Cap on the number of Duhamel terms.
    pub max_terms: usize,
    /// Relative tail bound at which the series is truncated.
    pub tail_tol: f64,
    /// Fixed-point residual tolerance of the η < 0 solve.
    pub picard_tol: f64,
    /// Gauss nodes per τ panel (and per z panel) of each Duhamel layer.
    pub time_grid: usize,
    pub space_grid: SpaceGrid,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 400,
            tail_tol: 1e-7,
            picard_tol: 1e-10,
            time_grid: 8,
            space_grid: SpaceGrid::default(),
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.max_terms >= 1, "max_terms must be at least 1");
        ensure!(self.tail_tol > 0.0 && self.picard_tol > 0.0, "tolerances must be positive");
        ensure!(self.time_grid >= 2, "time_grid must be at least 2");
        let g = self.space_grid;
        ensure!(
            g.step > 0.0 && g.half_width > 0.0 && g.len() >= 8,
            "space grid needs a positive step and at least 8 nodes"
        );
        Ok(())
    }
}

/// The generalized ground state h(r) = r^{−η}.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GroundState {
    pub eta: f64,
}

impl GroundState {
    pub fn new(eta: f64) -> Self {
        GroundState { eta }
    }

    pub fn h(&self, r: f64) -> f64 {
        r.powf(-self.eta)
    }

    /// h_β(r) = r^{−β}.
    pub fn h_beta(beta: f64, r: f64) -> f64 {
        r.powf(-beta)
    }
}

/// q(z) = Ψ_ζ(η) z^{−α}.
pub fn hardy_potential(params: CouplingParams, z: f64) -> Result<f64> {
    ensure!(z > 0.0 && z.is_finite(), "z = {z} must be positive");
    Ok(params.kappa * z.powf(-params.alpha))
}

/// p_{ζ,η}^{(α)}(t,r,s). Builds the kernel for this single call; reuse a
/// [`PerturbedKernel`] for many points.
pub fn perturbed_heat(params: CouplingParams, point: EvalPoint, control: SeriesControl) -> Result<EvalResult> {
    point.validate()?;
    PerturbedKernel::new(params, control)?.eval(point)
}

/// The n-th Duhamel term p_t^{(n,D)}(r,s) for η > 0.
pub fn duhamel_term(n: usize, params: CouplingParams, point: EvalPoint, control: SeriesControl) -> Result<f64> {
    ensure!(params.eta > 0.0, "Duhamel terms are defined here for eta > 0");
    PerturbedKernel::unsolved(params, control)?.duhamel_term(n, point)
}

/// Comparison function of the perturbed kernel:
/// (1 ∧ r/t^{1/α})^{−η} (1 ∧ s/t^{1/α})^{−η} times p_ζ(t,r,s) for α < 2, times
/// the two-constant Gaussian comparison function for α = 2.
pub fn perturbed_envelope(params: CouplingParams, point: EvalPoint) -> Result<Envelope> {
    point.validate()?;
    let free = FreeKernel::new(params.zeta, params.alpha)?;
    envelope_with(&free, params, point)
}

pub(crate) fn envelope_with(free: &FreeKernel, params: CouplingParams, point: EvalPoint) -> Result<Envelope> {
    let EvalPoint { t, r, s } = point;
    let l = t.powf(1.0 / params.alpha);
    let w = (r / l).min(1.0).powf(-params.eta) * (s / l).min(1.0).powf(-params.eta);
    if params.alpha == 2.0 {
        return Ok(free_envelope(params.zeta, 2.0, point, GaussianConstants::default())?.scaled(w));
    }
    Ok(Envelope::same(w * free.eval(point)?.value))
}

/// sign(η)·(p_{ζ,η} − p_ζ) at one point.
pub fn monotonicity_gap(params: CouplingParams, point: EvalPoint) -> Result<f64> {
    PerturbedKernel::new(params, SeriesControl::default())?.monotonicity_gap(point)
}
