//! The named check suites. Each suite returns one report per check; a check
//! covers one identity or bound over its part of the grid.

mod forms;
mod identities;
mod normalization;
mod regimes;
mod sandwich;
mod threeg;

use hardyheat_core::quad::{best_effort, integrate_breaks, log_breaks, Estimate, Tolerance};

use crate::error::{usage, Result};
use crate::grid::GridSpec;
use crate::report::CheckReport;
use crate::store::KernelStore;

pub use forms::check_forms;
pub use identities::check_identities;
pub use normalization::check_normalization;
pub use regimes::check_regimes;
pub use sandwich::{check_sandwich, SandwichKind};
pub use threeg::check_threeg;

pub const SUITES: [&str; 7] = [
    "normalization",
    "sandwich-free",
    "sandwich-perturbed",
    "threeg",
    "identities",
    "forms",
    "regimes",
];

/// Runs one suite by name, or every suite for "all".
pub fn run_suite(name: &str, grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    grid.validate()?;
    Ok(match name {
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, grid, store)?);
            }
            out
        }
        "normalization" => check_normalization(grid, store)?,
        "sandwich-free" => check_sandwich(SandwichKind::Free, grid, store)?,
        "sandwich-perturbed" => check_sandwich(SandwichKind::Perturbed, grid, store)?,
        "threeg" => check_threeg(grid, store)?,
        "identities" => check_identities(grid, store)?,
        "forms" => check_forms(grid, store)?,
        "regimes" => check_regimes(grid, store)?,
        other => return Err(usage!("unknown suite '{other}'; expected one of {}, all", SUITES.join(", "))),
    })
}

/// ∫₀^∞ k(s) s^{2ζ−β} ds for a kernel in s centred at r with spatial
/// width `width`, growing like s^{−growth} at 0; `e_hi` is the decay exponent
/// of s^{2ζ+1−β} k(s) at ∞.
pub(crate) fn moment(
    k: impl Fn(f64) -> f64,
    (zeta, beta, growth): (f64, f64, f64),
    e_hi: f64,
    r: f64,
    width: f64,
) -> hardyheat_core::Result<Estimate> {
    let power = 2.0 * zeta + 1.0 - beta;
    let pts = log_breaks(&[r, width], &[(r, width)], power - growth, e_hi);
    best_effort(integrate_breaks(
        |w| {
            let s = w.exp();
            s.powf(power) * k(s)
        },
        &pts,
        &Tolerance::rel(1e-11).with_max_subdivisions(2000),
    ))
}

