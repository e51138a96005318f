//! The time-integrated moment ∫₀^t ∫ p(τ,r,s) s^{2ζ−δ} ds dτ against its
//! three-regime comparison function.

use serde_json::json;

use hardyheat_core::forms::{integral_regimes, regime_prediction};

use crate::error::Result;
use crate::grid::GridSpec;
use crate::report::{CheckReport, Tally};
use crate::store::KernelStore;

const T: f64 = 1.0;
const R_EXPONENTS: std::ops::RangeInclusive<i32> = -5..=5;
/// The ratio must stay in [1/WINDOW, WINDOW].
const WINDOW: f64 = 10.0;
/// δ = α with r^α ≫ t: the moment is t/r^α to leading order.
const LEADING_R: f64 = 64.0;
const LEADING_TOL: f64 = 0.05;

pub fn check_regimes(grid: &GridSpec, _store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let rs: Vec<f64> = R_EXPONENTS.map(|j| 2f64.powi(j)).collect();
    for &[zeta, alpha] in &grid.perturbed {
        for delta in [0.5 * alpha, alpha, 2.0 * alpha].into_iter().filter(|&d| d < 2.0 * zeta + 1.0) {
            let mut tally = Tally::new(
                "regimes.integrated_moment",
                json!({"zeta": zeta, "alpha": alpha, "delta": delta}),
                json!({"t": T, "r": rs}),
                format!("moment / prediction in [1/{WINDOW}, {WINDOW}]"),
            );
            for &r in &rs {
                let at = format!("(t={T}, r={r})");
                if let Some(v) = tally.check(&at, integral_regimes(zeta, alpha, delta, T, r)) {
                    let ratio = v / regime_prediction(alpha, delta, T, r);
                    tally.residual(&at, ratio, (1.0 / WINDOW..=WINDOW).contains(&ratio));
                }
            }
            if delta == alpha {
                let at = format!("leading order (t={T}, r={LEADING_R})");
                if let Some(v) = tally.check(&at, integral_regimes(zeta, alpha, delta, T, LEADING_R)) {
                    let res = v * LEADING_R.powf(alpha) / T - 1.0;
                    tally.residual(&at, res, res.abs() <= LEADING_TOL);
                }
            }
            out.push(tally.finish(None));
        }
    }
    Ok(out)
}
