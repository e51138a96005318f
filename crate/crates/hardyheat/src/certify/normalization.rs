use serde_json::json;

use hardyheat_core::EvalResult;

use super::moment;
use crate::cache::eval_key;
use crate::error::Result;
use crate::grid::GridSpec;
use crate::report::{CheckReport, Tally};
use crate::store::KernelStore;

const MASS_TOL: f64 = 1e-6;

/// ∫ p(t,r,s) s^{2ζ} ds = 1 for the free kernels; ≥ 1 (η > 0) or ≤ 1
/// (η < 0) for the perturbed ones.
pub fn check_normalization(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    // masses vary slowly in r: one point per octave
    let rs: Vec<f64> = grid.rs.values().into_iter().step_by(grid.rs.per_octave as usize).collect();
    for &zeta in &grid.zeta_values {
        for &alpha in &grid.alpha_values {
            let k = store.free(zeta, alpha)?;
            let mut tally = Tally::new(
                "normalization.free",
                json!({"zeta": zeta, "alpha": alpha}),
                json!({"t": grid.t_values, "r": rs}),
                format!("|mass - 1| <= {MASS_TOL:e}"),
            );
            let e_hi = if alpha == 2.0 { 8.0 } else { alpha };
            for &t in &grid.t_values {
                for &r in &rs {
                    let width = t.powf(1.0 / alpha);
                    let at = format!("(t={t}, r={r})");
                    let key = eval_key("mass", zeta, alpha, 0.0, t, r, 0.0, k.default_method().as_str());
                    let mass = store.memo(&key, || {
                        let m = moment(|s| k.value(t, r, s), (zeta, 0.0, 0.0), e_hi, r, width)?;
                        Ok(EvalResult {
                            value: m.value,
                            err_est: m.err,
                            method: k.default_method(),
                        })
                    });
                    if let Some(m) = tally.check(&at, mass) {
                        let res = m.value - 1.0;
                        tally.residual(&at, res, res.abs() <= MASS_TOL);
                    }
                }
            }
            out.push(tally.finish(None));
        }
    }
    for params in grid.perturbed_params()? {
        let k = store.perturbed(params)?;
        let sign = params.eta.signum();
        let mut tally = Tally::new(
            "normalization.perturbed",
            json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta}),
            json!({"t": grid.t_values, "r": rs}),
            if sign > 0.0 {
                format!("mass >= 1 - {MASS_TOL:e} (eta > 0 creates mass)")
            } else {
                format!("mass <= 1 + {MASS_TOL:e} (eta < 0 loses mass)")
            },
        );
        let e_hi = if params.alpha == 2.0 { 8.0 } else { params.alpha };
        for &t in &grid.t_values {
            for &r in &rs {
                let width = t.powf(1.0 / params.alpha);
                let at = format!("(t={t}, r={r})");
                if let Some(m) = tally.check(&at, moment(|s| k.value(t, r, s), (params.zeta, 0.0, params.eta.max(0.0)), e_hi, r, width)) {
                    let res = m.value - 1.0;
                    tally.residual(&at, res, sign * res >= -MASS_TOL);
                }
            }
        }
        out.push(tally.finish(None));
    }
    Ok(out)
}
