use serde_json::json;

use hardyheat_core::kernels::GaussianConstants;
use hardyheat_core::{CouplingParams, Envelope, EvalPoint};

use crate::error::Result;
use crate::grid::{GeomGrid, GridSpec};
use crate::report::{fit_constants, CheckReport, ConstantEstimate, NonPositive, Tally};
use crate::store::KernelStore;

/// At α = 2 the Gaussian factors underflow beyond this gap (t = 1).
const GAUSSIAN_MAX_GAP: f64 = 50.0;

/// Largest relative change of a constant under one grid refinement.
pub const MAX_DRIFT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichKind {
    Free,
    Perturbed,
}

/// p / lower and p / upper over the square `rs × rs` at t = 1.
struct Ratios {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn ratios(
    tally: &mut Tally,
    rs: &GeomGrid,
    max_gap: f64,
    mut eval: impl FnMut(EvalPoint) -> Result<(f64, Envelope)>,
) -> Ratios {
    let mut out = Ratios {
        lower: Vec::new(),
        upper: Vec::new(),
    };
    let xs = rs.values();
    for &r in &xs {
        for &s in &xs {
            if (r - s).abs() > max_gap {
                continue;
            }
            let at = format!("(t=1, r={r}, s={s})");
            let Some((p, env)) = tally.check(&at, EvalPoint::new(1.0, r, s).map_err(Into::into).and_then(&mut eval)) else {
                continue;
            };
            out.lower.push(p / env.lower);
            out.upper.push(p / env.upper);
        }
    }
    out
}

/// c_lower = inf p/lower and c_upper = sup p/upper, each with its drift.
fn sandwich_constants(coarse: &Ratios, fine: &Ratios) -> std::result::Result<ConstantEstimate, NonPositive> {
    let c_lower = fit_constants(&coarse.lower, None)?.c_lower;
    let c_upper = fit_constants(&coarse.upper, None)?.c_upper;
    let f_lower = fit_constants(&fine.lower, None)?.c_lower;
    let f_upper = fit_constants(&fine.upper, None)?.c_upper;
    Ok(ConstantEstimate {
        c_lower,
        c_upper,
        n_points: coarse.lower.len(),
        drift: Some(((f_lower - c_lower) / c_lower).abs().max(((f_upper - c_upper) / c_upper).abs())),
    })
}

fn finish(mut tally: Tally, rs: &GeomGrid, max_gap: f64, mut eval: impl FnMut(EvalPoint) -> Result<(f64, Envelope)>) -> CheckReport {
    let coarse = ratios(&mut tally, rs, max_gap, &mut eval);
    let fine = ratios(&mut tally, &rs.refined(), max_gap, &mut eval);
    match sandwich_constants(&coarse, &fine) {
        Ok(c) => {
            if !c.is_stable(MAX_DRIFT) {
                tally.fail(format!(
                    "constants [{:e}, {:e}] not stable: drift {:e} > {MAX_DRIFT}",
                    c.c_lower,
                    c.c_upper,
                    c.drift.unwrap_or(f64::NAN)
                ));
            }
            tally.finish(Some(c))
        }
        Err(e) => {
            tally.fail(e);
            tally.finish(None)
        }
    }
}

fn criterion() -> String {
    format!("0 < c_lower <= c_upper < inf, refinement drift <= {MAX_DRIFT}")
}

/// Two-sided comparability of the kernel with its comparison function.
pub fn check_sandwich(kind: SandwichKind, grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let grid_json = json!({"t": 1.0, "r": grid.rs, "s": grid.rs, "refined": grid.rs.refined()});
    match kind {
        SandwichKind::Free => {
            for &zeta in &grid.zeta_values {
                for &alpha in &grid.alpha_values {
                    let k = store.free(zeta, alpha)?;
                    let tally = Tally::new("sandwich.free", json!({"zeta": zeta, "alpha": alpha}), grid_json.clone(), criterion());
                    let gap = if alpha == 2.0 { GAUSSIAN_MAX_GAP } else { f64::INFINITY };
                    out.push(finish(tally, &grid.rs, gap, |p| {
                        Ok((store.free_point(zeta, alpha, p, None)?.value, k.envelope(p, GaussianConstants::default())?))
                    }));
                }
            }
        }
        SandwichKind::Perturbed => {
            let mut params = grid.perturbed_params()?;
            // the exact α = 2 path with its two Gaussian constants
            params.push(CouplingParams::new(1.0, 2.0, 0.5)?);
            for params in params {
                let k = store.perturbed(params)?;
                let mut p_json = json!({"zeta": params.zeta, "alpha": params.alpha, "eta": params.eta});
                if params.alpha == 2.0 {
                    let c = GaussianConstants::default();
                    p_json["gaussian_constants"] = json!([c.lower, c.upper]);
                    p_json["max_gap"] = json!(GAUSSIAN_MAX_GAP);
                }
                let gap = if params.alpha == 2.0 { GAUSSIAN_MAX_GAP } else { f64::INFINITY };
                let tally = Tally::new("sandwich.perturbed", p_json, grid_json.clone(), criterion());
                out.push(finish(tally, &grid.rs, gap, |p| Ok((k.eval(p)?.value, k.envelope(p)?))));
            }
        }
    }
    Ok(out)
}
