//! The two 3G inequalities
//!
//!   p(t,r,z) p(τ,z,s) ≲ p(t+τ,r,s) [((r+s+z)/(s+z))^{2ζ} p(t,r,z) + ((r+s+z)/(r+z))^{2ζ} p(τ,z,s)]   (ζ ≥ 0)
//!   p(t,r,z) p(τ,z,s) ≲ p(t+τ,r,s) ((t+τ)^{1/α}+r+s)^{2ζ}
//!                         × [p(t,r,z)/(τ^{1/α}+z+s)^{2ζ} + p(τ,z,s)/(t^{1/α}+r+z)^{2ζ}]                (ζ > −1/2)
//!
//! checked on random tuples: the sup of left/right must be finite and stable
//! when the sample is doubled.

use serde_json::json;

use hardyheat_core::FreeKernel;

use super::sandwich::MAX_DRIFT;
use crate::error::Result;
use crate::grid::{log_uniform, sample_rng, GridSpec};
use crate::report::{fit_constants, CheckReport, ConstantEstimate, Tally};
use crate::store::KernelStore;

const STREAM: u64 = 3;
/// Every DEGENERATE-th tuple puts the middle point on r.
const DEGENERATE: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Tuple {
    t: f64,
    tau: f64,
    r: f64,
    s: f64,
    z: f64,
}

fn tuple(seed: u64, i: usize) -> Tuple {
    let mut rng = sample_rng(seed, STREAM, i as u64);
    let t = log_uniform(&mut rng, -3.0, 3.0);
    let tau = log_uniform(&mut rng, -3.0, 3.0);
    let r = log_uniform(&mut rng, -6.0, 6.0);
    let s = log_uniform(&mut rng, -6.0, 6.0);
    let z = log_uniform(&mut rng, -6.0, 6.0);
    let z = if i % DEGENERATE == DEGENERATE - 1 { r } else { z };
    Tuple { t, tau, r, s, z }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    Weighted,
    TimeScaled,
}

/// Left side over right side without the implicit constant.
fn ratio(k: &FreeKernel, form: Form, x: Tuple) -> f64 {
    let Tuple { t, tau, r, s, z } = x;
    let (zeta, alpha) = (k.zeta(), k.alpha());
    let a = k.value(t, r, z);
    let b = k.value(tau, z, s);
    let whole = k.value(t + tau, r, s);
    let q = 2.0 * zeta;
    let weight = match form {
        Form::Weighted => ((r + s + z) / (s + z)).powf(q) * a + ((r + s + z) / (r + z)).powf(q) * b,
        Form::TimeScaled => {
            let l = |u: f64| u.powf(1.0 / alpha);
            ((t + tau).powf(1.0 / alpha) + r + s).powf(q) * (a / (l(tau) + z + s).powf(q) + b / (l(t) + r + z).powf(q))
        }
    };
    a * b / (whole * weight)
}

pub fn check_threeg(grid: &GridSpec, store: &mut KernelStore) -> Result<Vec<CheckReport>> {
    let alpha = grid.threeg_alpha;
    let n = grid.tuples;
    let tuples: Vec<Tuple> = (0..2 * n).map(|i| tuple(grid.seed, i)).collect();
    let mut out = Vec::new();
    for &zeta in &grid.threeg_zetas {
        let k = store.free(zeta, alpha)?;
        let forms: &[(Form, &str)] = if zeta >= 0.0 {
            &[(Form::Weighted, "threeg.weighted"), (Form::TimeScaled, "threeg.time_scaled")]
        } else {
            &[(Form::TimeScaled, "threeg.time_scaled")]
        };
        for &(form, name) in forms {
            let mut tally = Tally::new(
                name,
                json!({"zeta": zeta, "alpha": alpha}),
                json!({"tuples": n, "refined_tuples": 2 * n, "seed": grid.seed, "t": "2^U(-3,3)", "r_s_z": "2^U(-6,6)",
                       "z_equals_r_every": DEGENERATE}),
                format!("sup of lhs/rhs finite, changes by <= {MAX_DRIFT} when the sample is doubled"),
            );
            let values: Vec<f64> = tuples.iter().map(|&x| ratio(&k, form, x)).collect();
            let fit = fit_constants(&values[..n], None).and_then(|c| Ok((c, fit_constants(&values, None)?)));
            match fit {
                Ok((c, fine)) => {
                    let drift = (fine.c_upper - c.c_upper) / c.c_upper;
                    let c = ConstantEstimate {
                        drift: Some(drift),
                        ..c
                    };
                    if !c.is_stable(MAX_DRIFT) {
                        tally.fail(format!("sup {:e} -> {:e} on refinement", c.c_upper, fine.c_upper));
                    }
                    out.push(tally.finish(Some(c)));
                }
                Err(e) => {
                    let x = tuples[e.index];
                    tally.fail(format!("{x:?}: {e}"));
                    out.push(tally.finish(None));
                }
            }
        }
    }
    Ok(out)
}
