//! Check reports and comparability constants.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

/// inf and sup of a ratio table, with their relative change under one grid
/// refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub c_lower: f64,
    pub c_upper: f64,
    pub n_points: usize,
    pub drift: Option<f64>,
}

impl ConstantEstimate {
    /// Two-sided bounded, and stable under refinement when a refinement was made.
    pub fn is_stable(&self, max_drift: f64) -> bool {
        self.c_lower > 0.0 && self.c_upper.is_finite() && self.c_lower <= self.c_upper && self.drift.is_none_or(|d| d <= max_drift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonPositive {
    pub index: usize,
    pub value: f64,
}

impl fmt::Display for NonPositive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ratio {} at entry {} is not positive and finite", self.value, self.index)
    }
}

impl std::error::Error for NonPositive {}

fn extremes(values: &[f64]) -> Result<(f64, f64), NonPositive> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (index, &value) in values.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(NonPositive { index, value });
        }
        lo = lo.min(value);
        hi = hi.max(value);
    }
    Ok((lo, hi))
}

/// (min, max) of `values`, and the drift max(|Δc_lower|/c_lower,
/// |Δc_upper|/c_upper) against the refined table when one is given.
pub fn fit_constants(values: &[f64], refined: Option<&[f64]>) -> Result<ConstantEstimate, NonPositive> {
    if values.is_empty() {
        return Err(NonPositive {
            index: 0,
            value: f64::NAN,
        });
    }
    let (c_lower, c_upper) = extremes(values)?;
    let drift = match refined {
        Some(r) => {
            let (l, u) = extremes(r)?;
            Some(((l - c_lower) / c_lower).abs().max(((u - c_upper) / c_upper).abs()))
        }
        None => None,
    };
    Ok(ConstantEstimate {
        c_lower,
        c_upper,
        n_points: values.len(),
        drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max: f64,
    pub median: f64,
}

impl ResidualStats {
    /// Statistics of |v|; None for an empty list.
    pub fn of(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Some(ResidualStats { max: v[n - 1], median })
    }
}

/// Offending points listed per report.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: Value,
    pub grid: Value,
    /// The pass criterion in words.
    pub criterion: String,
    pub status: Status,
    pub constants: Option<ConstantEstimate>,
    pub residuals: Option<ResidualStats>,
    pub failures: Vec<String>,
    /// Wall time; kept out of the serialized report so reports are
    /// reproducible byte for byte (see the timing sidecar).
    #[serde(skip)]
    pub runtime_seconds: f64,
}

/// Collects per-point outcomes of one check.
pub struct Tally {
    name: String,
    params: Value,
    grid: Value,
    criterion: String,
    residuals: Vec<f64>,
    failures: Vec<String>,
    failed: usize,
    errors: usize,
    started: Instant,
}

impl Tally {
    pub fn new(name: impl Into<String>, params: Value, grid: Value, criterion: impl Into<String>) -> Self {
        Tally {
            name: name.into(),
            params,
            grid,
            criterion: criterion.into(),
            residuals: Vec::new(),
            failures: Vec::new(),
            failed: 0,
            errors: 0,
            started: Instant::now(),
        }
    }

    fn list(&mut self, what: String) {
        if self.failures.len() < MAX_LISTED {
            self.failures.push(what);
        }
    }

    /// Records a residual; `ok` is the per-point verdict.
    pub fn residual(&mut self, at: impl fmt::Display, value: f64, ok: bool) {
        self.residuals.push(value);
        if !ok {
            self.failed += 1;
            self.list(format!("{at}: {value:e}"));
        }
    }

    pub fn fail(&mut self, what: impl fmt::Display) {
        self.failed += 1;
        self.list(what.to_string());
    }

    pub fn error(&mut self, at: impl fmt::Display, err: impl fmt::Display) {
        self.errors += 1;
        self.list(format!("{at}: error: {err}"));
    }

    /// Unwraps an evaluation, recording failures as errors.
    pub fn check<T, E: fmt::Display>(&mut self, at: impl fmt::Display, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(at, e);
                None
            }
        }
    }

    pub fn finish(self, constants: Option<ConstantEstimate>) -> CheckReport {
        let status = if self.failed > 0 {
            Status::Fail
        } else if self.errors > 0 {
            Status::Warn
        } else {
            Status::Pass
        };
        CheckReport {
            check_name: self.name,
            params: self.params,
            grid: self.grid,
            criterion: self.criterion,
            status,
            constants,
            residuals: ResidualStats::of(&self.residuals),
            failures: self.failures,
            runtime_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Worst status of a list of reports (Pass for an empty list).
pub fn overall(reports: &[CheckReport]) -> Status {
    reports.iter().map(|r| r.status).max().unwrap_or(Status::Pass)
}
