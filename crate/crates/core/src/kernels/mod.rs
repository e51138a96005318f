//! Free radial heat kernels p_ζ^{(α)}, the Lévy kernel ν_ζ, and the
//! comparison functions of the two-sided kernel bounds.

mod cauchy;
mod envelope;
mod free;
mod heat2;
mod levy;
mod spectral;
mod subordinated;

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure, Result};

pub use cauchy::cauchy_heat_closed;
pub use envelope::{free_envelope, Envelope, GaussianConstants};
pub use free::FreeKernel;
pub use heat2::bessel_heat_2;
pub(crate) use heat2::heat2_value;
pub use levy::{levy_kernel, levy_kernel_offset};
pub(crate) use levy::levy_value;
pub use spectral::spectral_heat;
pub use subordinated::subordinated_heat;

/// A space-time point (t, r, s).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalPoint {
    pub t: f64,
    pub r: f64,
    pub s: f64,
}

impl EvalPoint {
    pub fn new(t: f64, r: f64, s: f64) -> Result<Self> {
        let p = EvalPoint { t, r, s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t", self.t), ("r", self.r), ("s", self.s)] {
            ensure!(v > 0.0 && v.is_finite(), "{name} = {v} must be positive and finite");
        }
        Ok(())
    }

    /// The point (1, r/t^{1/α}, s/t^{1/α}) that the scaling relation maps
    /// this one to.
    pub fn unit_time(&self, alpha: f64) -> EvalPoint {
        let l = self.t.powf(1.0 / alpha);
        EvalPoint {
            t: 1.0,
            r: self.r / l,
            s: self.s / l,
        }
    }

    pub fn swapped(&self) -> EvalPoint {
        EvalPoint {
            t: self.t,
            r: self.s,
            s: self.r,
        }
    }
}

/// The code path that produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    ClosedAlpha2,
    ClosedAlpha1,
    Subordination,
    Spectral,
    Series,
    Picard,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedAlpha2 => "closed_alpha2",
            Method::ClosedAlpha1 => "closed_alpha1",
            Method::Subordination => "subordination",
            Method::Spectral => "spectral",
            Method::Series => "series",
            Method::Picard => "picard",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A kernel value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalResult {
    pub value: f64,
    pub err_est: f64,
    pub method: Method,
}

impl EvalResult {
    pub(crate) fn closed(value: f64, method: Method) -> Self {
        EvalResult {
            value,
            err_est: 8.0 * f64::EPSILON * value.abs(),
            method,
        }
    }

    pub fn rel_err(&self) -> f64 {
        self.err_est / self.value.abs()
    }
}
