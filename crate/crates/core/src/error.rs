use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive refinement hit its cap before reaching the requested accuracy.
    #[error("quadrature budget exhausted: value {value:e} with error estimate {err_est:e}")]
    Budget { value: f64, err_est: f64 },
    /// An iteration (series, Picard, root finding) failed to converge.
    #[error("no convergence: {0}")]
    Convergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Shorthand used by the parameter checks: `ensure!(cond, "message {}", x)`.
macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err($crate::error::Error::Domain(alloc::format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
