//! Radial heat kernels for fractional Laplacians with Hardy potentials.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//! special functions, adaptive quadrature, the free Bessel kernels and their
//! stable subordinations, the Hardy-perturbed kernels, and the nonlocal
//! quadratic forms built from them. File formats, caching and the command
//! line live in the `hardyheat` crate.
//!
//! Floating-point math comes from `num_traits::Float` (backed by `libm`).
//! Whenever `std` is linked its inherent methods take precedence, which is
//! why those imports carry `allow(unused_imports)`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod forms;
pub mod kernels;
pub mod params;
pub mod perturbation;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use kernels::{EvalPoint, EvalResult, Envelope, FreeKernel, Method};
pub use params::{AccuracyBudget, ChannelParams, CouplingParams};
pub use perturbation::{PerturbedKernel, SeriesControl};
