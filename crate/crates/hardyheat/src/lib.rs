//! Certification harness, evaluation cache and command line for the
//! radial fractional heat kernels of `hardyheat-core`.

pub mod cache;
pub mod certify;
pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod report;
pub mod store;

pub use error::{Error, Result};
