//! Special functions: Gamma, Bessel, Gauss hypergeometric, one-sided stable
//! densities, and the Hardy coupling maps.

mod bessel;
mod coupling;
mod gamma;
mod hyp2f1;
mod stable;

pub use bessel::{bessel_i_scaled, bessel_j};
pub(crate) use bessel::{i_scaled, j};
pub use coupling::{coupling_phi, coupling_psi, eta_from_kappa, kappa_crit};
pub use gamma::{cos_pi, digamma, gamma, log_gamma, rgamma, sin_pi};
pub use hyp2f1::{hyp2f1_regularized, hyp2f1_regularized_split};
pub use stable::{stable_density, StableDensity};
