//! Special functions on the domains the closed forms need.

mod bessel;
mod gamma;
mod incgamma;

pub use bessel::{bessel_k1, bessel_k1_scaled};
pub use gamma::{gamma, log_gamma};
pub use incgamma::{lower_gamma_scaled, lower_incomplete_gamma};
