//! Radiation of Bogoliubov excitations by a classical impurity moving through
//! a homogeneous Bose-Einstein condensate.
//!
//! Everything is computed in natural units `ħ = M = c = 1`; see
//! [`condensate::Condensate`] for the conversions at the boundary.

pub mod condensate;
pub mod error;
pub mod jet;
pub mod phase_integral;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;
pub mod trajectory;
pub mod validation;

pub use condensate::{Condensate, CondensateParams, Mode};
pub use error::{Error, Result};
pub use trajectory::Trajectory;
