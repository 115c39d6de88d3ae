//! Minimal-norm null-controls for heat and Schrödinger semigroups on centered boxes.
//!
//! Fields live in the Dirichlet sine basis of `(-L/2, L/2)^d`. Controls are
//! sampled on a composite Gauss–Legendre time grid and represented by the
//! fields whose restriction to the control region they are.

pub mod bounds;
pub mod control;
pub mod error;
pub mod exhaustion;
pub mod quadrature;
pub mod semigroup_approx;
pub mod sets;
pub mod spectral;

pub use error::{Error, Result};
