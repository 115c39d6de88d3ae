//! Dirichlet sine bases on centered boxes and the semigroups they diagonalize.

mod basis;
mod domain;
mod field;
pub mod heat_kernel;
mod potential;
mod reference;
pub mod sine;
pub mod tensor;

pub use basis::{build_basis, build_basis_galerkin, SpectralBasis, MAX_DENSE_SIZE};
pub use domain::BoxDomain;
pub use field::SpectralField;
pub use potential::{Piecewise1d, PotentialKind, PotentialSpec};
pub use reference::{
    proxy_budget, reference_basis, reference_semigroup_apply, ReferenceEvolution,
    ReferenceOptions,
};
