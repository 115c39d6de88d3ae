//! Controllability map, its adjoint, penalized HUM synthesis, and the dense
//! cost/observability/factorization oracles.

mod cost;
mod grid;
mod hum;
mod problem;
mod sampled;

pub use cost::{factorize, Factorization};
pub use grid::{SubNode, TimeGrid};
pub use hum::{NullControl, CG_MAX_ITERATIONS, CG_TOLERANCE};
pub use problem::{ControlProblem, ProblemSpec};
pub use sampled::{cross_pairing, TimeSampledControl};
