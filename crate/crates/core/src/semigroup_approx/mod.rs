//! How well the box semigroup approximates the whole-space one.

mod diff;
mod mc;
mod probe;

pub use diff::{semigroup_diff, semigroup_diff_against, DiffOptions, SemigroupDiff};
pub use mc::{mc_exit_probability, McConfig, McEstimate, McPoint};
pub use probe::{strong_convergence_probe, ProbePoint};
