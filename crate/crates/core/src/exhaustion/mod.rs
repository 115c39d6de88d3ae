//! Controls on growing boxes and the diagnostics for their limit.
//!
//! The weak limit of the box controls has no finite algorithm. The largest
//! box control stands in for it: a Cauchy test against fixed test functions
//! plus validation on a much larger reference box.

mod diagnostics;
mod run;
mod template;

pub use diagnostics::{
    default_test_functions, feedback_convergence_probe, uniform_bound, uniform_bound_check, weak_convergence_diagnostic, FeedbackProbe,
};
pub use run::{final_state_on, run_exhaustion, ExhaustionReport, LimitDiagnostics, ScaleRecord};
pub use template::{ModeRule, ProblemTemplate, RegionTemplate};
