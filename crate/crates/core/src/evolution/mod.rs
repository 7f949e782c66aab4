//! Time integration of the coupled membrane system.

mod diagnostics;
mod run;
mod scheme;

pub use diagnostics::{gap_functional, total_energy, touchdown_bound};
pub(crate) use diagnostics::tension_ratio;
pub use run::{evolve, Sample, SimConfig, Termination, TouchdownReport, Trajectory};
pub(crate) use run::{integrate, Evaluation};
pub use scheme::{curvature_apply, step_imex};
pub(crate) use scheme::{curvature_factor, imex_update};
