//! Stationary states: threshold functions, residual and fixed-point forms,
//! Newton and continuation solvers, linear stability.

mod continuation;
mod newton;
mod residual;
mod stability;
mod threshold;

pub use continuation::{pullin_sweep, ContinuationResult, MAX_STEP_HALVINGS};
pub use newton::{solve_steady, SteadyState, FD_STEP, MAX_HALVINGS, MAX_NEWTON_ITERS, NEWTON_TOL};
pub use residual::{fixed_point_map, stationary_residual};
pub use stability::{
    curvature_jacobian, curvature_map, linearize, spectral_abscissa, stability_experiment,
    StabilityReport,
};
pub use threshold::{j_fn, xi0};
