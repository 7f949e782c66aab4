//! Grids, discrete functions, norms, admissibility and the coordinate change
//! between the moving and the fixed domain.

pub mod admissible;
pub mod function;
pub mod grid;
pub mod norm;
pub mod params;
pub mod transform;

pub use admissible::{admissible_check, AdmissibilityReport};
pub use function::{trapezoid, Field2D, GridFunction1D, MembranePair, Role};
pub use grid::{make_grid, Grid};
pub use norm::discrete_norm;
pub use params::Params;
pub use transform::{pull_back, push_forward, PhysicalField};
