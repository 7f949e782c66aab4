//! Simulation of an electrostatically actuated device with two elastic
//! membranes: the potential between the membranes is solved on a fixed
//! rectangle after a change of variables, and the membranes evolve under
//! curvature-type diffusion driven by the squared field at their surfaces.

pub mod cli;
pub mod domain;
pub mod elliptic;
pub mod error;
pub mod evolution;
pub mod format;
pub mod linalg;
pub mod narrow_gap;
pub mod steady;

pub use error::{Error, Result};
