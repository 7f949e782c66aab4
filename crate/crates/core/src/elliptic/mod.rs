//! The potential problem on the fixed rectangle: assembly of the
//! transformed Laplacian, the sparse solve for `ψ = φ̃ - z'`, boundary
//! traces and the forcing they induce on the membranes.

pub mod barrier;
pub mod energy;
pub mod operator;
pub mod solve;
pub mod traces;

pub use barrier::{barrier_check, choose_exponent, BarrierReport};
pub use energy::gradient_energy;
pub use operator::{assemble, source_term, TransformedOperator};
pub use solve::{solve_interior, solve_potential, solve_potential_with, LinearBackend, PotentialField};
pub use traces::{boundary_traces, trace_forcing, trace_forcing_from, TraceForcing};
