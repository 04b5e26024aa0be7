//! One-dimensional finite-difference solver for hyperbolic conservation
//! laws. High-order compact approximate Taylor (CAT2P) fluxes are
//! limited a posteriori: every step is first taken unlimited, then
//! troubled cells are detected and locally recomputed with a cascade of
//! lower-order schemes down to a robust first-order flux.
//!
//! Ships three systems (linear advection, Burgers, 1D Euler), exact
//! reference solutions, and a small CLI for runs and mesh-refinement
//! studies.

pub mod cases;
pub mod cat;
pub mod error;
pub mod field;
pub mod loworder;
pub mod mesh;
pub mod mood;
pub mod report;
pub mod solver;
pub mod systems;
pub mod weights;

pub use cases::Experiment;
pub use error::{RiemannError, SolverError, WeightError};
pub use field::StateField;
pub use mesh::{compute_dt, fill_ghosts, BoundaryCondition, Grid1D, SolverConfig};
pub use mood::{Cascade, DeltaForm, DetectionReport, SchemeLevel};
pub use report::{emit_outputs, ConvergenceRow, RunReport, Snapshot};
pub use solver::{convergence_study, run_solver, SchemeChoice};
pub use systems::{ConservationLaw, Fallback};
