//! Finite-difference evolution of the Proca field in canonical form, with a
//! structure-preserving scheme (SPS) and a standard scheme (SS) sharing one
//! Crank–Nicolson time stepper.

pub mod analysis;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod grid;
pub mod initdata;
pub mod model;
pub mod scheme;

pub use driver::{simulate, RunOutput, RunSpec, Termination};
pub use error::{ProcaError, Result};
pub use grid::{Axis, GridSpec, ScalarField};
pub use model::{LambdaField, Params, ProcaFields, ProcaState};
pub use scheme::{LinearStepSystem, SchemeKind, SolverConfig, SolverKind, Stepper};
