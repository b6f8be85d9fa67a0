//! Pseudospectral simulation and verification tools for the fourth-order
//! (and second-order) nonlinear Schrödinger equation on waveguides `ℝ^d × T^n`.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod diagnostics;
pub mod error;
pub mod exponents;
pub mod field;
pub mod grid;
pub mod morawetz_algebra;
pub mod propagator;
pub mod scalar;
pub mod transform;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = grid::Grid<f64>;
pub type GridSpec = grid::GridSpec<f64>;
pub type ComplexField = field::ComplexField<f64>;
pub type SpectralField = field::SpectralField<f64>;
pub type SolverConfig = propagator::SolverConfig<f64>;
pub type SolverState = propagator::SolverState<f64>;
pub type Propagator = propagator::Propagator<f64>;
pub type Evolution = propagator::Evolution<f64>;
pub type DiagnosticsPlan = diagnostics::DiagnosticsPlan<f64>;
pub type Snapshot = diagnostics::Snapshot<f64>;
