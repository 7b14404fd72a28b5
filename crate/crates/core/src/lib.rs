//! Exact spectral solutions of `∂U/∂t + L_g U = X` for pseudo-differential
//! operators `L_g` and sources that act as measures in time.
//!
//! The solver works on the spectral side, where the equation becomes the
//! family of scalar ODEs `∂V/∂t + g(ξ)V = Y`, and evaluates the càdlàg-in-time
//! solution in closed form on a class of discrete measures. Physical fields
//! are synthesized on demand.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod evolution;
pub mod format;
pub mod kernel;
pub mod measure;
pub mod oracle;
pub mod quadrature;
pub mod symbols;
pub mod trajectory;
pub mod transform;

pub use error::{Error, Result};
pub use evolution::{EvolutionProblem, Mode};
pub use measure::{Atom, SpaceTimeMeasure, SpectralMeasure, TemporalProfile, TestFunctional};
pub use num_complex::Complex64;
pub use symbols::Symbol;
