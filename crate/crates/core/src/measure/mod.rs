//! Discrete measures over frequency space and frequency × time.
//!
//! Spatial measures are finite atom sets plus lattice densities; temporal
//! profiles are atoms plus piecewise-constant rates. Spatio-temporal measures
//! are finite sums of separable products of the two. The class is closed under
//! everything the solver needs and admits exact time integration against
//! exponential kernels.

mod functional;
mod spectral;
mod temporal;

pub use functional::{FunctionalKind, TestFunctional};
pub use spectral::{Atom, GridAxis, GridDensity, Lattice, SpectralMeasure, MAX_GRID_DIM, MERGE_TOL};
pub use temporal::{Segment, SpaceTimeMeasure, SpaceTimeTerm, TemporalAtom, TemporalProfile, TIME_MERGE_TOL};

/// `(1+|x|²)^m ≤ 2^{m-1}[(1+2|x-y|²)^m + 2^m |y|^{2m}]`, evaluated in floating point.
///
/// Returns `(lhs, rhs)`; callers compare with a rounding allowance.
pub fn convexity_sides(x: &[f64], y: &[f64], m: u32) -> (f64, f64) {
    let nx: f64 = x.iter().map(|v| v * v).sum();
    let ny: f64 = y.iter().map(|v| v * v).sum();
    let nxy: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let m_i = m as i32;
    let lhs = (1.0 + nx).powi(m_i);
    let rhs = 2f64.powi(m_i - 1) * ((1.0 + 2.0 * nxy).powi(m_i) + 2f64.powi(m_i) * ny.powi(m_i));
    (lhs, rhs)
}
