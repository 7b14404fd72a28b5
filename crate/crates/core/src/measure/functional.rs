use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::measure::spectral::Lattice;

type HatFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// How the frequency-side weight `φ̂` is produced.
#[derive(Clone)]
pub enum FunctionalKind {
    /// `φ̂(ξ) = exp(-|ξ - center|² / (2 width²))`.
    GaussianHat { center: Vec<f64>, width: f64 },
    /// `φ̂(ξ) = (2π)^{-d/2} e^{i x₀ᵀξ}`; pairing gives the field value at `x₀`.
    PointEvaluation { x0: Vec<f64> },
    /// Multilinear interpolation of nodal values, zero off the lattice.
    Tabulated { lattice: Lattice, values: Vec<Complex64> },
    /// Arbitrary weight, mostly for tests and derived functionals.
    Custom(Arc<HatFn>),
}

impl fmt::Debug for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalKind::GaussianHat { center, width } => f
                .debug_struct("GaussianHat")
                .field("center", center)
                .field("width", width)
                .finish(),
            FunctionalKind::PointEvaluation { x0 } => {
                f.debug_struct("PointEvaluation").field("x0", x0).finish()
            }
            FunctionalKind::Tabulated { lattice, .. } => {
                f.debug_struct("Tabulated").field("lattice", lattice).finish()
            }
            FunctionalKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A spatial test function represented by `φ̂ = F_S^{-1}(φ)`, optionally
/// translated by `h` (which multiplies `φ̂` by `e^{i hᵀξ}`).
#[derive(Debug, Clone)]
pub struct TestFunctional {
    dimension: usize,
    kind: FunctionalKind,
    shift: Option<Vec<f64>>,
}

impl TestFunctional {
    pub fn gaussian_hat(center: Vec<f64>, width: f64) -> Result<Self> {
        if center.is_empty() || !(width > 0.0) || !width.is_finite() {
            return Err(Error::Argument("gaussian hat needs a nonempty center and width > 0".into()));
        }
        Ok(TestFunctional {
            dimension: center.len(),
            kind: FunctionalKind::GaussianHat { center, width },
            shift: None,
        })
    }

    pub fn point_evaluation(x0: Vec<f64>) -> Result<Self> {
        if x0.is_empty() || x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("point evaluation needs a finite, nonempty x0".into()));
        }
        Ok(TestFunctional {
            dimension: x0.len(),
            kind: FunctionalKind::PointEvaluation { x0 },
            shift: None,
        })
    }

    pub fn tabulated(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Argument("tabulated functional value count mismatch".into()));
        }
        Ok(TestFunctional {
            dimension: lattice.dimension(),
            kind: FunctionalKind::Tabulated { lattice, values },
            shift: None,
        })
    }

    pub fn custom<F>(dimension: usize, hat: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        TestFunctional {
            dimension,
            kind: FunctionalKind::Custom(Arc::new(hat)),
            shift: None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &FunctionalKind {
        &self.kind
    }

    /// The functional of `φ(· - h)`.
    pub fn translated(&self, h: &[f64]) -> Result<Self> {
        check_dim(self.dimension, h.len())?;
        let shift = match &self.shift {
            Some(s) => s.iter().zip(h).map(|(a, b)| a + b).collect(),
            None => h.to_vec(),
        };
        Ok(TestFunctional {
            shift: Some(shift),
            ..self.clone()
        })
    }

    /// `ξ ↦ conj(φ̂(-ξ))`.
    pub fn conj_reflected(&self) -> Self {
        let inner = self.clone();
        TestFunctional::custom(self.dimension, move |xi| {
            let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
            inner.hat(&neg).conj()
        })
    }

    /// `φ̂(ξ)`.
    pub fn hat(&self, xi: &[f64]) -> Complex64 {
        let base = match &self.kind {
            FunctionalKind::GaussianHat { center, width } => {
                let r2: f64 = xi.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
                Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
            }
            FunctionalKind::PointEvaluation { x0 } => {
                let phase: f64 = x0.iter().zip(xi).map(|(a, b)| a * b).sum();
                Complex64::from_polar(point_norm(self.dimension), phase)
            }
            FunctionalKind::Tabulated { lattice, values } => interpolate(lattice, values, xi),
            FunctionalKind::Custom(f) => f(xi),
        };
        match &self.shift {
            Some(h) => {
                let phase: f64 = h.iter().zip(xi).map(|(a, b)| a * b).sum();
                base * Complex64::from_polar(1.0, phase)
            }
            None => base,
        }
    }

    /// Radius beyond which a Gaussian hat is below `1e-300`.
    pub fn negligible_radius(&self) -> Option<f64> {
        match &self.kind {
            FunctionalKind::GaussianHat { width, .. } => Some(width * (2.0 * 300.0 * 10f64.ln()).sqrt()),
            FunctionalKind::Tabulated { lattice, .. } => Some(
                lattice
                    .axes()
                    .iter()
                    .map(|a| a.start.abs().max(a.node(a.count - 1).abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            _ => None,
        }
    }
}

fn point_norm(d: usize) -> f64 {
    (2.0 * PI).powf(-(d as f64) / 2.0)
}

fn interpolate(lattice: &Lattice, values: &[Complex64], xi: &[f64]) -> Complex64 {
    let axes = lattice.axes();
    let d = axes.len();
    let mut base = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for (k, (axis, &x)) in axes.iter().zip(xi).enumerate() {
        let pos = (x - axis.start) / axis.step;
        let last = (axis.count - 1) as f64;
        if pos < -1e-9 || pos > last + 1e-9 {
            return Complex64::new(0.0, 0.0);
        }
        let pos = pos.clamp(0.0, last);
        let i = (pos.floor() as usize).min(axis.count.saturating_sub(2));
        base[k] = i;
        frac[k] = if axis.count == 1 { 0.0 } else { pos - i as f64 };
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << d) {
        let mut weight = 1.0;
        let mut idx = 0;
        for k in 0..d {
            let up = (corner >> k) & 1 == 1;
            let count = axes[k].count;
            let i = base[k] + usize::from(up && count > 1);
            weight *= if up { frac[k] } else { 1.0 - frac[k] };
            idx = idx * count + i;
        }
        if weight != 0.0 {
            acc += values[idx] * weight;
        }
    }
    acc
}
