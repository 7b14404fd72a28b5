//! Stable exponential kernels `e^{-cτ}` and `φ₁(c, τ) = (1 - e^{-cτ})/c`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this `|c|τ` the Taylor form of `φ₁` is used.
pub const SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpKernel {
    /// `e^{-cτ}`
    pub decay: Complex64,
    /// `φ₁(c, τ) = ∫_0^τ e^{-cs} ds`
    pub phi1: Complex64,
}

/// Evaluates `e^{-cτ}` and `φ₁(c, τ)` for `Re c ≥ 0`, `τ ≥ 0`.
pub fn exp_kernel(c: Complex64, tau: f64) -> Result<ExpKernel> {
    if c.re < 0.0 || c.re.is_nan() || c.im.is_nan() {
        return Err(Error::Domain(format!(
            "kernel needs Re(c) >= 0 (anti-parabolic symbol value {c})"
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("kernel needs tau >= 0, got {tau}")));
    }
    Ok(kernel_unchecked(c, tau))
}

/// `e^{-cτ}` alone, with the same domain checks as [`exp_kernel`].
pub fn exp_decay(c: Complex64, tau: f64) -> Result<Complex64> {
    if c.re < 0.0 || c.re.is_nan() || c.im.is_nan() {
        return Err(Error::Domain(format!(
            "kernel needs Re(c) >= 0 (anti-parabolic symbol value {c})"
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("kernel needs tau >= 0, got {tau}")));
    }
    Ok((-(c * tau)).exp())
}

pub(crate) fn kernel_unchecked(c: Complex64, tau: f64) -> ExpKernel {
    let z = c * tau;
    let decay = (-z).exp();
    let phi1 = if z.norm() < SERIES_THRESHOLD {
        // τ(1 - z/2 + z²/6 - z³/24)
        let series = 1.0 - z * (0.5 - z * (1.0 / 6.0 - z / 24.0));
        series * tau
    } else {
        // τ·(-expm1(-z))/z
        (-expm1(-z)) / c
    };
    ExpKernel { decay, phi1 }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let em1 = x.exp_m1();
    let half_sin = (0.5 * y).sin();
    // e^x cos y - 1 = expm1(x) cos y - 2 sin²(y/2)
    let re = em1 * y.cos() - 2.0 * half_sin * half_sin;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}
