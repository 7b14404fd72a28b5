//! Adaptive Simpson quadrature for piecewise-smooth complex integrands.
//!
//! Known discontinuities are passed as breakpoints; the integral is split there
//! so that each piece is smooth.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;
const ABS_FLOOR: f64 = 1e-300;

/// Tolerance settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub rel: f64,
    pub abs: f64,
}

impl QuadTol {
    pub const fn relative(rel: f64) -> Self {
        QuadTol { rel, abs: 0.0 }
    }
}

/// `∫_a^b f`, split at every breakpoint strictly inside `(a, b)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], tol: QuadTol) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a < b) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    // Scale estimate from a coarse composite rule drives the relative tolerance.
    let mut scale = 0.0;
    for w in edges.windows(2) {
        scale += composite_abs(&mut f, w[0], w[1], 16);
    }
    let budget = (tol.rel * scale).max(tol.abs).max(ABS_FLOOR);
    let total_len = b - a;

    let mut sum = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let piece_tol = budget * (hi - lo) / total_len;
        sum += simpson_piece(&mut f, lo, hi, piece_tol)?;
    }
    Ok(sum)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], tol: QuadTol) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate(|t| Complex64::new(f(t), 0.0), a, b, breakpoints, tol).map(|z| z.re)
}

fn composite_abs<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        let fa = f(x0).norm();
        let fm = f(x0 + 0.5 * h).norm();
        let fb = f((x0 + h).next_down()).norm();
        acc += h / 6.0 * (fa + 4.0 * fm + fb);
    }
    acc
}

struct Panel {
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
}

fn simpson_piece<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    // Integrands are right-continuous; the right end uses the left limit.
    let fa = f(a);
    let fb = f(b.next_down());
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol,
        depth: 0,
    }];
    let mut sum = Complex64::new(0.0, 0.0);
    // Explicit stack keeps the left-to-right summation order fixed.
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        if delta.norm() <= 15.0 * p.tol {
            sum += left + right + delta / 15.0;
        } else if p.depth >= MAX_DEPTH {
            return Err(Error::Quadrature {
                lo: p.a,
                hi: p.b,
                jump_time: m,
            });
        } else {
            let half = 0.5 * p.tol;
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol: half,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol: half,
                depth: p.depth + 1,
            });
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let v = integrate_real(|t| 1.0 / (1.0 + t * t), 0.0, 1.0, &[], QuadTol::relative(1e-12)).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let z = integrate(|t| Complex64::new(0.0, t).exp(), 0.0, std::f64::consts::PI, &[], QuadTol::relative(1e-12))
            .unwrap();
        assert!((z - Complex64::new(0.0, 2.0)).norm() < 1e-11);
    }

    #[test]
    fn step_function_with_breakpoint_is_exact() {
        let f = |t: f64| if t < 0.3 { 1.0 } else { -2.0 };
        let v = integrate_real(f, 0.0, 1.0, &[0.3], QuadTol::relative(1e-12)).unwrap();
        assert!((v - (0.3 - 1.4)).abs() < 1e-14);
    }

    #[test]
    fn empty_interval() {
        let v = integrate_real(|_| 1.0, 1.0, 1.0, &[], QuadTol::relative(1e-10)).unwrap();
        assert_eq!(v, 0.0);
    }
}
