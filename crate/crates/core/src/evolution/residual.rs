use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{EvolutionProblem, Mode};
use crate::measure::{SpectralMeasure, TestFunctional};
use crate::quadrature::{integrate, integrate_real, QuadTol};

const RESIDUAL_TOL: QuadTol = QuadTol::relative(1e-10);

/// Smooth bump `exp(-1/(1-u²))`, `u = (t - center)/radius`, supported in `[center - radius, center + radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
}

impl Bump {
    pub fn value(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.radius;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.radius;
        if u.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - u * u;
            (-1.0 / q).exp() * (-2.0 * u / (q * q)) / self.radius
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// `∫_lo^hi ψ`.
    pub fn integral_over(&self, lo: f64, hi: f64) -> Result<f64> {
        let (a, b) = self.support();
        let (lo, hi) = (lo.max(a), hi.min(b));
        if !(lo < hi) {
            return Ok(0.0);
        }
        integrate_real(|t| self.value(t), lo, hi, &[], QuadTol::relative(1e-12))
    }
}

/// Weak-form residuals, one per temporal test bump.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub bumps: Vec<Bump>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// `n_test` overlapping bumps tiling `window`, each supported inside it.
fn window_bumps(window: (f64, f64), n_test: usize) -> Result<Vec<Bump>> {
    let (t0, t1) = window;
    if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Argument(format!("residual window [{t0}, {t1}] is empty")));
    }
    if n_test == 0 {
        return Err(Error::Argument("residual needs at least one test bump".into()));
    }
    let radius = (t1 - t0) / (n_test as f64 + 1.0);
    Ok((0..n_test)
        .map(|k| Bump {
            center: t0 + (k as f64 + 1.0) * radius,
            radius,
        })
        .collect())
}

/// `max_ψ |⟨V, -ψ'⟩ + ⟨gV, ψ⟩ - ⟨Y, ψ⟩|` for the mode's own snapshots.
pub fn weak_residual(
    prob: &EvolutionProblem,
    mode: Mode,
    f: &TestFunctional,
    window: (f64, f64),
    n_test: usize,
) -> Result<ResidualReport> {
    prob.check_mode(mode)?;
    let ok = match mode {
        Mode::Cauchy => window.0 > 0.0,
        Mode::Duhamel => window.0 >= 0.0,
        Mode::Steady => true,
    };
    if !ok {
        return Err(Error::precondition(
            "residual_window",
            format!(
                "window [{}, {}] leaves the {} validity region",
                window.0,
                window.1,
                mode.as_str()
            ),
        ));
    }
    weak_residual_with(prob, mode, |t| prob.snapshot(mode, t), f, window, n_test)
}

/// As [`weak_residual`] but with caller-supplied snapshots, e.g. perturbed ones.
pub fn weak_residual_with<S>(
    prob: &EvolutionProblem,
    mode: Mode,
    snapshot: S,
    f: &TestFunctional,
    window: (f64, f64),
    n_test: usize,
) -> Result<ResidualReport>
where
    S: Fn(f64) -> Result<SpectralMeasure>,
{
    let bumps = window_bumps(window, n_test)?;
    let breakpoints = prob.source().atom_times();
    let symbol = prob.symbol();
    let mut residuals = Vec::with_capacity(bumps.len());
    for bump in &bumps {
        let (lo, hi) = bump.support();
        let mut failure = None;
        let lhs = integrate(
            |t| {
                if failure.is_some() {
                    return Complex64::new(0.0, 0.0);
                }
                let eval = snapshot(t).and_then(|v| {
                    let (pv, pgv) = v.pair_pair(f, |xi| symbol.value_at(xi))?;
                    Ok(-pv * bump.derivative(t) + pgv * bump.value(t))
                });
                match eval {
                    Ok(z) => z,
                    Err(e) => {
                        failure = Some(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            lo,
            hi,
            &breakpoints,
            RESIDUAL_TOL,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let rhs = source_pairing(prob, mode, f, bump)?;
        residuals.push((lhs - rhs).norm());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport {
        bumps,
        residuals,
        max_residual,
    })
}

/// `⟨Y, φ ⊠ ψ⟩`, exact on atoms.
fn source_pairing(prob: &EvolutionProblem, mode: Mode, f: &TestFunctional, bump: &Bump) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for term in prob.source().terms() {
        let spatial = term.spatial.pair(f)?;
        let mut temporal = Complex64::new(0.0, 0.0);
        for a in term.temporal.atoms() {
            temporal += a.mass * bump.value(a.t);
        }
        for s in term.temporal.segments() {
            temporal += s.rate * bump.integral_over(s.start, s.end)?;
        }
        acc += spatial * temporal;
    }
    if let Some(rate) = prob.time_homogeneous_source() {
        let (lo, hi) = bump.support();
        let lo = if mode == Mode::Cauchy { lo.max(0.0) } else { lo };
        acc += rate.pair(f)? * bump.integral_over(lo, hi)?;
    }
    Ok(acc)
}
