//! Long-time behaviour: the gap between a Cauchy solution and the whole-line
//! steady solution, its `C_φ e^{-κt}` bound, and decay-rate fits.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{EvolutionProblem, Mode};
use crate::measure::{SpectralMeasure, TemporalProfile, TestFunctional};

/// Relative slack allowed on the bound.
pub const BOUND_SLACK: f64 = 1e-9;
/// Gaps at or below this are excluded from the rate fit.
pub const FIT_FLOOR: f64 = 1e-300;

/// The Cauchy problem compared against the steady solution: the source
/// restricted to `t > 0`, the initial measure (zero if absent), and the
/// homogeneous rate switched on at 0.
pub fn cauchy_counterpart(prob: &EvolutionProblem) -> Result<EvolutionProblem> {
    let v0 = prob
        .initial()
        .cloned()
        .unwrap_or_else(|| SpectralMeasure::empty(prob.dimension()));
    prob.clone()
        .with_source(prob.source().restrict_positive_time())?
        .with_initial(v0)
}

fn check(prob: &EvolutionProblem) -> Result<()> {
    prob.check_mode(Mode::Steady)
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        Some(t) => Err(Error::precondition(
            "time_nonneg",
            format!("asymptotic samples must be finite and >= 0, got {t}"),
        )),
        None => Ok(()),
    }
}

fn gap_with(cauchy: &EvolutionProblem, steady: &EvolutionProblem, f: &TestFunctional, t: f64) -> Result<f64> {
    let diff = cauchy.cauchy_snapshot(t)?.sub(&steady.steady_snapshot(t)?)?;
    Ok(diff.pair(f)?.norm())
}

/// `|⟨U_t - U∞_t, φ⟩|`.
pub fn convergence_gap(prob: &EvolutionProblem, f: &TestFunctional, t: f64) -> Result<f64> {
    check(prob)?;
    check_times(&[t])?;
    gap_with(&cauchy_counterpart(prob)?, prob, f, t)
}

fn weighted_tv(m: &SpectralMeasure, f: &TestFunctional) -> f64 {
    m.map_weights(|xi, w| Complex64::new(f.hat(xi).norm() * w.norm(), 0.0))
        .total_variation()
}

/// `∫_{s ≤ 0} e^{κs} d|p|(s)`.
fn discounted_past_mass(p: &TemporalProfile, kappa: f64) -> f64 {
    let mut acc = 0.0;
    for s in p.segments() {
        let hi = s.end.min(0.0);
        if hi > s.start {
            acc += s.rate.norm() * ((kappa * hi).exp() - (kappa * s.start).exp()) / kappa;
        }
    }
    for a in p.atoms() {
        if a.t <= 0.0 {
            acc += a.mass.norm() * (kappa * a.t).exp();
        }
    }
    acc
}

/// `C_φ = ∫|φ̂| d|V₀| + ∫_{s ≤ 0} e^{sκ}|φ̂| d|Y|`, with a homogeneous rate
/// contributing `∫|φ̂| d|λ| / κ`.
pub fn c_phi(prob: &EvolutionProblem, f: &TestFunctional) -> Result<f64> {
    check(prob)?;
    let kappa = prob.effective_kappa();
    let mut c = prob.initial().map_or(0.0, |v0| weighted_tv(v0, f));
    for term in prob.source().terms() {
        let past = discounted_past_mass(&term.temporal, kappa);
        if past > 0.0 {
            c += weighted_tv(&term.spatial, f) * past;
        }
    }
    if let Some(rate) = prob.time_homogeneous_source() {
        c += weighted_tv(rate, f) / kappa;
    }
    Ok(c)
}

/// Time after which the bound guarantees `gap < ε`.
pub fn t_epsilon(c_phi: f64, kappa: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !(kappa > 0.0) {
        return Err(Error::Argument(format!(
            "t_epsilon needs eps > 0 and kappa > 0, got eps = {eps}, kappa = {kappa}"
        )));
    }
    if c_phi <= eps {
        return Ok(0.0);
    }
    Ok((c_phi / eps).ln() / kappa)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub times: Vec<f64>,
    pub gaps: Vec<f64>,
    pub bounds: Vec<f64>,
    pub c_phi: f64,
    /// Lower bound on `Re g` declared by the symbol.
    pub kappa_declared: f64,
    /// `min Re g` over frequencies present in the problem; used in the bound.
    pub kappa_effective: f64,
    /// `None` when fewer than two late samples exceed the fit floor.
    pub kappa_fitted: Option<f64>,
    pub bound_violations: usize,
}

impl AsymptoticsReport {
    pub fn t_epsilon(&self, eps: f64) -> Result<f64> {
        t_epsilon(self.c_phi, self.kappa_effective, eps)
    }
}

pub fn verify_bound(prob: &EvolutionProblem, f: &TestFunctional, times: &[f64]) -> Result<AsymptoticsReport> {
    check(prob)?;
    check_times(times)?;
    let cauchy = cauchy_counterpart(prob)?;
    let kappa = prob.effective_kappa();
    let c = c_phi(prob, f)?;
    let gaps = times
        .par_iter()
        .map(|&t| gap_with(&cauchy, prob, f, t))
        .collect::<Result<Vec<f64>>>()?;
    let bounds: Vec<f64> = times.iter().map(|&t| c * (-kappa * t).exp()).collect();
    let bound_violations = gaps
        .iter()
        .zip(&bounds)
        .filter(|(g, b)| **g > **b * (1.0 + BOUND_SLACK))
        .count();
    let late = times.len() / 2;
    let kappa_fitted = fit_decay_rate(&times[late..], &gaps[late..]);
    Ok(AsymptoticsReport {
        times: times.to_vec(),
        gaps,
        bounds,
        c_phi: c,
        kappa_declared: prob.symbol().declared_kappa(),
        kappa_effective: kappa,
        kappa_fitted,
        bound_violations,
    })
}

/// Least-squares slope of `-ln gap` against `t`.
pub fn fit_decay_rate(times: &[f64], gaps: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(gaps)
        .filter(|(_, g)| **g > FIT_FLOOR)
        .map(|(t, g)| (*t, g.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// Largest gap over translates `φ(· - h)`; 0 for no shifts.
pub fn translation_sweep(prob: &EvolutionProblem, f: &TestFunctional, shifts: &[Vec<f64>], t: f64) -> Result<f64> {
    check(prob)?;
    check_times(&[t])?;
    let cauchy = cauchy_counterpart(prob)?;
    let diff = cauchy.cauchy_snapshot(t)?.sub(&prob.steady_snapshot(t)?)?;
    let mut worst: f64 = 0.0;
    for h in shifts {
        worst = worst.max(diff.pair(&f.translated(h)?)?.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub times: Vec<f64>,
    pub discrepancies: Vec<f64>,
    pub max_tv_discrepancy: f64,
}

/// Starts the Cauchy problem at `V₀ = U∞_0` and measures its distance from `U∞_t`.
pub fn fixed_point_check(prob: &EvolutionProblem, times: &[f64]) -> Result<FixedPointReport> {
    check(prob)?;
    check_times(times)?;
    let v0 = prob.steady_snapshot(0.0)?;
    let cauchy = cauchy_counterpart(prob)?.with_initial(v0)?;
    let discrepancies = times
        .par_iter()
        .map(|&t| Ok(cauchy.cauchy_snapshot(t)?.sub(&prob.steady_snapshot(t)?)?.total_variation()))
        .collect::<Result<Vec<f64>>>()?;
    let max_tv_discrepancy = discrepancies.iter().copied().fold(0.0, f64::max);
    Ok(FixedPointReport {
        times: times.to_vec(),
        discrepancies,
        max_tv_discrepancy,
    })
}
