//! Reference solutions for the modal ODE `v' = -g(ξ) v + y(t)`: fine-step
//! integrators and brute-force Duhamel quadrature, one frequency at a time.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{EvolutionProblem, Mode};
use crate::kernel::exp_decay;
use crate::measure::{SpectralMeasure, TemporalProfile, MERGE_TOL};

pub const MAX_STEPS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMethod {
    ImplicitEuler,
    CrankNicolson,
}

impl StepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            StepMethod::ImplicitEuler => "implicit_euler",
            StepMethod::CrankNicolson => "crank_nicolson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub method: StepMethod,
    pub dt: f64,
    pub t_end: f64,
}

impl StepperConfig {
    pub fn new(method: StepMethod, dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Argument(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::Argument(format!("t_end must be finite and >= 0, got {t_end}")));
        }
        if t_end / dt > MAX_STEPS {
            return Err(Error::Argument(format!(
                "t_end / dt = {} exceeds the step cap {MAX_STEPS}",
                t_end / dt
            )));
        }
        Ok(StepperConfig { method, dt, t_end })
    }
}

/// Value of the modal solution at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalValue {
    pub xi: Vec<f64>,
    pub value: Complex64,
}

/// The modal data of a problem at a single frequency.
struct Mode1d {
    g: Complex64,
    initial: Complex64,
    homogeneous: Complex64,
    terms: Vec<(Complex64, TemporalProfile)>,
}

impl Mode1d {
    fn rate_at(&self, s: f64) -> Complex64 {
        let mut y = if s >= 0.0 { self.homogeneous } else { Complex64::new(0.0, 0.0) };
        for (w, p) in &self.terms {
            for seg in p.segments() {
                if seg.start <= s && s < seg.end {
                    y += w * seg.rate;
                }
            }
        }
        y
    }

    fn atom_mass_at(&self, t: f64) -> Complex64 {
        let mut m = Complex64::new(0.0, 0.0);
        for (w, p) in &self.terms {
            for a in p.atoms() {
                if a.t == t {
                    m += w * a.mass;
                }
            }
        }
        m
    }

    fn knots(&self, t_end: f64) -> Vec<f64> {
        let mut k = vec![0.0, t_end];
        for (_, p) in &self.terms {
            k.extend(p.breakpoints().into_iter().filter(|&s| s > 0.0 && s < t_end));
        }
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }
}

fn oracle_mode(prob: &EvolutionProblem) -> Result<Mode> {
    let mode = if prob.initial().is_some() { Mode::Cauchy } else { Mode::Duhamel };
    prob.check_mode(mode)?;
    let grids = prob.source().terms().iter().any(|t| !t.spatial.grids().is_empty())
        || prob.initial().is_some_and(|m| !m.grids().is_empty())
        || prob.time_homogeneous_source().is_some_and(|m| !m.grids().is_empty());
    if grids {
        return Err(Error::Argument("oracles accept atom-only spectral measures".into()));
    }
    Ok(mode)
}

fn frequencies(prob: &EvolutionProblem) -> Vec<Vec<f64>> {
    let mut pts = prob.support_points();
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= MERGE_TOL));
    pts
}

fn modal_data(prob: &EvolutionProblem, xi: &[f64]) -> Mode1d {
    let mass = |m: Option<&SpectralMeasure>| m.map_or(Complex64::new(0.0, 0.0), |m| m.mass_at(xi));
    Mode1d {
        g: prob.symbol().value_at(xi),
        initial: mass(prob.initial()),
        homogeneous: mass(prob.time_homogeneous_source()),
        terms: prob
            .source()
            .terms()
            .iter()
            .map(|t| (t.spatial.mass_at(xi), t.temporal.clone()))
            .filter(|(w, _)| *w != Complex64::new(0.0, 0.0))
            .collect(),
    }
}

/// Integrates each frequency of the problem to `cfg.t_end`.
///
/// Cauchy semantics when the problem carries an initial measure, Duhamel
/// otherwise. Step boundaries are aligned with every atom time and segment end.
pub fn step_modal(prob: &EvolutionProblem, cfg: &StepperConfig) -> Result<Vec<ModalValue>> {
    oracle_mode(prob)?;
    let freqs = frequencies(prob);
    freqs
        .into_par_iter()
        .map(|xi| {
            let m = modal_data(prob, &xi);
            let value = step_one(&m, cfg)?;
            Ok(ModalValue { xi, value })
        })
        .collect()
}

fn step_one(m: &Mode1d, cfg: &StepperConfig) -> Result<Complex64> {
    let knots = m.knots(cfg.t_end);
    let mut total_steps = 0.0;
    let mut v = m.initial + m.atom_mass_at(0.0);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let n = ((b - a) / cfg.dt - 1e-9).ceil().max(1.0);
        total_steps += n;
        if total_steps > MAX_STEPS {
            return Err(Error::Argument(format!("step count exceeds the cap {MAX_STEPS}")));
        }
        let h = (b - a) / n;
        let y = m.rate_at(0.5 * (a + b));
        let hg = h * m.g;
        match cfg.method {
            StepMethod::ImplicitEuler => {
                let denom = 1.0 + hg;
                for _ in 0..n as u64 {
                    v = (v + h * y) / denom;
                }
            }
            StepMethod::CrankNicolson => {
                let num = 1.0 - 0.5 * hg;
                let denom = 1.0 + 0.5 * hg;
                for _ in 0..n as u64 {
                    v = (num * v + h * y) / denom;
                }
            }
        }
        v += m.atom_mass_at(b);
    }
    Ok(v)
}

/// Composite Simpson evaluation of the Duhamel integral, `n_panels` per
/// segment; atoms are summed exactly.
pub fn quadrature_duhamel(prob: &EvolutionProblem, t: f64, n_panels: usize) -> Result<Vec<ModalValue>> {
    let mode = oracle_mode(prob)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Argument(format!("t must be finite and >= 0, got {t}")));
    }
    if n_panels == 0 {
        return Err(Error::Argument("n_panels must be positive".into()));
    }
    let lower = if mode == Mode::Cauchy { 0.0 } else { f64::NEG_INFINITY };
    let freqs = frequencies(prob);
    freqs
        .into_par_iter()
        .map(|xi| {
            let m = modal_data(prob, &xi);
            let kernel = |s: f64| (-(t - s) * m.g).exp();
            let mut value = Complex64::new(0.0, 0.0);
            for (w, p) in &m.terms {
                let mut acc = Complex64::new(0.0, 0.0);
                for seg in p.segments() {
                    let start = seg.start.max(lower);
                    let end = seg.end.min(t);
                    if end > start {
                        acc += seg.rate * simpson(&kernel, start, end, n_panels);
                    }
                }
                for a in p.atoms() {
                    if a.t > lower && a.t <= t {
                        acc += a.mass * exp_decay(m.g, t - a.t)?;
                    }
                }
                value += w * acc;
            }
            if mode == Mode::Cauchy {
                value += m.initial * kernel(0.0);
                if m.homogeneous != Complex64::new(0.0, 0.0) && t > 0.0 {
                    value += m.homogeneous * simpson(&kernel, 0.0, t, n_panels);
                }
            }
            Ok(ModalValue { xi, value })
        })
        .collect()
}

fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let x0 = a + k as f64 * h;
        let x1 = if k + 1 == n { b } else { x0 + h };
        acc += (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
    }
    acc
}
