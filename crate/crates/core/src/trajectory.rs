//! Càdlàg evaluation of solution families: right values, left limits, jumps,
//! and recovery of point values through one-sided mollifiers.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{EvolutionProblem, Mode};
use crate::format::fmt_f64;
use crate::measure::{SpectralMeasure, TestFunctional};
use crate::quadrature::{integrate, integrate_real, QuadTol};

/// Initial jumps below this total variation are not scheduled.
pub const INITIAL_JUMP_TOL: f64 = 1e-14;

/// A solution family `t ↦ V_t` with its jump schedule.
#[derive(Debug, Clone)]
pub struct Trajectory {
    problem: EvolutionProblem,
    mode: Mode,
    schedule: Vec<f64>,
}

impl Trajectory {
    pub fn new(problem: EvolutionProblem, mode: Mode) -> Result<Self> {
        problem.check_mode(mode)?;
        let mut schedule = problem.source().atom_times();
        if mode == Mode::Cauchy {
            let v0 = problem.initial().expect("checked by check_mode");
            if v0.total_variation() > INITIAL_JUMP_TOL {
                schedule.insert(0, 0.0);
            }
        }
        Ok(Trajectory {
            problem,
            mode,
            schedule,
        })
    }

    pub fn problem(&self) -> &EvolutionProblem {
        &self.problem
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Sorted times at which the trajectory may jump.
    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    /// `V_t`, right-continuous: atoms at exactly `t` are included.
    pub fn eval(&self, t: f64) -> Result<SpectralMeasure> {
        self.problem.snapshot(self.mode, t)
    }

    /// `V_{t-}`. Trajectories of the `t ≥ 0` modes vanish before 0.
    pub fn left_limit(&self, t: f64) -> Result<SpectralMeasure> {
        self.problem.snapshot_left(self.mode, t)
    }

    /// `V_t - V_{t-}` computed from the source: the temporal-atom slice at `t`,
    /// or `V₀` for the initial jump of a Cauchy trajectory.
    pub fn jump_at(&self, t: f64) -> Result<SpectralMeasure> {
        if self.mode == Mode::Cauchy && t == 0.0 {
            return Ok(self.problem.initial().cloned().expect("checked by check_mode"));
        }
        self.problem.source().atom_slice(t)
    }

    pub fn jumps(&self, window: (f64, f64)) -> Result<Vec<(f64, SpectralMeasure)>> {
        let (lo, hi) = window;
        if lo > hi {
            return Err(Error::Argument(format!("jump window [{lo}, {hi}] is reversed")));
        }
        self.schedule
            .iter()
            .filter(|&&t| t >= lo && t <= hi)
            .map(|&t| Ok((t, self.jump_at(t)?)))
            .collect()
    }

    fn domain_start(&self) -> f64 {
        match self.mode {
            Mode::Steady => f64::NEG_INFINITY,
            _ => 0.0,
        }
    }

    /// `max TV(V_t - V_{t-} - jump_at(t))` over scheduled times in `window`.
    pub fn jump_consistency(&self, window: (f64, f64)) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (t, jump) in self.jumps(window)? {
            let d = self.eval(t)?.sub(&self.left_limit(t)?)?.sub(&jump)?;
            worst = worst.max(d.total_variation());
        }
        Ok(worst)
    }

    /// `TV(V_{t+ε} - V_t)` for each probe `ε`.
    pub fn right_continuity_probe(&self, t: f64, eps: &[f64]) -> Result<Vec<f64>> {
        let base = self.eval(t)?;
        eps.iter()
            .map(|&e| Ok(self.eval(t + e)?.sub(&base)?.total_variation()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

/// Widths `a_n` of the one-sided bumps and the side they sit on.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierParams {
    widths: Vec<f64>,
    side: Side,
}

impl MollifierParams {
    pub fn new(widths: Vec<f64>, side: Side) -> Result<Self> {
        if widths.is_empty() || widths.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::Argument("mollifier widths must be positive and finite".into()));
        }
        if widths.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Argument("mollifier widths must be strictly decreasing".into()));
        }
        Ok(MollifierParams { widths, side })
    }

    /// `a_n = 2^{-n}`, `n = 1..=depth`.
    pub fn dyadic(depth: u32, side: Side) -> Result<Self> {
        Self::new((1..=depth).map(|n| 0.5f64.powi(n as i32)).collect(), side)
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn side(&self) -> Side {
        self.side
    }
}

/// Unit-mass smooth bump supported on `(t, t + a)` (right) or `(t - a, t)` (left).
#[derive(Debug, Clone, Copy)]
pub struct OneSidedBump {
    lo: f64,
    width: f64,
    norm: f64,
}

impl OneSidedBump {
    pub fn new(t: f64, width: f64, side: Side) -> Result<Self> {
        let lo = match side {
            Side::Right => t,
            Side::Left => t - width,
        };
        let mut bump = OneSidedBump { lo, width, norm: 1.0 };
        let mass = integrate_real(|s| bump.shape(s), lo, lo + width, &[], QuadTol::relative(1e-12))?;
        bump.norm = 1.0 / mass;
        Ok(bump)
    }

    fn shape(&self, s: f64) -> f64 {
        let u = 2.0 * (s - self.lo) / self.width - 1.0;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.norm * self.shape(s)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.lo + self.width)
    }
}

/// `⟨T, φ ⊠ θ_n⟩ = ∫ pair(V_s, φ) θ_n(s) ds` for each width `a_n`.
pub fn mollifier_pair(
    traj: &Trajectory,
    f: &TestFunctional,
    t: f64,
    params: &MollifierParams,
) -> Result<Vec<(f64, Complex64)>> {
    let widest = params.widths[0];
    let lowest = match params.side {
        Side::Right => t,
        Side::Left => t - widest,
    };
    if lowest < traj.domain_start() {
        return Err(Error::precondition(
            "mollifier_window",
            format!(
                "{} mollifier at t = {t} with width {widest} leaves the {} domain",
                params.side.as_str(),
                traj.mode.as_str()
            ),
        ));
    }
    params
        .widths
        .par_iter()
        .map(|&a| {
            let bump = OneSidedBump::new(t, a, params.side)?;
            let (lo, hi) = bump.support();
            let mut failure = None;
            let value = integrate(
                |s| {
                    if failure.is_some() {
                        return Complex64::new(0.0, 0.0);
                    }
                    match traj.eval(s).and_then(|v| v.pair(f)) {
                        Ok(p) => p * bump.value(s),
                        Err(e) => {
                            failure = Some(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                },
                lo,
                hi,
                &traj.schedule,
                QuadTol::relative(1e-10),
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok((a, value)),
            }
        })
        .collect()
}

/// Position of a sample relative to the jump schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSide {
    Left,
    Right,
    Interior,
}

impl SampleSide {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleSide::Left => "left",
            SampleSide::Right => "right",
            SampleSide::Interior => "interior",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub functional_id: String,
    pub value: Complex64,
    pub side: SampleSide,
}

/// Sample points for a time grid with every jump time in range injected as a
/// left/right pair. Grid points that coincide with a jump are replaced by the pair.
pub fn sample_times(grid: &[f64], schedule: &[f64]) -> Vec<(f64, SampleSide)> {
    let (lo, hi) = match (grid.first(), grid.last()) {
        (Some(&a), Some(&b)) => (a.min(b), a.max(b)),
        _ => return Vec::new(),
    };
    let mut out: Vec<(f64, SampleSide)> = grid
        .iter()
        .filter(|t| !schedule.contains(t))
        .map(|&t| (t, SampleSide::Interior))
        .collect();
    for &t in schedule.iter().filter(|&&t| t >= lo && t <= hi) {
        out.push((t, SampleSide::Left));
        out.push((t, SampleSide::Right));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1 as u8).cmp(&(b.1 as u8))));
    out.dedup();
    out
}

/// Pairs the trajectory with every functional at every sample point.
pub fn sample_trajectory(
    traj: &Trajectory,
    functionals: &[(String, TestFunctional)],
    grid: &[f64],
) -> Result<Vec<TrajectoryRow>> {
    let points = sample_times(grid, traj.schedule());
    let per_point: Vec<Result<Vec<TrajectoryRow>>> = points
        .par_iter()
        .map(|&(t, side)| {
            let v = match side {
                SampleSide::Left => traj.left_limit(t)?,
                _ => traj.eval(t)?,
            };
            functionals
                .iter()
                .map(|(id, f)| {
                    Ok(TrajectoryRow {
                        t,
                        functional_id: id.clone(),
                        value: v.pair(f)?,
                        side,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}

/// CSV with header `t,functional_id,re,im,side`.
pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], mut w: W) -> io::Result<()> {
    writeln!(w, "t,functional_id,re,im,side")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(r.t),
            r.functional_id,
            fmt_f64(r.value.re),
            fmt_f64(r.value.im),
            r.side.as_str()
        )?;
    }
    Ok(())
}
