//! Closed-form snapshots of `∂V/∂t + gV = Y` on the spectral side.
//!
//! Three solution families are provided:
//!
//! * Duhamel: the unique solution supported in `t ≥ 0` for a source supported in `t ≥ 0`,
//!   `V_t = ∫_{[0,t]} e^{-(t-s)g} dY(s)`.
//! * Cauchy: `V_t = e^{-tg} V₀ + ∫_{(0,t]} e^{-(t-s)g} dY(s)`.
//! * Steady: the whole-line solution `V∞_t = ∫_{(-∞,t]} e^{-(t-s)g} dY(s)`, which
//!   needs `Re g ≥ κ > 0` on the source frequencies.
//!
//! All three are exact on the discrete measure class: atoms contribute
//! `a·e^{-(t-t_k)g}` and each segment contributes `r·e^{-(t-end)g}·φ₁(g, end-start)`.

mod identities;
mod residual;

pub use identities::{increment_identity, semigroup_defect, IncrementReport};
pub use residual::{weak_residual, weak_residual_with, Bump, ResidualReport};

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::kernel::{exp_decay, exp_kernel};
use crate::measure::{SpaceTimeMeasure, SpectralMeasure, TemporalProfile};
use crate::symbols::Symbol;

/// Smallest `|g|` accepted by [`invert_elliptic`].
pub const MIN_SYMBOL_MODULUS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Duhamel,
    Cauchy,
    Steady,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Duhamel => "duhamel",
            Mode::Cauchy => "cauchy",
            Mode::Steady => "steady",
        }
    }
}

/// Symbol, spectral source `Y`, optional initial datum `V₀` and optional
/// time-homogeneous rate `λ` (meaning `λ ⊠ dt` over the whole line).
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionProblem {
    symbol: Symbol,
    source: SpaceTimeMeasure,
    initial: Option<SpectralMeasure>,
    time_homogeneous: Option<SpectralMeasure>,
}

impl EvolutionProblem {
    pub fn new(symbol: Symbol, source: SpaceTimeMeasure) -> Result<Self> {
        check_dim(symbol.dimension(), source.dimension())?;
        Ok(EvolutionProblem {
            symbol,
            source,
            initial: None,
            time_homogeneous: None,
        })
    }

    pub fn with_initial(mut self, initial: SpectralMeasure) -> Result<Self> {
        check_dim(self.symbol.dimension(), initial.dimension())?;
        self.initial = Some(initial);
        Ok(self)
    }

    pub fn without_initial(mut self) -> Self {
        self.initial = None;
        self
    }

    pub fn with_time_homogeneous_source(mut self, rate: SpectralMeasure) -> Result<Self> {
        check_dim(self.symbol.dimension(), rate.dimension())?;
        self.time_homogeneous = Some(rate);
        Ok(self)
    }

    pub fn with_source(mut self, source: SpaceTimeMeasure) -> Result<Self> {
        check_dim(self.symbol.dimension(), source.dimension())?;
        self.source = source;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.symbol.dimension()
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn source(&self) -> &SpaceTimeMeasure {
        &self.source
    }

    pub fn initial(&self) -> Option<&SpectralMeasure> {
        self.initial.as_ref()
    }

    pub fn time_homogeneous_source(&self) -> Option<&SpectralMeasure> {
        self.time_homogeneous.as_ref()
    }

    /// Every frequency carrying source, initial or homogeneous mass.
    pub fn support_points(&self) -> Vec<Vec<f64>> {
        let mut pts = self.source.support_points();
        if let Some(v0) = &self.initial {
            pts.extend(v0.support_points());
        }
        if let Some(l) = &self.time_homogeneous {
            pts.extend(l.support_points());
        }
        pts
    }

    /// `min Re g` over [`support_points`](Self::support_points).
    pub fn effective_kappa(&self) -> f64 {
        let pts = self.support_points();
        self.symbol.effective_kappa(pts.iter().map(|p| p.as_slice()))
    }

    /// Whether the source is representable in the given mode.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        match mode {
            Mode::Duhamel => {
                self.check_nonneg_source()?;
                if self.time_homogeneous.is_some() {
                    return Err(Error::precondition(
                        "source_support_nonneg",
                        "a time-homogeneous source is not supported in t >= 0; use cauchy or steady mode",
                    ));
                }
                Ok(())
            }
            Mode::Cauchy => {
                if self.initial.is_none() {
                    return Err(Error::precondition("initial_condition", "cauchy mode needs an initial measure"));
                }
                self.check_nonneg_source()?;
                if let Some(t) = self.source.atom_times().first() {
                    if *t == 0.0 {
                        return Err(Error::precondition(
                            "no_source_atom_at_zero",
                            "source atom at t = 0 is ambiguous in cauchy mode; fold it into the initial measure",
                        ));
                    }
                }
                Ok(())
            }
            Mode::Steady => {
                let kappa = self.effective_kappa();
                if !(kappa > 0.0) {
                    return Err(Error::precondition(
                        "effective_kappa",
                        format!("steady solution needs Re g > 0 on every source frequency, effective_kappa = {kappa}"),
                    ));
                }
                Ok(())
            }
        }
    }

    fn check_nonneg_source(&self) -> Result<()> {
        if self.source.is_supported_nonneg() {
            Ok(())
        } else {
            Err(Error::precondition(
                "source_support_nonneg",
                format!(
                    "source starts at t = {} < 0",
                    self.source.support_lower_bound().unwrap_or(f64::NAN)
                ),
            ))
        }
    }

    pub fn snapshot(&self, mode: Mode, t: f64) -> Result<SpectralMeasure> {
        match mode {
            Mode::Duhamel => self.duhamel_snapshot(t),
            Mode::Cauchy => self.cauchy_snapshot(t),
            Mode::Steady => self.steady_snapshot(t),
        }
    }

    /// The snapshot with temporal atoms at exactly `t` excluded.
    pub fn snapshot_left(&self, mode: Mode, t: f64) -> Result<SpectralMeasure> {
        self.check_mode(mode)?;
        self.check_time(mode, t)?;
        if mode != Mode::Steady && t == 0.0 {
            return Ok(SpectralMeasure::empty(self.dimension()));
        }
        self.assemble(mode, t, false)
    }

    /// `∫_{[0,t]} e^{-(t-s)g} dY(s)`.
    pub fn duhamel_snapshot(&self, t: f64) -> Result<SpectralMeasure> {
        self.check_mode(Mode::Duhamel)?;
        self.check_time(Mode::Duhamel, t)?;
        self.assemble(Mode::Duhamel, t, true)
    }

    /// `e^{-tg}V₀ + ∫_{(0,t]} e^{-(t-s)g} dY(s)`; a homogeneous rate enters restricted to `t ≥ 0`.
    pub fn cauchy_snapshot(&self, t: f64) -> Result<SpectralMeasure> {
        self.check_mode(Mode::Cauchy)?;
        self.check_time(Mode::Cauchy, t)?;
        if t == 0.0 {
            return Ok(self.initial.clone().expect("checked by check_mode"));
        }
        self.assemble(Mode::Cauchy, t, true)
    }

    /// `∫_{(-∞,t]} e^{-(t-s)g} dY(s)` plus `λ/g` for a homogeneous rate.
    pub fn steady_snapshot(&self, t: f64) -> Result<SpectralMeasure> {
        self.check_mode(Mode::Steady)?;
        self.check_time(Mode::Steady, t)?;
        self.assemble(Mode::Steady, t, true)
    }

    fn check_time(&self, mode: Mode, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Argument(format!("time must be finite, got {t}")));
        }
        if mode != Mode::Steady && t < 0.0 {
            return Err(Error::precondition(
                "time_nonneg",
                format!("{} snapshots are defined for t >= 0, got {t}", mode.as_str()),
            ));
        }
        Ok(())
    }

    fn assemble(&self, mode: Mode, t: f64, include_at_t: bool) -> Result<SpectralMeasure> {
        let lower = match mode {
            Mode::Cauchy => Some(0.0),
            _ => None,
        };
        let mut out = SpectralMeasure::empty(self.dimension());
        for term in self.source.terms() {
            if !term_reaches(&term.temporal, t) {
                continue;
            }
            let part = term.spatial.try_map_weights(|xi, w| {
                let g = self.symbol.value_at(xi);
                Ok(w * temporal_response(&term.temporal, g, t, lower, include_at_t)?)
            })?;
            out = out.add(&part)?;
        }
        match mode {
            Mode::Cauchy => {
                let v0 = self.initial.as_ref().expect("checked by check_mode");
                let decayed = v0.try_map_weights(|xi, w| {
                    Ok(w * exp_decay(self.symbol.value_at(xi), t)?)
                })?;
                out = decayed.add(&out)?;
                if let Some(rate) = &self.time_homogeneous {
                    let part = rate.try_map_weights(|xi, w| {
                        Ok(w * exp_kernel(self.symbol.value_at(xi), t)?.phi1)
                    })?;
                    out = out.add(&part)?;
                }
            }
            Mode::Steady => {
                if let Some(rate) = &self.time_homogeneous {
                    let part = rate.try_map_weights(|xi, w| Ok(w / self.symbol.value_at(xi)))?;
                    out = out.add(&part)?;
                }
            }
            Mode::Duhamel => {}
        }
        Ok(out)
    }
}

fn term_reaches(p: &TemporalProfile, t: f64) -> bool {
    p.support_lower_bound().is_some_and(|lo| lo <= t)
}

/// `∫ e^{-(t-s)g} dp(s)` over `(lower, t]` (or `(lower, t)` when `include_at_t` is false).
///
/// Segments are summed before atoms, both in time order.
pub fn temporal_response(
    p: &TemporalProfile,
    g: Complex64,
    t: f64,
    lower: Option<f64>,
    include_at_t: bool,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for s in p.segments() {
        let start = lower.map_or(s.start, |lo| s.start.max(lo));
        if start > t || start >= s.end {
            continue;
        }
        let end = s.end.min(t);
        let k_tail = exp_kernel(g, t - end)?;
        let k_seg = exp_kernel(g, end - start)?;
        acc += s.rate * k_tail.decay * k_seg.phi1;
    }
    for a in p.atoms() {
        if lower.is_some_and(|lo| a.t <= lo) {
            continue;
        }
        if a.t > t || (!include_at_t && a.t == t) {
            break;
        }
        acc += a.mass * exp_decay(g, t - a.t)?;
    }
    Ok(acc)
}

/// Divides every weight by `g(ξ)`: the spectral side of `L_g U = X`.
pub fn invert_elliptic(m: &SpectralMeasure, sym: &Symbol) -> Result<SpectralMeasure> {
    check_dim(sym.dimension(), m.dimension())?;
    m.try_map_weights(|xi, w| {
        let g = sym.value_at(xi);
        if g.norm() < MIN_SYMBOL_MODULUS {
            return Err(Error::precondition(
                "nonzero_symbol",
                format!("|g(ξ)| = {} < {MIN_SYMBOL_MODULUS} at ξ = {xi:?}", g.norm()),
            ));
        }
        Ok(w / g)
    })
}
