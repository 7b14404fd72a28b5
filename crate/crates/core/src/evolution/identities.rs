use num_complex::Complex64;

use super::{EvolutionProblem, Mode};
use crate::error::{Error, Result};
use crate::measure::{SpectralMeasure, TestFunctional};
use crate::quadrature::{integrate, QuadTol};

/// Both sides of `⟨V_t - V_s, φ⟩ = ⟨Y, φ ⊠ 1_{(s,t]}⟩ - ∫_s^t ⟨gV_u, φ⟩ du`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementReport {
    pub lhs: Complex64,
    pub source_mass: Complex64,
    pub drift: Complex64,
    /// `|lhs - (source_mass - drift)| / max(1, |lhs|, |source_mass|, |drift|)`.
    pub relative_defect: f64,
}

pub fn increment_identity(
    prob: &EvolutionProblem,
    mode: Mode,
    f: &TestFunctional,
    s: f64,
    t: f64,
) -> Result<IncrementReport> {
    prob.check_mode(mode)?;
    if !(s <= t) {
        return Err(Error::Argument(format!("increment needs s <= t, got s = {s}, t = {t}")));
    }
    let lhs = prob.snapshot(mode, t)?.sub(&prob.snapshot(mode, s)?)?.pair(f)?;

    let lower = if mode == Mode::Cauchy { s.max(0.0) } else { s };
    let mut source_mass = Complex64::new(0.0, 0.0);
    for term in prob.source().terms() {
        let m = term.temporal.mass_between(lower, t);
        if m != Complex64::new(0.0, 0.0) {
            source_mass += term.spatial.pair(f)? * m;
        }
    }
    if let Some(rate) = prob.time_homogeneous_source() {
        let len = match mode {
            Mode::Steady => t - s,
            _ => t - s.max(0.0),
        };
        source_mass += rate.pair(f)? * len;
    }

    let mut failure = None;
    let drift = integrate(
        |u| {
            if failure.is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match prob
                .snapshot(mode, u)
                .and_then(|v| v.pair_pair(f, |xi| prob.symbol().value_at(xi)))
                .map(|(_, pgv)| pgv)
            {
                Ok(z) => z,
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        s,
        t,
        &prob.source().breakpoints(),
        QuadTol::relative(1e-12),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = 1f64.max(lhs.norm()).max(source_mass.norm()).max(drift.norm());
    Ok(IncrementReport {
        lhs,
        source_mass,
        drift,
        relative_defect: (lhs - (source_mass - drift)).norm() / scale,
    })
}

/// Restarts the evolution at `s` from `V_s` with the source after `s`, runs
/// it for `t - s`, and compares with `V_t`. Returns
/// `TV(restarted - V_t) / max(TV(V_t), tiny)`.
pub fn semigroup_defect(prob: &EvolutionProblem, mode: Mode, s: f64, t: f64) -> Result<f64> {
    prob.check_mode(mode)?;
    if !(s <= t) || (mode != Mode::Steady && s < 0.0) {
        return Err(Error::Argument(format!("semigroup check needs 0 <= s <= t, got s = {s}, t = {t}")));
    }
    let vs = prob.snapshot(mode, s)?;
    let rest = prob
        .source()
        .map_temporal(|p| p.restrict_from(s, false).shifted(-s));
    let mut restarted = EvolutionProblem::new(prob.symbol().clone(), rest)?.with_initial(vs)?;
    if let Some(rate) = prob.time_homogeneous_source() {
        if mode == Mode::Duhamel {
            return Err(Error::Argument("duhamel problems carry no homogeneous rate".into()));
        }
        restarted = restarted.with_time_homogeneous_source(rate.clone())?;
    }
    let direct = prob.snapshot(mode, t)?;
    let via = restarted.cauchy_snapshot(t - s)?;
    let diff: SpectralMeasure = via.sub(&direct)?;
    Ok(diff.total_variation() / direct.total_variation().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Segment, SpaceTimeMeasure, TemporalAtom, TemporalProfile};
    use crate::symbols::Symbol;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn problem() -> EvolutionProblem {
        let profile = TemporalProfile::new(
            vec![TemporalAtom { t: 0.4, mass: c(1.0) }, TemporalAtom { t: 1.1, mass: Complex64::new(0.5, -0.2) }],
            vec![Segment::new(0.2, 1.5, c(0.7)).unwrap()],
        )
        .unwrap();
        let spatial = SpectralMeasure::from_atoms(
            1,
            vec![Atom::new(vec![0.3], c(1.0)), Atom::new(vec![-1.2], Complex64::new(0.0, 2.0))],
        )
        .unwrap();
        let sym = Symbol::linear_combination(vec![
            (1.0, Symbol::fractional_matern(1, 1.0, 0.5).unwrap()),
            (1.0, Symbol::advection(vec![0.7]).unwrap()),
        ])
        .unwrap();
        EvolutionProblem::new(sym, SpaceTimeMeasure::single(spatial, profile)).unwrap()
    }

    #[test]
    fn increment_on_duhamel() {
        let p = problem();
        let f = TestFunctional::gaussian_hat(vec![0.0], 1.5).unwrap();
        for (s, t) in [(0.0, 0.4), (0.1, 1.3), (0.4, 1.1), (1.2, 3.0)] {
            let r = increment_identity(&p, Mode::Duhamel, &f, s, t).unwrap();
            assert!(r.relative_defect <= 1e-10, "{s} {t} {r:?}");
        }
    }

    #[test]
    fn increment_on_steady_with_rate() {
        let p = problem()
            .with_time_homogeneous_source(SpectralMeasure::from_atoms(1, vec![Atom::new(vec![2.0], c(1.0))]).unwrap())
            .unwrap();
        let f = TestFunctional::point_evaluation(vec![0.25]).unwrap();
        let r = increment_identity(&p, Mode::Steady, &f, -1.0, 2.0).unwrap();
        assert!(r.relative_defect <= 1e-10, "{r:?}");
    }

    #[test]
    fn semigroup_restart() {
        let p = problem();
        for (s, t) in [(0.0, 1.0), (0.4, 1.1), (0.7, 2.5)] {
            assert!(semigroup_defect(&p, Mode::Duhamel, s, t).unwrap() <= 1e-13);
        }
    }
}
