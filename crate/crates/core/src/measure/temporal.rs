use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::measure::spectral::SpectralMeasure;
use crate::quadrature::{integrate_real, QuadTol};

/// Temporal atom times closer than this are merged.
pub const TIME_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalAtom {
    pub t: f64,
    pub mass: Complex64,
}

/// Density `rate·dt` on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub rate: Complex64,
}

impl Segment {
    pub fn new(start: f64, end: f64, rate: Complex64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() || !(start < end) {
            return Err(Error::Argument(format!(
                "segment needs finite start < end, got [{start}, {end})"
            )));
        }
        if !rate.re.is_finite() || !rate.im.is_finite() {
            return Err(Error::Argument("segment rate must be finite".into()));
        }
        Ok(Segment { start, end, rate })
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    /// Length of `[start, end) ∩ (lo, hi]`, which is also the Lebesgue measure of the overlap.
    fn overlap(&self, lo: f64, hi: f64) -> f64 {
        (self.end.min(hi) - self.start.max(lo)).max(0.0)
    }
}

/// Temporal measure: finitely many atoms plus piecewise-constant rates.
///
/// Normalized on construction: atoms sorted by time and merged, segments split
/// into pairwise disjoint pieces with summed rates, sorted by start.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemporalProfile {
    atoms: Vec<TemporalAtom>,
    segments: Vec<Segment>,
}

impl TemporalProfile {
    pub fn new(atoms: Vec<TemporalAtom>, segments: Vec<Segment>) -> Result<Self> {
        for a in &atoms {
            if !a.t.is_finite() || !a.mass.re.is_finite() || !a.mass.im.is_finite() {
                return Err(Error::Argument("temporal atom time and mass must be finite".into()));
            }
        }
        for s in &segments {
            Segment::new(s.start, s.end, s.rate)?;
        }
        Ok(TemporalProfile {
            atoms: merge_time_atoms(atoms),
            segments: disjoint_segments(&segments),
        })
    }

    pub fn atom(t: f64, mass: Complex64) -> Result<Self> {
        TemporalProfile::new(vec![TemporalAtom { t, mass }], Vec::new())
    }

    pub fn segment(start: f64, end: f64, rate: Complex64) -> Result<Self> {
        TemporalProfile::new(Vec::new(), vec![Segment::new(start, end, rate)?])
    }

    pub fn atoms(&self) -> &[TemporalAtom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    /// `min(atom times ∪ segment starts)`, `None` for the zero profile.
    pub fn support_lower_bound(&self) -> Option<f64> {
        let a = self.atoms.first().map(|a| a.t);
        let s = self.segments.first().map(|s| s.start);
        match (a, s) {
            (Some(a), Some(s)) => Some(a.min(s)),
            (a, s) => a.or(s),
        }
    }

    pub fn total_variation(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass.norm()).sum();
        let segs: f64 = self.segments.iter().map(|s| s.rate.norm() * s.len()).sum();
        atoms + segs
    }

    /// `∫ (1+t²)^{-n} d|p|`; segment factors by adaptive quadrature.
    pub fn weighted_variation(&self, n: u32) -> Result<f64> {
        let weight = |t: f64| (1.0 + t * t).powi(-(n as i32));
        let mut acc: f64 = self.atoms.iter().map(|a| a.mass.norm() * weight(a.t)).sum();
        for s in &self.segments {
            let factor = integrate_real(weight, s.start, s.end, &[], QuadTol::relative(1e-10))?;
            acc += s.rate.norm() * factor;
        }
        Ok(acc)
    }

    /// Càdlàg primitive: `p((0, t])` for `t ≥ 0`, `-p((t, 0))` for `t < 0`.
    pub fn primitive(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if t >= 0.0 {
            for s in &self.segments {
                let len = s.overlap(0.0, t);
                if len > 0.0 {
                    acc += s.rate * len;
                }
            }
            for a in &self.atoms {
                if a.t > 0.0 && a.t <= t {
                    acc += a.mass;
                }
            }
        } else {
            for s in &self.segments {
                let len = (s.end.min(0.0) - s.start.max(t)).max(0.0);
                if len > 0.0 {
                    acc -= s.rate * len;
                }
            }
            for a in &self.atoms {
                if a.t > t && a.t < 0.0 {
                    acc -= a.mass;
                }
            }
        }
        acc
    }

    /// Mass of the half-open interval `(lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if !(lo < hi) {
            return acc;
        }
        for s in &self.segments {
            acc += s.rate * s.overlap(lo, hi);
        }
        for a in &self.atoms {
            if a.t > lo && a.t <= hi {
                acc += a.mass;
            }
        }
        acc
    }

    /// Restriction to `[0, ∞)`; atoms at exactly 0 survive.
    pub fn restrict_nonneg(&self) -> TemporalProfile {
        self.restrict_from(0.0, true)
    }

    /// Restriction to `[t0, ∞)` (`inclusive`) or `(t0, ∞)`.
    pub fn restrict_from(&self, t0: f64, inclusive: bool) -> TemporalProfile {
        let atoms = self
            .atoms
            .iter()
            .copied()
            .filter(|a| if inclusive { a.t >= t0 } else { a.t > t0 })
            .collect();
        let segments = self
            .segments
            .iter()
            .filter(|s| s.end > t0)
            .map(|s| Segment {
                start: s.start.max(t0),
                ..*s
            })
            .collect();
        TemporalProfile { atoms, segments }
    }

    /// The profile translated by `dt` in time.
    pub fn shifted(&self, dt: f64) -> TemporalProfile {
        TemporalProfile {
            atoms: self
                .atoms
                .iter()
                .map(|a| TemporalAtom {
                    t: a.t + dt,
                    mass: a.mass,
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    start: s.start + dt,
                    end: s.end + dt,
                    rate: s.rate,
                })
                .collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> TemporalProfile {
        TemporalProfile {
            atoms: self
                .atoms
                .iter()
                .map(|x| TemporalAtom {
                    t: x.t,
                    mass: x.mass * a,
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    rate: s.rate * a,
                    ..*s
                })
                .collect(),
        }
    }

    /// Times where the density is discontinuous or an atom sits.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.atoms.iter().map(|a| a.t).collect();
        for s in &self.segments {
            out.push(s.start);
            out.push(s.end);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

fn merge_time_atoms(mut atoms: Vec<TemporalAtom>) -> Vec<TemporalAtom> {
    atoms.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut out: Vec<TemporalAtom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if (a.t - last.t).abs() <= TIME_MERGE_TOL => last.mass += a.mass,
            _ => out.push(a),
        }
    }
    out
}

fn disjoint_segments(segments: &[Segment]) -> Vec<Segment> {
    if segments.len() <= 1 {
        return segments.to_vec();
    }
    let mut cuts: Vec<f64> = segments.iter().flat_map(|s| [s.start, s.end]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut rate = Complex64::new(0.0, 0.0);
        let mut covered = false;
        for s in segments {
            if s.start <= lo && s.end >= hi {
                rate += s.rate;
                covered = true;
            }
        }
        if covered {
            out.push(Segment {
                start: lo,
                end: hi,
                rate,
            });
        }
    }
    out
}

/// One separable term `spatial ⊠ temporal`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeTerm {
    pub spatial: SpectralMeasure,
    pub temporal: TemporalProfile,
}

/// Finite sum of separable spatio-temporal terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeMeasure {
    dimension: usize,
    terms: Vec<SpaceTimeTerm>,
}

impl SpaceTimeMeasure {
    pub fn new(dimension: usize, terms: Vec<SpaceTimeTerm>) -> Result<Self> {
        for t in &terms {
            check_dim(dimension, t.spatial.dimension())?;
        }
        Ok(SpaceTimeMeasure { dimension, terms })
    }

    pub fn zero(dimension: usize) -> Self {
        SpaceTimeMeasure {
            dimension,
            terms: Vec::new(),
        }
    }

    pub fn single(spatial: SpectralMeasure, temporal: TemporalProfile) -> Self {
        SpaceTimeMeasure {
            dimension: spatial.dimension(),
            terms: vec![SpaceTimeTerm { spatial, temporal }],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[SpaceTimeTerm] {
        &self.terms
    }

    /// `Σ_terms TV(spatial)·TV(temporal)`.
    pub fn total_variation(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.spatial.total_variation() * t.temporal.total_variation())
            .sum()
    }

    /// `∫ (1+|ξ|²)^{-n_s}(1+t²)^{-n_t} d|μ|`, summed over terms.
    pub fn weighted_mass(&self, n_s: u32, n_t: u32) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.spatial.weighted_variation(n_s) * t.temporal.weighted_variation(n_t)?;
        }
        Ok(acc)
    }

    pub fn support_lower_bound(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|t| t.temporal.support_lower_bound())
            .reduce(f64::min)
    }

    /// Support contained in `t ≥ 0`.
    pub fn is_supported_nonneg(&self) -> bool {
        self.support_lower_bound().is_none_or(|t| t >= 0.0)
    }

    pub fn restrict_nonneg_time(&self) -> SpaceTimeMeasure {
        self.map_temporal(TemporalProfile::restrict_nonneg)
    }

    /// Restriction to `t > 0`, dropping atoms at exactly 0.
    pub fn restrict_positive_time(&self) -> SpaceTimeMeasure {
        self.map_temporal(|p| p.restrict_from(0.0, false))
    }

    pub fn map_temporal<F: Fn(&TemporalProfile) -> TemporalProfile>(&self, f: F) -> SpaceTimeMeasure {
        SpaceTimeMeasure {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|t| SpaceTimeTerm {
                    spatial: t.spatial.clone(),
                    temporal: f(&t.temporal),
                })
                .collect(),
        }
    }

    pub fn map_spatial<F>(&self, f: F) -> Result<SpaceTimeMeasure>
    where
        F: Fn(&SpectralMeasure) -> Result<SpectralMeasure>,
    {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(SpaceTimeTerm {
                spatial: f(&t.spatial)?,
                temporal: t.temporal.clone(),
            });
        }
        Ok(SpaceTimeMeasure {
            dimension: self.dimension,
            terms,
        })
    }

    /// Sorted, deduplicated temporal atom times across all terms.
    pub fn atom_times(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|t| t.temporal.atoms().iter().map(|a| a.t))
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.terms.iter().flat_map(|t| t.temporal.breakpoints()).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// The spatial slice `μ(· × {t})`.
    pub fn atom_slice(&self, t: f64) -> Result<SpectralMeasure> {
        let mut out = SpectralMeasure::empty(self.dimension);
        for term in &self.terms {
            for a in term.temporal.atoms() {
                if a.t == t {
                    out = out.add(&term.spatial.scale(a.mass))?;
                }
            }
        }
        Ok(out)
    }

    /// Every spatial support point across terms.
    pub fn support_points(&self) -> Vec<Vec<f64>> {
        self.terms.iter().flat_map(|t| t.spatial.support_points()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::spectral::Atom;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ta(t: f64, m: f64) -> TemporalAtom {
        TemporalAtom { t, mass: c(m) }
    }

    #[test]
    fn primitive_examples() {
        let p = TemporalProfile::new(vec![ta(1.0, 1.0), ta(2.0, -2.0)], vec![]).unwrap();
        assert_eq!(p.primitive(1.5), c(1.0));
        assert_eq!(p.primitive(2.5), c(-1.0));
        assert_eq!(p.primitive(0.5), c(0.0));
        assert_eq!(p.primitive(0.0), c(0.0));

        let s = TemporalProfile::segment(0.0, 1.0, c(1.0)).unwrap();
        assert_eq!(s.primitive(0.5), c(0.5));

        let neg = TemporalProfile::atom(-1.0, c(3.0)).unwrap();
        assert_eq!(neg.primitive(-2.0), c(-3.0));
        assert_eq!(neg.primitive(-1.0), c(0.0));
    }

    #[test]
    fn overlapping_segments_are_split() {
        let p = TemporalProfile::new(
            vec![],
            vec![
                Segment::new(0.0, 2.0, c(1.0)).unwrap(),
                Segment::new(1.0, 3.0, c(2.0)).unwrap(),
            ],
        )
        .unwrap();
        let rates: Vec<_> = p.segments().iter().map(|s| (s.start, s.end, s.rate.re)).collect();
        assert_eq!(rates, vec![(0.0, 1.0, 1.0), (1.0, 2.0, 3.0), (2.0, 3.0, 2.0)]);
        assert_eq!(p.total_variation(), 1.0 + 3.0 + 2.0);
    }

    #[test]
    fn restriction_examples() {
        let p = TemporalProfile::new(vec![ta(-1.0, 1.0), ta(1.0, 1.0), ta(0.0, 5.0)], vec![]).unwrap();
        let r = p.restrict_nonneg();
        assert_eq!(r.atoms().iter().map(|a| a.t).collect::<Vec<_>>(), vec![0.0, 1.0]);

        let s = TemporalProfile::segment(-1.0, 1.0, c(2.0)).unwrap().restrict_nonneg();
        assert_eq!(s.segments(), &[Segment::new(0.0, 1.0, c(2.0)).unwrap()]);

        let strict = p.restrict_from(0.0, false);
        assert_eq!(strict.atoms().len(), 1);
    }

    #[test]
    fn space_time_total_variation_and_mass() {
        let spatial = SpectralMeasure::from_atoms(1, vec![Atom::new(vec![0.0], c(1.0))]).unwrap();
        let st = SpaceTimeMeasure::single(spatial.clone(), TemporalProfile::segment(0.0, 2.0, c(1.0)).unwrap());
        assert_eq!(st.total_variation(), 2.0);
        assert!(SpaceTimeMeasure::zero(1).total_variation() == 0.0);

        let st = SpaceTimeMeasure::single(spatial.clone(), TemporalProfile::segment(0.0, 1.0, c(1.0)).unwrap());
        let m = st.weighted_mass(0, 1).unwrap();
        assert!((m - 1f64.atan()).abs() < 1e-10 * 1f64.atan());

        let origin = SpaceTimeMeasure::single(spatial, TemporalProfile::atom(0.0, c(1.0)).unwrap());
        assert_eq!(origin.weighted_mass(3, 5).unwrap(), 1.0);

        let far = SpaceTimeMeasure::single(
            SpectralMeasure::from_atoms(1, vec![Atom::new(vec![1.0], c(4.0))]).unwrap(),
            TemporalProfile::atom(1.0, c(1.0)).unwrap(),
        );
        assert_eq!(far.weighted_mass(1, 1).unwrap(), 1.0);
    }

    #[test]
    fn support_predicate() {
        let spatial = SpectralMeasure::from_atoms(1, vec![Atom::new(vec![0.0], c(1.0))]).unwrap();
        let st = SpaceTimeMeasure::single(spatial, TemporalProfile::segment(-1.0, 1.0, c(1.0)).unwrap());
        assert!(!st.is_supported_nonneg());
        let r = st.restrict_nonneg_time();
        assert!(r.is_supported_nonneg());
        assert_eq!(r.restrict_nonneg_time(), r);
        assert!(SpaceTimeMeasure::zero(2).is_supported_nonneg());
    }
}
