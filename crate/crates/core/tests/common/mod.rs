#![allow(dead_code)]

use duhamel::measure::{Segment, SpaceTimeTerm, TemporalAtom};
use duhamel::{Atom, Complex64, EvolutionProblem, SpaceTimeMeasure, SpectralMeasure, Symbol, TemporalProfile};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

/// Every built-in kind in one dimension, with Re g bounded by about 10 on |ξ| ≤ 3.
pub fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (0.5..2.0f64, 0.0..1.4f64).prop_map(|(a, k)| Symbol::fractional_matern(1, a, k).unwrap()),
        (0.5..2.0f64).prop_map(|a| Symbol::fractional_laplacian(1, a).unwrap()),
        (-2.0..2.0f64).prop_map(|b| Symbol::advection(vec![b]).unwrap()),
        (0.0..2.0f64).prop_map(|k| Symbol::damping(1, k).unwrap()),
        (0.5..2.0f64, 0.0..2.0f64, -2.0..2.0f64).prop_map(|(a, k, b)| mix(a, k, b)),
    ]
}

/// Symbols with declared κ at least 0.5.
pub fn parabolic_symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (0.5..2.0f64, 1.0..1.4f64).prop_map(|(a, k)| Symbol::fractional_matern(1, a, k).unwrap()),
        (0.5..2.0f64).prop_map(|k| Symbol::damping(1, k).unwrap()),
        (0.5..2.0f64, 0.5..2.0f64, -2.0..2.0f64).prop_map(|(a, k, b)| mix(a, k, b)),
    ]
}

fn mix(alpha: f64, damping: f64, b: f64) -> Symbol {
    Symbol::linear_combination(vec![
        (1.0, Symbol::fractional_laplacian(1, alpha).unwrap()),
        (1.0, Symbol::damping(1, damping).unwrap()),
        (1.0, Symbol::advection(vec![b]).unwrap()),
    ])
    .unwrap()
}

pub fn spatial(max_atoms: usize) -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((-3.0..3.0f64, complex()), 1..=max_atoms).prop_map(|v| {
        SpectralMeasure::from_atoms(1, v.into_iter().map(|(xi, w)| Atom::new(vec![xi], w)).collect()).unwrap()
    })
}

/// Atom times in `(lo, hi)`, segments inside `[lo, hi)`.
pub fn profile(lo: f64, hi: f64, max_atoms: usize, max_segments: usize) -> impl Strategy<Value = TemporalProfile> {
    let atoms = prop::collection::vec((lo..hi, complex()), 0..=max_atoms);
    let segs = prop::collection::vec((lo..hi, lo..hi, complex()), 0..=max_segments);
    (atoms, segs).prop_map(move |(atoms, segs)| {
        let atoms = atoms
            .into_iter()
            .filter(|(t, _)| *t > lo)
            .map(|(t, mass)| TemporalAtom { t, mass })
            .collect();
        let segs = segs
            .into_iter()
            .filter(|(a, b, _)| (a - b).abs() > 1e-3)
            .map(|(a, b, r)| Segment::new(a.min(b), a.max(b), r).unwrap())
            .collect();
        TemporalProfile::new(atoms, segs).unwrap()
    })
}

pub fn source(lo: f64, hi: f64) -> impl Strategy<Value = SpaceTimeMeasure> {
    prop::collection::vec((spatial(5), profile(lo, hi, 5, 3)), 1..=2).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|(spatial, temporal)| SpaceTimeTerm { spatial, temporal })
            .collect();
        SpaceTimeMeasure::new(1, terms).unwrap()
    })
}

/// Source supported in `(0, 5]`.
pub fn duhamel_problem() -> impl Strategy<Value = EvolutionProblem> {
    (symbol(), source(0.0, 5.0)).prop_map(|(g, y)| EvolutionProblem::new(g, y).unwrap())
}

pub fn cauchy_problem() -> impl Strategy<Value = EvolutionProblem> {
    (symbol(), source(0.0, 5.0), spatial(4))
        .prop_map(|(g, y, v0)| EvolutionProblem::new(g, y).unwrap().with_initial(v0).unwrap())
}

/// Strictly parabolic problem with past and future source, an initial measure
/// and optionally a time-homogeneous rate.
pub fn steady_problem() -> impl Strategy<Value = EvolutionProblem> {
    (parabolic_symbol(), source(-3.0, 5.0), spatial(4), prop::option::of(spatial(2))).prop_map(|(g, y, v0, lambda)| {
        let p = EvolutionProblem::new(g, y).unwrap().with_initial(v0).unwrap();
        match lambda {
            Some(l) => p.with_time_homogeneous_source(l).unwrap(),
            None => p,
        }
    })
}

pub fn frequencies(m: &SpectralMeasure) -> Vec<f64> {
    m.atoms().iter().map(|a| a.xi[0]).collect()
}

pub fn tv_rel(a: &SpectralMeasure, b: &SpectralMeasure) -> f64 {
    let diff = a.sub(b).unwrap().total_variation();
    diff / a.total_variation().max(b.total_variation()).max(1e-300)
}
