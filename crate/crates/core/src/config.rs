//! Experiment configuration: JSON documents describing a problem, the
//! functionals to evaluate and per-command options.
//!
//! Complex numbers are written as `[re, im]`. Every error names the path of
//! the offending field, e.g. `source.terms[1].temporal.segments[0]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{EvolutionProblem, Mode};
use crate::measure::{
    Atom, GridAxis, GridDensity, Lattice, Segment, SpaceTimeMeasure, SpaceTimeTerm, SpectralMeasure,
    TemporalAtom, TemporalProfile, TestFunctional,
};
use crate::oracle::{StepMethod, StepperConfig};
use crate::symbols::Symbol;
use crate::trajectory::{MollifierParams, Side};
use crate::transform::SpatialGrid;
use num_complex::Complex64;

pub const MAX_DIMENSION: usize = 16;
pub const MAX_GRID_NODES: usize = 1 << 22;
pub const MAX_TIME_SAMPLES: usize = 1 << 20;
pub const MAX_MOLLIFIER_DEPTH: u32 = 40;

pub type RawComplex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawSymbol {
    FractionalMatern { alpha: f64, kappa: f64 },
    FractionalLaplacian { alpha: f64 },
    Advection { b: Vec<f64> },
    Damping { c: f64 },
    LinearCombination { terms: Vec<RawSymbolTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSymbolTerm {
    pub coef: f64,
    pub symbol: RawSymbol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub xi: Vec<f64>,
    pub w: RawComplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGaussian {
    pub center: Vec<f64>,
    pub width: f64,
    #[serde(default = "unit")]
    pub amplitude: RawComplex,
}

/// Lattice density given either by explicit nodal values or by a Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub axes: Vec<RawAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<RawComplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<RawGaussian>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpectralMeasure {
    #[serde(default)]
    pub atoms: Vec<RawAtom>,
    #[serde(default)]
    pub grids: Vec<RawGrid>,
    #[serde(default)]
    pub hermitian_symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTemporalAtom {
    pub t: f64,
    pub mass: RawComplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSegment {
    pub from: f64,
    pub to: f64,
    pub rate: RawComplex,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTemporalProfile {
    #[serde(default)]
    pub atoms: Vec<RawTemporalAtom>,
    #[serde(default)]
    pub segments: Vec<RawSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSourceTerm {
    pub spatial: RawSpectralMeasure,
    pub temporal: RawTemporalProfile,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    #[serde(default)]
    pub terms: Vec<RawSourceTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_homogeneous: Option<RawSpectralMeasure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawFunctional {
    GaussianHat { id: String, center: Vec<f64>, width: f64 },
    PointEvaluation { id: String, x0: Vec<f64> },
}

impl RawFunctional {
    pub fn id(&self) -> &str {
        match self {
            RawFunctional::GaussianHat { id, .. } | RawFunctional::PointEvaluation { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTimeGrid {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpatialGrid {
    pub axes: Vec<RawAxis>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawMode {
    Duhamel,
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawMethod {
    ImplicitEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOptions {
    #[serde(default = "default_method")]
    pub method: RawMethod,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Defaults to the end of the time grid.
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_panels")]
    pub n_panels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsOptions {
    #[serde(default)]
    pub shifts: Vec<Vec<f64>>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierOptions {
    #[serde(default = "default_depth")]
    pub depth: u32,
    /// Defaults to the jump times inside the time grid.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_increment_tol")]
    pub increment_tol: f64,
    #[serde(default = "default_hermitian_tol")]
    pub hermitian_tol: f64,
    /// Multiplies every snapshot weight before the residual check; 1 leaves
    /// the solution intact.
    #[serde(default = "default_corrupt")]
    pub corrupt_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<RawMode>,
    #[serde(default = "OracleOptions::default_value")]
    pub oracle: OracleOptions,
    #[serde(default = "AsymptoticsOptions::default_value")]
    pub asymptotics: AsymptoticsOptions,
    #[serde(default = "MollifierOptions::default_value")]
    pub mollifier: MollifierOptions,
    #[serde(default = "VerifyOptions::default_value")]
    pub verify: VerifyOptions,
}

/// The document as written, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub dimension: usize,
    pub symbol: RawSymbol,
    #[serde(default)]
    pub source: RawSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<RawSpectralMeasure>,
    #[serde(default)]
    pub functionals: Vec<RawFunctional>,
    pub time_grid: RawTimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial_grid: Option<RawSpatialGrid>,
    #[serde(default = "RawOptions::default_value")]
    pub options: RawOptions,
}

fn unit() -> RawComplex {
    [1.0, 0.0]
}
fn default_method() -> RawMethod {
    RawMethod::CrankNicolson
}
fn default_dt() -> f64 {
    1e-4
}
fn default_panels() -> usize {
    256
}
fn default_epsilon() -> f64 {
    1e-6
}
fn default_depth() -> u32 {
    20
}
fn default_n_test() -> usize {
    8
}
fn default_residual_tol() -> f64 {
    1e-7
}
fn default_increment_tol() -> f64 {
    1e-8
}
fn default_hermitian_tol() -> f64 {
    1e-12
}
fn default_corrupt() -> f64 {
    1.0
}

impl OracleOptions {
    fn default_value() -> Self {
        OracleOptions {
            method: default_method(),
            dt: default_dt(),
            t_end: None,
            n_panels: default_panels(),
        }
    }
}

impl AsymptoticsOptions {
    fn default_value() -> Self {
        AsymptoticsOptions {
            shifts: Vec::new(),
            epsilon: default_epsilon(),
        }
    }
}

impl MollifierOptions {
    fn default_value() -> Self {
        MollifierOptions {
            depth: default_depth(),
            times: None,
        }
    }
}

impl VerifyOptions {
    fn default_value() -> Self {
        VerifyOptions {
            n_test: default_n_test(),
            residual_tol: default_residual_tol(),
            increment_tol: default_increment_tol(),
            hermitian_tol: default_hermitian_tol(),
            corrupt_scale: default_corrupt(),
        }
    }
}

impl RawOptions {
    fn default_value() -> Self {
        RawOptions {
            mode: None,
            oracle: OracleOptions::default_value(),
            asymptotics: AsymptoticsOptions::default_value(),
            mollifier: MollifierOptions::default_value(),
            verify: VerifyOptions::default_value(),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    raw: RawConfig,
    pub dimension: usize,
    pub symbol: Symbol,
    pub source: SpaceTimeMeasure,
    pub time_homogeneous: Option<SpectralMeasure>,
    pub initial: Option<SpectralMeasure>,
    pub functionals: Vec<(String, TestFunctional)>,
    pub time_grid: Vec<f64>,
    pub spatial_grid: Option<(SpatialGrid, Vec<f64>)>,
    pub mode: Mode,
    pub stepper: StepperConfig,
    pub n_panels: usize,
    pub shifts: Vec<Vec<f64>>,
    pub epsilon: f64,
    pub mollifier_depth: u32,
    pub mollifier_times: Option<Vec<f64>>,
    pub verify: VerifyOptions,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })
}

fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    })
}

fn cx(v: RawComplex) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn check_vec(path: &str, v: &[f64], d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::config(path, format!("expected {d} coordinates, got {}", v.len())));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = parse_json(text)?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("(file)", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let d = raw.dimension;
        if d == 0 || d > MAX_DIMENSION {
            return Err(Error::config("dimension", format!("must be in 1..={MAX_DIMENSION}, got {d}")));
        }
        let symbol = build_symbol(&raw.symbol, d, "symbol")?;
        let mut terms = Vec::with_capacity(raw.source.terms.len());
        for (i, t) in raw.source.terms.iter().enumerate() {
            let base = format!("source.terms[{i}]");
            let spatial = build_spectral(&t.spatial, d, &format!("{base}.spatial"))?;
            let temporal = build_temporal(&t.temporal, &format!("{base}.temporal"))?;
            terms.push(SpaceTimeTerm { spatial, temporal });
        }
        let source = at("source", SpaceTimeMeasure::new(d, terms))?;
        let time_homogeneous = raw
            .source
            .time_homogeneous
            .as_ref()
            .map(|m| build_spectral(m, d, "source.time_homogeneous"))
            .transpose()?;
        let initial = raw
            .initial
            .as_ref()
            .map(|m| build_spectral(m, d, "initial"))
            .transpose()?;

        let mut functionals = Vec::with_capacity(raw.functionals.len());
        for (i, f) in raw.functionals.iter().enumerate() {
            let path = format!("functionals[{i}]");
            let id = f.id();
            if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(Error::config(
                    format!("{path}.id"),
                    "ids must be nonempty and use only ASCII letters, digits, '_' or '-'",
                ));
            }
            if functionals.iter().any(|(other, _)| other == id) {
                return Err(Error::config(format!("{path}.id"), format!("duplicate id {id:?}")));
            }
            let tf = match f {
                RawFunctional::GaussianHat { center, width, .. } => {
                    check_vec(&format!("{path}.center"), center, d)?;
                    at(&path, TestFunctional::gaussian_hat(center.clone(), *width))?
                }
                RawFunctional::PointEvaluation { x0, .. } => {
                    check_vec(&format!("{path}.x0"), x0, d)?;
                    at(&path, TestFunctional::point_evaluation(x0.clone()))?
                }
            };
            functionals.push((id.to_string(), tf));
        }

        let time_grid = build_time_grid(&raw.time_grid)?;

        let spatial_grid = match &raw.spatial_grid {
            Some(sg) => {
                if sg.axes.len() != d {
                    return Err(Error::config(
                        "spatial_grid.axes",
                        format!("expected {d} axes, got {}", sg.axes.len()),
                    ));
                }
                let axes = build_axes(&sg.axes, "spatial_grid.axes")?;
                let grid = at("spatial_grid", SpatialGrid::new(axes))?;
                if let Some(k) = sg.times.iter().position(|t| !t.is_finite()) {
                    return Err(Error::config(format!("spatial_grid.times[{k}]"), "must be finite"));
                }
                Some((grid, sg.times.clone()))
            }
            None => None,
        };

        let opts = &raw.options;
        let mode = match opts.mode {
            Some(RawMode::Duhamel) => Mode::Duhamel,
            Some(RawMode::Cauchy) => Mode::Cauchy,
            None if initial.is_some() || time_homogeneous.is_some() => Mode::Cauchy,
            None => Mode::Duhamel,
        };
        let method = match opts.oracle.method {
            RawMethod::ImplicitEuler => StepMethod::ImplicitEuler,
            RawMethod::CrankNicolson => StepMethod::CrankNicolson,
        };
        let t_end = opts.oracle.t_end.unwrap_or(*time_grid.last().expect("nonempty grid"));
        let stepper = at("options.oracle", StepperConfig::new(method, opts.oracle.dt, t_end))?;
        if opts.oracle.n_panels == 0 {
            return Err(Error::config("options.oracle.n_panels", "must be positive"));
        }
        for (i, h) in opts.asymptotics.shifts.iter().enumerate() {
            check_vec(&format!("options.asymptotics.shifts[{i}]"), h, d)?;
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(format!("options.asymptotics.shifts[{i}]"), "must be finite"));
            }
        }
        if !(opts.asymptotics.epsilon > 0.0) {
            return Err(Error::config("options.asymptotics.epsilon", "must be positive"));
        }
        let depth = opts.mollifier.depth;
        if depth == 0 || depth > MAX_MOLLIFIER_DEPTH {
            return Err(Error::config(
                "options.mollifier.depth",
                format!("must be in 1..={MAX_MOLLIFIER_DEPTH}"),
            ));
        }
        if let Some(ts) = &opts.mollifier.times {
            if let Some(k) = ts.iter().position(|t| !t.is_finite()) {
                return Err(Error::config(format!("options.mollifier.times[{k}]"), "must be finite"));
            }
        }
        let v = &opts.verify;
        if v.n_test == 0 || v.n_test > 1024 {
            return Err(Error::config("options.verify.n_test", "must be in 1..=1024"));
        }
        for (name, val) in [
            ("residual_tol", v.residual_tol),
            ("increment_tol", v.increment_tol),
            ("hermitian_tol", v.hermitian_tol),
            ("corrupt_scale", v.corrupt_scale),
        ] {
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::config(format!("options.verify.{name}"), "must be positive and finite"));
            }
        }

        Ok(ExperimentConfig {
            dimension: d,
            symbol,
            source,
            time_homogeneous,
            initial,
            functionals,
            time_grid,
            spatial_grid,
            mode,
            stepper,
            n_panels: opts.oracle.n_panels,
            shifts: opts.asymptotics.shifts.clone(),
            epsilon: opts.asymptotics.epsilon,
            mollifier_depth: depth,
            mollifier_times: opts.mollifier.times.clone(),
            verify: v.clone(),
            raw,
        })
    }

    /// The document with defaults filled in.
    pub fn normalized(&self) -> &RawConfig {
        &self.raw
    }

    pub fn normalized_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.raw).expect("raw config is always serializable")
    }

    /// The evolution problem with the initial measure and homogeneous rate attached.
    pub fn problem(&self) -> Result<EvolutionProblem> {
        let mut p = EvolutionProblem::new(self.symbol.clone(), self.source.clone())?;
        if let Some(v0) = &self.initial {
            p = p.with_initial(v0.clone())?;
        } else if self.mode == Mode::Cauchy {
            p = p.with_initial(SpectralMeasure::empty(self.dimension))?;
        }
        if let Some(l) = &self.time_homogeneous {
            p = p.with_time_homogeneous_source(l.clone())?;
        }
        Ok(p)
    }

    /// The problem as seen by `mode`: Cauchy runs use the source restricted to
    /// `t > 0`, other modes the full source.
    pub fn problem_for(&self, mode: Mode) -> Result<EvolutionProblem> {
        let p = self.problem()?;
        match mode {
            Mode::Cauchy => crate::asymptotics::cauchy_counterpart(&p),
            _ => Ok(p),
        }
    }

    pub fn mollifier_params(&self, side: Side) -> Result<MollifierParams> {
        MollifierParams::dyadic(self.mollifier_depth, side)
    }
}

/// Parses a standalone symbol record.
pub fn parse_symbol(text: &str, dimension: usize) -> Result<Symbol> {
    let raw: RawSymbol = parse_json(text)?;
    build_symbol(&raw, dimension, "")
}

/// Parses a standalone spectral measure record.
pub fn parse_spectral_measure(text: &str, dimension: usize) -> Result<SpectralMeasure> {
    let raw: RawSpectralMeasure = parse_json(text)?;
    build_spectral(&raw, dimension, "")
}

/// Parses a standalone temporal profile record.
pub fn parse_temporal_profile(text: &str) -> Result<TemporalProfile> {
    let raw: RawTemporalProfile = parse_json(text)?;
    build_temporal(&raw, "")
}

fn join(base: &str, rest: &str) -> String {
    if base.is_empty() {
        rest.to_string()
    } else {
        format!("{base}.{rest}")
    }
}

fn build_symbol(raw: &RawSymbol, d: usize, path: &str) -> Result<Symbol> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::config("dimension", format!("must be in 1..={MAX_DIMENSION}, got {d}")));
    }
    match raw {
        RawSymbol::FractionalMatern { alpha, kappa } => at(path, Symbol::fractional_matern(d, *alpha, *kappa)),
        RawSymbol::FractionalLaplacian { alpha } => at(path, Symbol::fractional_laplacian(d, *alpha)),
        RawSymbol::Advection { b } => {
            check_vec(&join(path, "b"), b, d)?;
            at(path, Symbol::advection(b.clone()))
        }
        RawSymbol::Damping { c } => at(path, Symbol::damping(d, *c)),
        RawSymbol::LinearCombination { terms } => {
            let mut built = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let p = join(path, &format!("terms[{i}]"));
                built.push((t.coef, build_symbol(&t.symbol, d, &join(&p, "symbol"))?));
            }
            at(path, Symbol::linear_combination(built))
        }
    }
}

fn build_axes(raw: &[RawAxis], path: &str) -> Result<Vec<GridAxis>> {
    let mut nodes: usize = 1;
    let mut axes = Vec::with_capacity(raw.len());
    for (i, a) in raw.iter().enumerate() {
        let p = format!("{path}[{i}]");
        axes.push(at(&p, GridAxis::new(a.start, a.step, a.count))?);
        nodes = nodes.saturating_mul(a.count);
        if nodes > MAX_GRID_NODES {
            return Err(Error::config(path, format!("grid exceeds {MAX_GRID_NODES} nodes")));
        }
        let last = a.start + (a.count as f64 - 1.0) * a.step;
        if !last.is_finite() {
            return Err(Error::config(p, "grid extent overflows"));
        }
    }
    Ok(axes)
}

fn build_spectral(raw: &RawSpectralMeasure, d: usize, path: &str) -> Result<SpectralMeasure> {
    let mut atoms = Vec::with_capacity(raw.atoms.len());
    for (i, a) in raw.atoms.iter().enumerate() {
        let p = join(path, &format!("atoms[{i}]"));
        check_vec(&join(&p, "xi"), &a.xi, d)?;
        if a.xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(join(&p, "xi"), "must be finite"));
        }
        atoms.push(Atom::new(a.xi.clone(), cx(a.w)));
    }
    let mut grids = Vec::with_capacity(raw.grids.len());
    for (i, g) in raw.grids.iter().enumerate() {
        let p = join(path, &format!("grids[{i}]"));
        if g.axes.len() != d {
            return Err(Error::config(join(&p, "axes"), format!("expected {d} axes, got {}", g.axes.len())));
        }
        let axes = build_axes(&g.axes, &join(&p, "axes"))?;
        let lattice = at(&p, Lattice::new(axes))?;
        let density = match (&g.values, &g.gaussian) {
            (Some(vals), None) => {
                let values = vals.iter().map(|v| cx(*v)).collect();
                at(&join(&p, "values"), GridDensity::new(lattice, values))?
            }
            (None, Some(gs)) => {
                let gp = join(&p, "gaussian");
                check_vec(&join(&gp, "center"), &gs.center, d)?;
                if !(gs.width > 0.0) || !gs.width.is_finite() {
                    return Err(Error::config(join(&gp, "width"), "must be positive and finite"));
                }
                let amp = cx(gs.amplitude);
                let two_w2 = 2.0 * gs.width * gs.width;
                at(
                    &gp,
                    GridDensity::from_fn(lattice, |xi| {
                        let r2: f64 = xi.iter().zip(&gs.center).map(|(a, b)| (a - b) * (a - b)).sum();
                        amp * (-r2 / two_w2).exp()
                    }),
                )?
            }
            _ => {
                return Err(Error::config(p, "a grid needs exactly one of `values` or `gaussian`"));
            }
        };
        grids.push(density);
    }
    let m = at(path, SpectralMeasure::new(d, atoms, grids))?;
    Ok(if raw.hermitian_symmetrize {
        m.hermitian_symmetrize()
    } else {
        m
    })
}

fn build_temporal(raw: &RawTemporalProfile, path: &str) -> Result<TemporalProfile> {
    let mut atoms = Vec::with_capacity(raw.atoms.len());
    for (i, a) in raw.atoms.iter().enumerate() {
        if !a.t.is_finite() {
            return Err(Error::config(join(path, &format!("atoms[{i}].t")), "must be finite"));
        }
        atoms.push(TemporalAtom { t: a.t, mass: cx(a.mass) });
    }
    let mut segments = Vec::with_capacity(raw.segments.len());
    for (i, s) in raw.segments.iter().enumerate() {
        segments.push(at(
            &join(path, &format!("segments[{i}]")),
            Segment::new(s.from, s.to, cx(s.rate)),
        )?);
    }
    at(path, TemporalProfile::new(atoms, segments))
}

fn build_time_grid(raw: &RawTimeGrid) -> Result<Vec<f64>> {
    if raw.count == 0 || raw.count > MAX_TIME_SAMPLES {
        return Err(Error::config("time_grid.count", format!("must be in 1..={MAX_TIME_SAMPLES}")));
    }
    if !raw.from.is_finite() || !raw.to.is_finite() || raw.to < raw.from {
        return Err(Error::config("time_grid", "needs finite from <= to"));
    }
    if raw.count == 1 {
        return Ok(vec![raw.from]);
    }
    let n = (raw.count - 1) as f64;
    let mut out: Vec<f64> = (0..raw.count)
        .map(|k| raw.from + (raw.to - raw.from) * (k as f64 / n))
        .collect();
    *out.last_mut().expect("count >= 2") = raw.to;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dimension": 1,
        "symbol": {"kind": "damping", "c": 1.0},
        "source": {"terms": [{
            "spatial": {"atoms": [{"xi": [0.5], "w": [1, 0]}]},
            "temporal": {"atoms": [{"t": 0.5, "mass": [2, 0]}], "segments": [{"from": 0, "to": 1, "rate": [1, 0]}]}
        }]},
        "functionals": [{"id": "g0", "kind": "gaussian_hat", "center": [0.5], "width": 1.0}],
        "time_grid": {"from": 0, "to": 2, "count": 5}
    }"#;

    #[test]
    fn parses_minimal() {
        let cfg = ExperimentConfig::from_json_str(MINIMAL).unwrap();
        assert_eq!(cfg.dimension, 1);
        assert_eq!(cfg.time_grid, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(cfg.mode, Mode::Duhamel);
        assert_eq!(cfg.functionals.len(), 1);
        assert_eq!(cfg.stepper.t_end, 2.0);
        cfg.problem().unwrap();
    }

    #[test]
    fn normalized_round_trip() {
        let cfg = ExperimentConfig::from_json_str(MINIMAL).unwrap();
        let text = serde_json::to_string(&cfg.normalized_json()).unwrap();
        let again = ExperimentConfig::from_json_str(&text).unwrap();
        assert_eq!(again.normalized(), cfg.normalized());
    }

    fn err_path(text: &str) -> String {
        match ExperimentConfig::from_json_str(text).unwrap_err() {
            Error::Config { path, .. } => path,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn errors_name_paths() {
        let bad_seg = MINIMAL.replace(r#""from": 0, "to": 1"#, r#""from": 1, "to": 0"#);
        assert_eq!(err_path(&bad_seg), "source.terms[0].temporal.segments[0]");
        let bad_dim = MINIMAL.replace(r#""xi": [0.5]"#, r#""xi": [0.5, 1.0]"#);
        assert_eq!(err_path(&bad_dim), "source.terms[0].spatial.atoms[0].xi");
        let unknown = MINIMAL.replace(r#""width": 1.0"#, r#""width": 1.0, "colour": 3"#);
        assert!(err_path(&unknown).starts_with("functionals[0]"));
        let wrong_type = MINIMAL.replace(r#""count": 5"#, r#""count": "five""#);
        assert_eq!(err_path(&wrong_type), "time_grid.count");
        let bad_sym = MINIMAL.replace(r#""c": 1.0"#, r#""c": -1.0"#);
        assert_eq!(err_path(&bad_sym), "symbol");
    }

    #[test]
    fn grid_generators() {
        let m = parse_spectral_measure(
            r#"{"grids": [{"axes": [{"start": -2, "step": 0.5, "count": 8}], "gaussian": {"center": [0], "width": 1}}]}"#,
            1,
        )
        .unwrap();
        assert_eq!(m.grids()[0].values().len(), 8);
        assert!(parse_spectral_measure(r#"{"grids": [{"axes": [{"start": 0, "step": 1, "count": 2}]}]}"#, 1).is_err());
        let huge = r#"{"grids": [{"axes": [{"start": 0, "step": 1, "count": 100000}, {"start": 0, "step": 1, "count": 100000}], "gaussian": {"center": [0, 0], "width": 1}}]}"#;
        assert!(parse_spectral_measure(huge, 2).is_err());
    }

    #[test]
    fn nested_symbols() {
        let s = parse_symbol(
            r#"{"kind": "linear_combination", "terms": [
                {"coef": 1.0, "symbol": {"kind": "fractional_laplacian", "alpha": 2}},
                {"coef": -1.0, "symbol": {"kind": "advection", "b": [1.0]}}]}"#,
            1,
        )
        .unwrap();
        assert_eq!(s.dimension(), 1);
        let err = parse_symbol(
            r#"{"kind": "linear_combination", "terms": [{"coef": -1.0, "symbol": {"kind": "damping", "c": 1}}]}"#,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn temporal_records() {
        let p = parse_temporal_profile(r#"{"atoms": [{"t": 1, "mass": [1, 0]}, {"t": 1, "mass": [2, 0]}]}"#).unwrap();
        assert_eq!(p.atoms().len(), 1);
        assert!(parse_temporal_profile(r#"{"atoms": [{"t": 1}]}"#).is_err());
    }
}
