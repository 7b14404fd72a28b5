use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::measure::functional::TestFunctional;

/// Locations closer than this in every coordinate are the same atom.
pub const MERGE_TOL: f64 = 1e-12;

/// Largest grid dimension supported for densities and spatial grids.
pub const MAX_GRID_DIM: usize = 3;

/// A point mass `w δ_ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub xi: Vec<f64>,
    pub w: Complex64,
}

impl Atom {
    pub fn new(xi: Vec<f64>, w: Complex64) -> Self {
        Atom { xi, w }
    }
}

/// One uniformly spaced axis: nodes `start + k·step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !step.is_finite() || step <= 0.0 || count == 0 {
            return Err(Error::Argument(format!(
                "grid axis needs finite start, step > 0 and count >= 1 (start = {start}, step = {step}, count = {count})"
            )));
        }
        Ok(GridAxis { start, step, count })
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Index of the node at `x`, if `x` lies on the axis.
    fn locate(&self, x: f64) -> Option<usize> {
        let pos = (x - self.start) / self.step;
        let k = pos.round();
        if k < 0.0 || k >= self.count as f64 {
            return None;
        }
        if (pos - k).abs() <= 1e-9 {
            Some(k as usize)
        } else {
            None
        }
    }

    fn mirrored(&self) -> GridAxis {
        GridAxis {
            start: -self.node(self.count - 1),
            step: self.step,
            count: self.count,
        }
    }
}

/// Rectangular grid geometry; row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    axes: Vec<GridAxis>,
}

impl Lattice {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_GRID_DIM {
            return Err(Error::Argument(format!(
                "grids support 1 to {MAX_GRID_DIM} axes, got {}",
                axes.len()
            )));
        }
        Ok(Lattice { axes })
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step).product()
    }

    /// Writes the coordinates of node `idx` into `out`.
    pub fn node_into(&self, mut idx: usize, out: &mut [f64]) {
        for (axis, slot) in self.axes.iter().zip(out.iter_mut()).rev() {
            *slot = axis.node(idx % axis.count);
            idx /= axis.count;
        }
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        self.node_into(idx, &mut out);
        out
    }

    /// Flat index of the node at `x`, if any.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for (axis, &coord) in self.axes.iter().zip(x) {
            idx = idx * axis.count + axis.locate(coord)?;
        }
        Some(idx)
    }

    fn mirrored(&self) -> Lattice {
        Lattice {
            axes: self.axes.iter().map(GridAxis::mirrored).collect(),
        }
    }
}

/// Complex density on a lattice, acting as `Σ ρ(node)·cellvolume·δ_node`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl GridDensity {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Argument(format!(
                "grid density has {} values for {} nodes",
                values.len(),
                lattice.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Argument("grid density values must be finite".into()));
        }
        Ok(GridDensity { lattice, values })
    }

    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(lattice: Lattice, mut f: F) -> Result<Self> {
        let mut buf = vec![0.0; lattice.dimension()];
        let values = (0..lattice.len())
            .map(|i| {
                lattice.node_into(i, &mut buf);
                f(&buf)
            })
            .collect();
        GridDensity::new(lattice, values)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn cell_volume(&self) -> f64 {
        self.lattice.cell_volume()
    }

    /// Visits every node with its density value.
    pub fn for_each_node<F: FnMut(&[f64], Complex64)>(&self, mut f: F) {
        let mut buf = vec![0.0; self.lattice.dimension()];
        for (i, &v) in self.values.iter().enumerate() {
            self.lattice.node_into(i, &mut buf);
            f(&buf, v);
        }
    }

    fn map_values<F: FnMut(&[f64], Complex64) -> Complex64>(&self, mut f: F) -> GridDensity {
        let mut buf = vec![0.0; self.lattice.dimension()];
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                self.lattice.node_into(i, &mut buf);
                f(&buf, v)
            })
            .collect();
        GridDensity {
            lattice: self.lattice.clone(),
            values,
        }
    }

    fn conj_reflect(&self) -> GridDensity {
        GridDensity {
            lattice: self.lattice.mirrored(),
            values: self.values.iter().rev().map(|v| v.conj()).collect(),
        }
    }
}

/// Discrete slow-growing complex measure on frequency space: finitely many
/// atoms plus zero or more lattice densities.
///
/// Atoms are kept sorted lexicographically by location and merged when their
/// locations agree within [`MERGE_TOL`] per coordinate. Densities with equal
/// geometry are summed into one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    dimension: usize,
    atoms: Vec<Atom>,
    grids: Vec<GridDensity>,
}

impl SpectralMeasure {
    pub fn empty(dimension: usize) -> Self {
        SpectralMeasure {
            dimension,
            atoms: Vec::new(),
            grids: Vec::new(),
        }
    }

    pub fn new(dimension: usize, atoms: Vec<Atom>, grids: Vec<GridDensity>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        for a in &atoms {
            check_dim(dimension, a.xi.len())?;
            if a.xi.iter().any(|v| !v.is_finite()) || !a.w.re.is_finite() || !a.w.im.is_finite() {
                return Err(Error::Argument("atom location and weight must be finite".into()));
            }
        }
        for g in &grids {
            check_dim(dimension, g.lattice.dimension())?;
        }
        Ok(SpectralMeasure {
            dimension,
            atoms: merge_atoms(atoms),
            grids: merge_grids(grids),
        })
    }

    pub fn from_atoms(dimension: usize, atoms: Vec<Atom>) -> Result<Self> {
        SpectralMeasure::new(dimension, atoms, Vec::new())
    }

    pub fn from_grid(density: GridDensity) -> Self {
        SpectralMeasure {
            dimension: density.lattice.dimension(),
            atoms: Vec::new(),
            grids: vec![density],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn grids(&self) -> &[GridDensity] {
        &self.grids
    }

    /// True when there are no atoms and no densities.
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.grids.is_empty()
    }

    pub fn weight_at(&self, xi: &[f64]) -> Option<Complex64> {
        self.atoms
            .iter()
            .find(|a| same_location(&a.xi, xi))
            .map(|a| a.w)
    }

    /// Every support point: atom locations followed by density nodes.
    pub fn support_points(&self) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = self.atoms.iter().map(|a| a.xi.clone()).collect();
        for g in &self.grids {
            pts.extend((0..g.lattice.len()).map(|i| g.lattice.node(i)));
        }
        pts
    }

    /// Replaces every atom weight and density value by `f(ξ, w)`.
    pub fn map_weights<F: FnMut(&[f64], Complex64) -> Complex64>(&self, mut f: F) -> SpectralMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                xi: a.xi.clone(),
                w: f(&a.xi, a.w),
            })
            .collect();
        let grids = self.grids.iter().map(|g| g.map_values(&mut f)).collect();
        SpectralMeasure {
            dimension: self.dimension,
            atoms,
            grids,
        }
    }

    pub fn try_map_weights<F>(&self, mut f: F) -> Result<SpectralMeasure>
    where
        F: FnMut(&[f64], Complex64) -> Result<Complex64>,
    {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            atoms.push(Atom {
                xi: a.xi.clone(),
                w: f(&a.xi, a.w)?,
            });
        }
        let mut grids = Vec::with_capacity(self.grids.len());
        let mut buf = vec![0.0; self.dimension];
        for g in &self.grids {
            let mut values = Vec::with_capacity(g.values.len());
            for (i, &v) in g.values.iter().enumerate() {
                g.lattice.node_into(i, &mut buf);
                values.push(f(&buf, v)?);
            }
            grids.push(GridDensity {
                lattice: g.lattice.clone(),
                values,
            });
        }
        Ok(SpectralMeasure {
            dimension: self.dimension,
            atoms,
            grids,
        })
    }

    pub fn scale(&self, a: Complex64) -> SpectralMeasure {
        self.map_weights(|_, w| a * w)
    }

    pub fn add(&self, other: &SpectralMeasure) -> Result<SpectralMeasure> {
        check_dim(self.dimension, other.dimension)?;
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut grids = self.grids.clone();
        grids.extend(other.grids.iter().cloned());
        Ok(SpectralMeasure {
            dimension: self.dimension,
            atoms: merge_atoms(atoms),
            grids: merge_grids(grids),
        })
    }

    pub fn sub(&self, other: &SpectralMeasure) -> Result<SpectralMeasure> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `Σ|w| + Σ|ρ|·cellvolume`.
    pub fn total_variation(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.w.norm()).sum();
        let dens: f64 = self
            .grids
            .iter()
            .map(|g| g.values.iter().map(|v| v.norm()).sum::<f64>() * g.cell_volume())
            .sum();
        atoms + dens
    }

    /// `∫ φ̂ dm`.
    pub fn pair(&self, f: &TestFunctional) -> Result<Complex64> {
        check_dim(self.dimension, f.dimension())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += f.hat(&a.xi) * a.w;
        }
        for g in &self.grids {
            let mut part = Complex64::new(0.0, 0.0);
            g.for_each_node(|xi, v| part += f.hat(xi) * v);
            acc += part * g.cell_volume();
        }
        Ok(acc)
    }

    /// `(⟨m, φ⟩, ⟨h·m, φ⟩)` in one pass over the nodes.
    pub fn pair_pair<H: FnMut(&[f64]) -> Complex64>(
        &self,
        f: &TestFunctional,
        mut h: H,
    ) -> Result<(Complex64, Complex64)> {
        check_dim(self.dimension, f.dimension())?;
        let mut plain = Complex64::new(0.0, 0.0);
        let mut weighted = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let p = f.hat(&a.xi) * a.w;
            plain += p;
            weighted += p * h(&a.xi);
        }
        for g in &self.grids {
            let mut part = Complex64::new(0.0, 0.0);
            let mut wpart = Complex64::new(0.0, 0.0);
            g.for_each_node(|xi, v| {
                let p = f.hat(xi) * v;
                part += p;
                wpart += p * h(xi);
            });
            plain += part * g.cell_volume();
            weighted += wpart * g.cell_volume();
        }
        Ok((plain, weighted))
    }

    /// `∫ (1+|ξ|²)^{-n} d|m|`.
    pub fn weighted_variation(&self, n: u32) -> f64 {
        let weight = |xi: &[f64]| (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).powi(-(n as i32));
        let atoms: f64 = self.atoms.iter().map(|a| a.w.norm() * weight(&a.xi)).sum();
        let mut dens = 0.0;
        for g in &self.grids {
            let mut part = 0.0;
            g.for_each_node(|xi, v| part += v.norm() * weight(xi));
            dens += part * g.cell_volume();
        }
        atoms + dens
    }

    /// The measure `A ↦ conj(m(-A))`.
    pub fn conj_reflect(&self) -> SpectralMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                xi: a.xi.iter().map(|v| -v).collect(),
                w: a.w.conj(),
            })
            .collect();
        SpectralMeasure {
            dimension: self.dimension,
            atoms: merge_atoms(atoms),
            grids: merge_grids(self.grids.iter().map(GridDensity::conj_reflect).collect()),
        }
    }

    /// Total point mass at `xi`: the atom weight plus `ρ·cellvolume` of every
    /// density with a node there.
    pub fn mass_at(&self, xi: &[f64]) -> Complex64 {
        let mut acc = self.weight_at(xi).unwrap_or_default();
        for g in &self.grids {
            if let Some(i) = g.lattice.locate(xi) {
                acc += g.values[i] * g.cell_volume();
            }
        }
        acc
    }

    /// Every point mass `M(ξ)` has its conjugate at `-ξ`: `M(-ξ) = conj(M(ξ))`
    /// within `tol`. For a single density this reduces to `ρ(-ξ) = conj(ρ(ξ))`
    /// wherever both nodes exist, with unmatched nodes needing an atom mirror.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let mut neg = vec![0.0; self.dimension];
        let mut check = |xi: &[f64], scale: f64| {
            for (n, v) in neg.iter_mut().zip(xi) {
                *n = -v;
            }
            (self.mass_at(&neg) - self.mass_at(xi).conj()).norm() <= tol * scale
        };
        for a in &self.atoms {
            if !check(&a.xi, 1.0) {
                return false;
            }
        }
        let mut buf = vec![0.0; self.dimension];
        for g in &self.grids {
            // Compare densities rather than masses so `tol` keeps its density units.
            let vol = g.cell_volume();
            for i in 0..g.values.len() {
                g.lattice.node_into(i, &mut buf);
                if !check(&buf, vol) {
                    return false;
                }
            }
        }
        true
    }

    /// `(m + conj_reflect(m)) / 2`.
    ///
    /// Density nodes whose mirror lies off the lattice keep half their value and
    /// emit the reflected half as an atom, so the result is exactly the
    /// symmetrized measure.
    pub fn hermitian_symmetrize(&self) -> SpectralMeasure {
        let half = 0.5;
        let mut atoms: Vec<Atom> = Vec::with_capacity(2 * self.atoms.len());
        for a in &self.atoms {
            atoms.push(Atom {
                xi: a.xi.clone(),
                w: a.w * half,
            });
            atoms.push(Atom {
                xi: a.xi.iter().map(|v| -v).collect(),
                w: a.w.conj() * half,
            });
        }
        let mut grids = Vec::with_capacity(self.grids.len());
        let mut buf = vec![0.0; self.dimension];
        for g in &self.grids {
            let vol = g.cell_volume();
            let mut values = Vec::with_capacity(g.values.len());
            for (i, &v) in g.values.iter().enumerate() {
                g.lattice.node_into(i, &mut buf);
                for x in buf.iter_mut() {
                    *x = -*x;
                }
                match g.lattice.locate(&buf) {
                    Some(j) => values.push((v + g.values[j].conj()) * half),
                    None => {
                        values.push(v * half);
                        atoms.push(Atom {
                            xi: buf.clone(),
                            w: v.conj() * (half * vol),
                        });
                    }
                }
            }
            grids.push(GridDensity {
                lattice: g.lattice.clone(),
                values,
            });
        }
        SpectralMeasure {
            dimension: self.dimension,
            atoms: merge_atoms(atoms),
            grids: merge_grids(grids),
        }
    }
}

pub(crate) fn same_location(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= MERGE_TOL)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| lex_cmp(&a.xi, &b.xi));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        // Candidates share the first coordinate within tolerance; scan back over them.
        let mut hit = None;
        for (k, m) in merged.iter().enumerate().rev() {
            if atom.xi[0] - m.xi[0] > MERGE_TOL {
                break;
            }
            if same_location(&m.xi, &atom.xi) {
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => merged[k].w += atom.w,
            None => merged.push(atom),
        }
    }
    merged
}

fn merge_grids(grids: Vec<GridDensity>) -> Vec<GridDensity> {
    let mut merged: Vec<GridDensity> = Vec::with_capacity(grids.len());
    for g in grids {
        match merged.iter_mut().find(|m| m.lattice == g.lattice) {
            Some(m) => {
                for (a, b) in m.values.iter_mut().zip(&g.values) {
                    *a += b;
                }
            }
            None => merged.push(g),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atoms1(list: &[(f64, Complex64)]) -> SpectralMeasure {
        SpectralMeasure::from_atoms(1, list.iter().map(|&(x, w)| Atom::new(vec![x], w)).collect()).unwrap()
    }

    #[test]
    fn duplicate_atoms_merge() {
        let m = atoms1(&[(1.0, c(1.0, 0.0)), (1.0 + 1e-13, c(2.0, 1.0)), (-1.0, c(1.0, 0.0))]);
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.weight_at(&[1.0]), Some(c(3.0, 1.0)));
    }

    #[test]
    fn merge_in_two_dimensions() {
        let m = SpectralMeasure::from_atoms(
            2,
            vec![
                Atom::new(vec![0.0, 1.0], c(1.0, 0.0)),
                Atom::new(vec![0.0, 2.0], c(1.0, 0.0)),
                Atom::new(vec![5e-13, 1.0], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.weight_at(&[0.0, 1.0]), Some(c(2.0, 0.0)));
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(atoms1(&[(1.0, c(3.0, -4.0))]).total_variation(), 5.0);
        assert_eq!(SpectralMeasure::empty(1).total_variation(), 0.0);
    }

    #[test]
    fn symmetrize_examples() {
        let m = atoms1(&[(1.0, c(1.0, 0.0))]).hermitian_symmetrize();
        assert_eq!(m.weight_at(&[1.0]), Some(c(0.5, 0.0)));
        assert_eq!(m.weight_at(&[-1.0]), Some(c(0.5, 0.0)));

        let zero = atoms1(&[(0.0, c(0.0, 2.0))]).hermitian_symmetrize();
        assert_eq!(zero.atoms().len(), 1);
        assert_eq!(zero.atoms()[0].w, c(0.0, 0.0));

        let herm = atoms1(&[(2.0, c(1.0, 3.0)), (-2.0, c(1.0, -3.0))]);
        assert_eq!(herm.hermitian_symmetrize(), herm);
    }

    #[test]
    fn symmetrize_asymmetric_grid() {
        let lat = Lattice::new(vec![GridAxis::new(-2.0, 0.5, 8).unwrap()]).unwrap();
        let g = GridDensity::from_fn(lat, |xi| c(xi[0], xi[0] * xi[0])).unwrap();
        let m = SpectralMeasure::from_grid(g);
        let s = m.hermitian_symmetrize();
        assert!(s.is_hermitian(1e-15));
        // Node -2 has no mirror on the lattice; its reflected half becomes an atom at +2.
        assert_eq!(s.atoms().len(), 1);
        assert_eq!(s.atoms()[0].xi, vec![2.0]);
        assert!((s.total_variation() - m.total_variation()).abs() <= m.total_variation());
    }

    #[test]
    fn lattice_indexing_round_trips() {
        let lat = Lattice::new(vec![
            GridAxis::new(-1.0, 0.5, 3).unwrap(),
            GridAxis::new(0.0, 1.0, 4).unwrap(),
        ])
        .unwrap();
        for i in 0..lat.len() {
            assert_eq!(lat.locate(&lat.node(i)), Some(i));
        }
        assert_eq!(lat.node(5), vec![-0.5, 1.0]);
        assert_eq!(lat.locate(&[0.25, 1.0]), None);
    }

    #[test]
    fn conj_reflect_of_grid_is_exact() {
        let lat = Lattice::new(vec![GridAxis::new(-1.0, 0.5, 4).unwrap()]).unwrap();
        let g = GridDensity::from_fn(lat, |xi| c(1.0 + xi[0], xi[0])).unwrap();
        let r = SpectralMeasure::from_grid(g).conj_reflect();
        let rg = &r.grids()[0];
        assert_eq!(rg.lattice().axes()[0].start, -0.5);
        // Value at +0.5 equals conj of original value at -0.5.
        let idx = rg.lattice().locate(&[0.5]).unwrap();
        assert_eq!(rg.values()[idx], c(0.5, 0.5));
    }
}
