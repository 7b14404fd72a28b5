//! Physical-space fields from spectral measures, and the discrete forward
//! transform, under the symmetric convention
//! `F(f)(ξ) = (2π)^{-d/2} ∫ f(x) e^{-i xᵀξ} dx`,
//! `F^{-1}(m)(x) = (2π)^{-d/2} ∫ e^{i xᵀξ} dm(ξ)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{check_dim, Error, Result};
use crate::format::fmt_f64;
use crate::measure::{GridAxis, GridDensity, Lattice, SpectralMeasure};

/// Default cap on the number of nodes of a spatial grid.
pub const DEFAULT_NODE_CAP: usize = 1 << 24;

/// Uniform rectangular grid in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    lattice: Lattice,
}

impl SpatialGrid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        Self::with_cap(axes, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(axes: Vec<GridAxis>, cap: usize) -> Result<Self> {
        let lattice = Lattice::new(axes)?;
        let nodes = lattice
            .axes()
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
            .unwrap_or(usize::MAX);
        if nodes > cap {
            return Err(Error::GridCap { nodes, cap });
        }
        Ok(SpatialGrid { lattice })
    }

    /// `count` nodes on `[from, from + count·step)`.
    pub fn uniform_1d(from: f64, step: f64, count: usize) -> Result<Self> {
        Self::new(vec![GridAxis::new(from, step, count)?])
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dimension(&self) -> usize {
        self.lattice.dimension()
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.lattice.node(idx)
    }
}

/// Field values on a spatial grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
    pub time_tag: f64,
}

impl FieldSample {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>, time_tag: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Argument(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(FieldSample { grid, values, time_tag })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// `# time_tag=<t>` line, a header `x1,..,xd,re,im`, then one row per node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# time_tag={}", fmt_f64(self.time_tag))?;
        let d = self.grid.dimension();
        let header: Vec<String> = (1..=d).map(|k| format!("x{k}")).chain(["re".into(), "im".into()]).collect();
        writeln!(w, "{}", header.join(","))?;
        let mut x = vec![0.0; d];
        for (i, v) in self.values.iter().enumerate() {
            self.grid.lattice.node_into(i, &mut x);
            for xk in &x {
                write!(w, "{},", fmt_f64(*xk))?;
            }
            writeln!(w, "{},{}", fmt_f64(v.re), fmt_f64(v.im))?;
        }
        Ok(())
    }
}

fn fourier_norm(d: usize) -> f64 {
    (2.0 * PI).powf(-(d as f64) / 2.0)
}

/// Direct synthesis `(2π)^{-d/2}[Σ w e^{ixᵀξ} + Σ ρ e^{ixᵀξ}·cellvolume]` at every node.
pub fn synthesize_field(m: &SpectralMeasure, grid: &SpatialGrid, time_tag: f64) -> Result<FieldSample> {
    check_dim(m.dimension(), grid.dimension())?;
    let norm = fourier_norm(m.dimension());
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.node(i);
            synthesize_at(m, &x) * norm
        })
        .collect();
    FieldSample::new(grid.clone(), values, time_tag)
}

/// Unnormalized synthesis sum at one point, in fixed atom-then-density order.
fn synthesize_at(m: &SpectralMeasure, x: &[f64]) -> Complex64 {
    let phase = |xi: &[f64]| -> f64 { xi.iter().zip(x).map(|(a, b)| a * b).sum() };
    let mut acc = Complex64::new(0.0, 0.0);
    for a in m.atoms() {
        acc += a.w * Complex64::from_polar(1.0, phase(&a.xi));
    }
    for g in m.grids() {
        let mut part = Complex64::new(0.0, 0.0);
        g.for_each_node(|xi, v| part += v * Complex64::from_polar(1.0, phase(xi)));
        acc += part * g.cell_volume();
    }
    acc
}

/// Discrete forward transform: `ρ(ξ_k) = (2π)^{-d/2}·cellvolume·Σ_j f(x_j) e^{-i x_jᵀξ_k}`
/// on the frequency nodes `ξ_k = 2πk/(N h)`, `k = -⌊N/2⌋ .. N - 1 - ⌊N/2⌋`, in ascending order.
pub fn forward_grid_transform(field: &FieldSample) -> Result<SpectralMeasure> {
    let axes = field.grid.lattice.axes().to_vec();
    let shape: Vec<usize> = axes.iter().map(|a| a.count).collect();
    let mut data = field.values.clone();
    let mut planner = FftPlanner::<f64>::new();
    for axis in 0..shape.len() {
        fft_along(&mut data, &shape, axis, &mut planner);
    }

    let freq_axes: Vec<GridAxis> = axes
        .iter()
        .map(|a| {
            let n = a.count as f64;
            let step = 2.0 * PI / (n * a.step);
            let k_min = -((a.count / 2) as f64);
            GridAxis::new(k_min * step, step, a.count)
        })
        .collect::<Result<_>>()?;
    let freq = Lattice::new(freq_axes)?;
    let scale = fourier_norm(axes.len()) * field.grid.lattice.cell_volume();

    let d = axes.len();
    let mut values = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut xi = vec![0.0; d];
    for (out_idx, slot) in values.iter_mut().enumerate() {
        // Map the ascending-k index back to the DFT bin index per axis.
        let mut rem = out_idx;
        let mut bins = [0usize; 3];
        for k in (0..d).rev() {
            let n = shape[k];
            let pos = rem % n;
            rem /= n;
            let kk = pos as i64 - (n / 2) as i64;
            bins[k] = kk.rem_euclid(n as i64) as usize;
        }
        let mut flat = 0;
        for k in 0..d {
            flat = flat * shape[k] + bins[k];
        }
        freq.node_into(out_idx, &mut xi);
        let shift: f64 = axes.iter().zip(&xi).map(|(a, w)| a.start * w).sum();
        *slot = data[flat] * Complex64::from_polar(scale, -shift);
    }
    Ok(SpectralMeasure::from_grid(GridDensity::new(freq, values)?))
}

fn fft_along(data: &mut [Complex64], shape: &[usize], axis: usize, planner: &mut FftPlanner<f64>) {
    let n = shape[axis];
    if n == 1 {
        return;
    }
    let fft = planner.plan_fft_forward(n);
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[base + k * stride];
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    #[test]
    fn cosine_and_constant_synthesis() {
        let grid = SpatialGrid::uniform_1d(0.0, 1.0, 1).unwrap();
        let m = SpectralMeasure::from_atoms(
            1,
            vec![
                Atom::new(vec![1.0], Complex64::new(0.5, 0.0)),
                Atom::new(vec![-1.0], Complex64::new(0.5, 0.0)),
            ],
        )
        .unwrap();
        let f = synthesize_field(&m, &grid, 0.0).unwrap();
        assert!((f.values[0].re - 0.398_942_280_401_432_7).abs() < 1e-15);

        let m = SpectralMeasure::from_atoms(2, vec![Atom::new(vec![0.0, 0.0], Complex64::new(1.0, 0.0))]).unwrap();
        let grid = SpatialGrid::new(vec![GridAxis::new(-1.0, 0.7, 3).unwrap(), GridAxis::new(2.0, 0.1, 2).unwrap()])
            .unwrap();
        let f = synthesize_field(&m, &grid, 0.0).unwrap();
        for v in f.values {
            assert!((v - Complex64::new(1.0 / (2.0 * PI), 0.0)).norm() < 1e-16);
        }
    }

    #[test]
    fn grid_cap_is_enforced() {
        let axis = GridAxis::new(0.0, 1.0, 1000).unwrap();
        assert!(matches!(
            SpatialGrid::with_cap(vec![axis, axis], 10_000),
            Err(Error::GridCap { nodes: 1_000_000, cap: 10_000 })
        ));
    }

    #[test]
    fn constant_field_concentrates_at_zero() {
        let l = 4.0;
        let n = 64;
        let grid = SpatialGrid::uniform_1d(-l, 2.0 * l / n as f64, n).unwrap();
        let field = FieldSample::new(grid, vec![Complex64::new(1.0, 0.0); n], 0.0).unwrap();
        let m = forward_grid_transform(&field).unwrap();
        let g = &m.grids()[0];
        let zero = g.lattice().locate(&[0.0]).unwrap();
        let expected = (2.0 * PI).powf(-0.5) * 2.0 * l;
        assert!((g.values()[zero].re - expected).abs() < 1e-12 * expected);
        let others: f64 = g.values().iter().enumerate().filter(|(i, _)| *i != zero).map(|(_, v)| v.norm()).sum();
        assert!(others < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let grid = SpatialGrid::uniform_1d(0.0, 0.5, 2).unwrap();
        let field = FieldSample::new(grid, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)], 0.25).unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# time_tag=2.5000000000000000e-1");
        assert_eq!(lines[1], "x1,re,im");
        assert_eq!(lines.len(), 4);
    }
}
