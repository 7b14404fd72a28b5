//! Symbol functions `g(ξ)` of the pseudo-differential operators `L_g`.
//!
//! Every built-in kind is Hermitian (`g(-ξ) = conj(g(ξ))`) and parabolic
//! (`Re g ≥ 0`). The operator acts on spectral data by pointwise
//! multiplication, see [`Symbol::apply`].

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::measure::SpectralMeasure;

/// The closed family of symbol kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `(κ² + |ξ|²)^{α/2}`.
    FractionalMatern { alpha: f64, kappa: f64 },
    /// `|ξ|^α`, `α ≥ 0`.
    FractionalLaplacian { alpha: f64 },
    /// `i bᵀξ`.
    Advection { b: Vec<f64> },
    /// Constant `c ≥ 0`.
    Damping { c: f64 },
    /// `Σ coef_k g_k` with real coefficients.
    LinearCombination(Vec<(f64, Symbol)>),
}

/// A validated symbol together with its analytic lower bound on `Re g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    dimension: usize,
    kind: SymbolKind,
    declared_kappa: f64,
}

impl Symbol {
    pub fn fractional_matern(dimension: usize, alpha: f64, kappa: f64) -> Result<Self> {
        check_positive_dim(dimension)?;
        if !alpha.is_finite() || !kappa.is_finite() || kappa < 0.0 {
            return Err(Error::Argument(format!(
                "fractional_matern needs finite alpha and kappa >= 0 (alpha = {alpha}, kappa = {kappa})"
            )));
        }
        if alpha < 0.0 && kappa == 0.0 {
            return Err(Error::Argument(
                "fractional_matern with negative alpha requires kappa > 0".into(),
            ));
        }
        // Re g attains its minimum at ξ = 0 for α ≥ 0 and tends to 0 at infinity for α < 0.
        let declared_kappa = if alpha >= 0.0 {
            kappa.powf(alpha)
        } else {
            0.0
        };
        Ok(Symbol {
            dimension,
            kind: SymbolKind::FractionalMatern { alpha, kappa },
            declared_kappa,
        })
    }

    pub fn fractional_laplacian(dimension: usize, alpha: f64) -> Result<Self> {
        check_positive_dim(dimension)?;
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Argument(format!(
                "fractional_laplacian needs alpha >= 0, got {alpha}"
            )));
        }
        let declared_kappa = if alpha == 0.0 { 1.0 } else { 0.0 };
        Ok(Symbol {
            dimension,
            kind: SymbolKind::FractionalLaplacian { alpha },
            declared_kappa,
        })
    }

    pub fn advection(b: Vec<f64>) -> Result<Self> {
        check_positive_dim(b.len())?;
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("advection velocity must be finite".into()));
        }
        Ok(Symbol {
            dimension: b.len(),
            kind: SymbolKind::Advection { b },
            declared_kappa: 0.0,
        })
    }

    pub fn damping(dimension: usize, c: f64) -> Result<Self> {
        check_positive_dim(dimension)?;
        if !c.is_finite() || c < 0.0 {
            return Err(Error::Argument(format!("damping needs c >= 0, got {c}")));
        }
        Ok(Symbol {
            dimension,
            kind: SymbolKind::Damping { c },
            declared_kappa: c,
        })
    }

    /// Real-coefficient combination. Negative coefficients are accepted only on
    /// purely imaginary constituents, which keeps the sum parabolic.
    pub fn linear_combination(terms: Vec<(f64, Symbol)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Argument("linear combination needs at least one term".into()));
        };
        let dimension = first.dimension;
        let mut declared_kappa = 0.0;
        for (coef, sym) in &terms {
            check_dim(dimension, sym.dimension)?;
            if !coef.is_finite() {
                return Err(Error::Argument("linear combination coefficient must be finite".into()));
            }
            if *coef < 0.0 && !sym.is_purely_imaginary() {
                return Err(Error::Argument(format!(
                    "negative coefficient {coef} on a symbol with nonzero real part breaks parabolicity"
                )));
            }
            if *coef > 0.0 {
                declared_kappa += coef * sym.declared_kappa;
            }
        }
        Ok(Symbol {
            dimension,
            kind: SymbolKind::LinearCombination(terms),
            declared_kappa,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    /// Analytic lower bound on `Re g` over all of frequency space.
    pub fn declared_kappa(&self) -> f64 {
        self.declared_kappa
    }

    fn is_purely_imaginary(&self) -> bool {
        match &self.kind {
            SymbolKind::Advection { .. } => true,
            SymbolKind::LinearCombination(terms) => {
                terms.iter().all(|(c, s)| *c == 0.0 || s.is_purely_imaginary())
            }
            _ => false,
        }
    }

    /// `g(ξ)`, checking the dimension of `xi`.
    pub fn evaluate(&self, xi: &[f64]) -> Result<Complex64> {
        check_dim(self.dimension, xi.len())?;
        Ok(self.value_at(xi))
    }

    /// `g(ξ)` without the dimension check; callers guarantee `xi.len() == d`.
    pub(crate) fn value_at(&self, xi: &[f64]) -> Complex64 {
        debug_assert_eq!(xi.len(), self.dimension);
        match &self.kind {
            SymbolKind::FractionalMatern { alpha, kappa } => {
                let base = kappa * kappa + norm_sq(xi);
                Complex64::new(base.powf(alpha / 2.0), 0.0)
            }
            SymbolKind::FractionalLaplacian { alpha } => {
                Complex64::new(norm_sq(xi).powf(alpha / 2.0), 0.0)
            }
            SymbolKind::Advection { b } => {
                let dot: f64 = b.iter().zip(xi).map(|(b, x)| b * x).sum();
                Complex64::new(0.0, dot)
            }
            SymbolKind::Damping { c } => Complex64::new(*c, 0.0),
            SymbolKind::LinearCombination(terms) => terms
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, (coef, sym)| {
                    acc + sym.value_at(xi) * *coef
                }),
        }
    }

    pub fn check_hermitian(&self, samples: &[Vec<f64>], tol: f64) -> Result<HermitianReport> {
        for s in samples {
            check_dim(self.dimension, s.len())?;
        }
        Ok(check_hermitian(|xi| self.value_at(xi), samples, tol))
    }

    /// Smallest `Re g` over the sample set. Falls back to the declared bound when
    /// no samples are given.
    pub fn effective_kappa<'a, I>(&self, samples: I) -> f64
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut kappa = f64::INFINITY;
        for xi in samples {
            kappa = kappa.min(self.value_at(xi).re);
        }
        if kappa.is_infinite() {
            self.declared_kappa
        } else {
            kappa
        }
    }

    /// Multiplication of a spectral measure by `g`.
    pub fn apply(&self, m: &SpectralMeasure) -> Result<SpectralMeasure> {
        check_dim(self.dimension, m.dimension())?;
        Ok(m.map_weights(|xi, w| self.value_at(xi) * w))
    }
}

/// Outcome of a sampled Hermitian-symmetry check.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianReport {
    pub pass: bool,
    pub worst_violation: f64,
    pub witness: Option<Vec<f64>>,
}

/// Checks `g(-ξ) = conj(g(ξ))` on `samples` for an arbitrary evaluator.
pub fn check_hermitian<F>(g: F, samples: &[Vec<f64>], tol: f64) -> HermitianReport
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut worst = 0.0_f64;
    let mut witness = None;
    let mut neg = Vec::new();
    for xi in samples {
        neg.clear();
        neg.extend(xi.iter().map(|v| -v));
        let violation = (g(&neg) - g(xi).conj()).norm();
        if witness.is_none() || violation > worst {
            worst = violation;
            witness = Some(xi.clone());
        }
    }
    HermitianReport {
        pass: worst <= tol,
        worst_violation: worst,
        witness,
    }
}

fn check_positive_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::Argument("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

fn norm_sq(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kind_formulas() {
        let lap = Symbol::fractional_laplacian(1, 2.0).unwrap();
        assert_eq!(lap.evaluate(&[3.0]).unwrap(), c(9.0, 0.0));
        let adv = Symbol::advection(vec![1.0, 0.0]).unwrap();
        assert_eq!(adv.evaluate(&[2.0, 5.0]).unwrap(), c(0.0, 2.0));
        let mat = Symbol::fractional_matern(1, 1.0, 1.0).unwrap();
        assert_eq!(mat.evaluate(&[0.0]).unwrap(), c(1.0, 0.0));
        assert_eq!(Symbol::damping(2, 3.0).unwrap().evaluate(&[1.0, 2.0]).unwrap(), c(3.0, 0.0));
    }

    #[test]
    fn dimension_mismatch_is_an_argument_error() {
        let lap = Symbol::fractional_laplacian(2, 2.0).unwrap();
        assert_eq!(
            lap.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Symbol::fractional_laplacian(1, -1.0).is_err());
        assert!(Symbol::fractional_matern(1, -1.0, 0.0).is_err());
        assert!(Symbol::fractional_matern(1, -1.0, 0.5).is_ok());
        assert!(Symbol::damping(1, -0.1).is_err());
        let lap = Symbol::fractional_laplacian(1, 2.0).unwrap();
        assert!(Symbol::linear_combination(vec![(-1.0, lap)]).is_err());
        let adv = Symbol::advection(vec![2.0]).unwrap();
        assert!(Symbol::linear_combination(vec![(-1.0, adv)]).is_ok());
    }

    #[test]
    fn hermitian_reports() {
        let adv = Symbol::advection(vec![1.0]).unwrap();
        let samples = vec![vec![1.0], vec![-1.0], vec![2.0], vec![-2.0]];
        assert!(adv.check_hermitian(&samples, 1e-12).unwrap().pass);

        let corrupted = check_hermitian(|xi| c(0.0, xi[0].abs()), &[vec![1.0]], 1e-12);
        assert!(!corrupted.pass);
        assert_eq!(corrupted.worst_violation, 2.0);
        assert_eq!(corrupted.witness, Some(vec![1.0]));

        let damp = Symbol::damping(1, 3.0).unwrap();
        assert!(damp.check_hermitian(&[vec![0.3], vec![7.0]], 1e-12).unwrap().pass);
    }

    #[test]
    fn effective_kappa_examples() {
        let mat = Symbol::fractional_matern(1, 2.0, 1.0).unwrap();
        let pts = [vec![0.0], vec![0.5], vec![4.0]];
        assert!(mat.effective_kappa(pts.iter().map(|v| v.as_slice())) >= 1.0);

        let lap = Symbol::fractional_laplacian(1, 2.0).unwrap();
        let pts = [vec![0.0], vec![1.0]];
        assert_eq!(lap.effective_kappa(pts.iter().map(|v| v.as_slice())), 0.0);

        let sum = Symbol::linear_combination(vec![
            (1.0, Symbol::damping(1, 0.5).unwrap()),
            (1.0, Symbol::fractional_laplacian(1, 2.0).unwrap()),
        ])
        .unwrap();
        assert_eq!(sum.declared_kappa(), 0.5);
        let pts = [vec![0.0]];
        assert_eq!(sum.effective_kappa(pts.iter().map(|v| v.as_slice())), 0.5);
    }

    #[test]
    fn apply_examples() {
        let lap = Symbol::fractional_laplacian(1, 2.0).unwrap();
        let m = SpectralMeasure::from_atoms(1, vec![Atom::new(vec![2.0], c(1.0, 0.0))]).unwrap();
        let out = lap.apply(&m).unwrap();
        assert_eq!(out.atoms()[0].w, c(4.0, 0.0));

        assert!(lap.apply(&SpectralMeasure::empty(1)).unwrap().is_empty());

        let adv = Symbol::advection(vec![1.0]).unwrap();
        let m = SpectralMeasure::from_atoms(
            1,
            vec![Atom::new(vec![1.0], c(1.0, 0.0)), Atom::new(vec![-1.0], c(1.0, 0.0))],
        )
        .unwrap();
        let out = adv.apply(&m).unwrap();
        assert_eq!(out.weight_at(&[1.0]), Some(c(0.0, 1.0)));
        assert_eq!(out.weight_at(&[-1.0]), Some(c(0.0, -1.0)));
        assert!(out.is_hermitian(0.0));
    }
}
