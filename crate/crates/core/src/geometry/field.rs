use num_complex::Complex64;

use super::{GeometryError, Grid};
use crate::symcone::HermitianMatrix;

/// One real value per interior point plus one per boundary point.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            interior: vec![0.0; grid.interior_len()],
            boundary: vec![0.0; grid.boundary_len()],
        }
    }

    /// Samples `f` at every grid and boundary point.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self {
            interior: (0..grid.interior_len()).map(|p| f(grid.interior_point(p))).collect(),
            boundary: (0..grid.boundary_len()).map(|b| f(grid.boundary_point(b))).collect(),
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    /// Checks lengths against `grid` and finiteness of every value.
    pub fn check(&self, grid: &Grid) -> Result<(), GeometryError> {
        if self.interior.len() != grid.interior_len() {
            return Err(GeometryError::Length { expected: grid.interior_len(), got: self.interior.len() });
        }
        if self.boundary.len() != grid.boundary_len() {
            return Err(GeometryError::Length { expected: grid.boundary_len(), got: self.boundary.len() });
        }
        if let Some(p) = self.interior.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(p));
        }
        Ok(())
    }

    /// Same boundary, interior replaced.
    pub fn with_interior(&self, interior: Vec<f64>) -> Self {
        Self { interior, boundary: self.boundary.clone() }
    }

    /// Same interior, boundary replaced.
    pub fn with_boundary(&self, boundary: Vec<f64>) -> Self {
        Self { interior: self.interior.clone(), boundary }
    }

    /// `self + step · delta` on the interior; `delta`'s boundary is ignored.
    pub fn axpy_interior(&self, step: f64, delta: &[f64]) -> Self {
        let interior = self.interior.iter().zip(delta).map(|(u, d)| u + step * d).collect();
        self.with_interior(interior)
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.interior.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute difference over interior and boundary.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.interior
            .iter()
            .zip(&other.interior)
            .chain(self.boundary.iter().zip(&other.boundary))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// An n×n Hermitian matrix per interior point.
#[derive(Clone, Debug, PartialEq)]
pub enum HermitianField {
    /// The same matrix at every point.
    Constant(HermitianMatrix),
    PerPoint(Vec<HermitianMatrix>),
}

impl HermitianField {
    #[inline]
    pub fn at(&self, p: usize) -> &HermitianMatrix {
        match self {
            HermitianField::Constant(m) => m,
            HermitianField::PerPoint(v) => &v[p],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> HermitianMatrix) -> Self {
        HermitianField::PerPoint((0..grid.interior_len()).map(|p| f(grid.interior_point(p))).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            HermitianField::Constant(m) => m.dim(),
            HermitianField::PerPoint(v) => v.first().map_or(0, |m| m.dim()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, HermitianField::Constant(_))
    }

    pub fn check(&self, grid: &Grid) -> Result<(), GeometryError> {
        match self {
            HermitianField::Constant(m) if m.dim() != grid.n() => {
                Err(GeometryError::Length { expected: grid.n(), got: m.dim() })
            }
            HermitianField::PerPoint(v) if v.len() != grid.interior_len() => {
                Err(GeometryError::Length { expected: grid.interior_len(), got: v.len() })
            }
            _ => Ok(()),
        }
    }
}

/// `∂u/∂z^j` per interior point, `n` entries each.
#[derive(Clone, Debug)]
pub struct GradientField {
    n: usize,
    values: Vec<Complex64>,
}

impl GradientField {
    pub(crate) fn new(n: usize, values: Vec<Complex64>) -> Self {
        Self { n, values }
    }

    pub fn at(&self, p: usize) -> &[Complex64] {
        &self.values[p * self.n..(p + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.n.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖∂u‖²_α = w† α⁻¹ w` with `w_j = ∂u/∂z^j`.
    pub fn norm_sq_at(&self, p: usize, alpha_inv: &HermitianMatrix) -> f64 {
        let w = self.at(p);
        let n = self.n;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += w[i].conj() * alpha_inv.get(i, j) * w[j];
            }
        }
        s.re
    }

    /// `K = 1 + max_p ‖∂u‖²_α` over the interior.
    pub fn k_value(&self, alpha: &HermitianField) -> Result<f64, GeometryError> {
        let mut worst: f64 = 0.0;
        let mut cached = None;
        for p in 0..self.len() {
            let inv = match (alpha, &cached) {
                (HermitianField::Constant(_), Some(inv)) => *inv,
                _ => {
                    let f = crate::symcone::MetricFactor::new(alpha.at(p))
                        .map_err(|_| GeometryError::MetricNotPositive { index: p, coords: Vec::new() })?;
                    let inv = f.inverse_metric();
                    cached = Some(inv);
                    inv
                }
            };
            worst = worst.max(self.norm_sq_at(p, &inv));
        }
        Ok(1.0 + worst)
    }
}

/// Sorted-descending spectra, `n` per interior point.
#[derive(Clone, Debug)]
pub struct SpectrumField {
    n: usize,
    values: Vec<f64>,
}

impl SpectrumField {
    pub(crate) fn new(n: usize, values: Vec<f64>) -> Self {
        Self { n, values }
    }

    pub fn at(&self, p: usize) -> &[f64] {
        &self.values[p * self.n..(p + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.n.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}
