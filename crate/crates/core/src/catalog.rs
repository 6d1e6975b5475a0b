//! Named analytic functions for boundary data, subsolutions, densities and
//! manufactured solutions, plus the problem description built from them.
//!
//! Names are parsed from short strings such as `quadratic`, `quadratic:2`,
//! `quartic_blend:0.1` or `constant:1`.

use std::fmt;

use thiserror::Error;

use crate::geometry::{DomainSpec, GeometryError, Grid, HermitianField, ScalarField};
use crate::solver::{Equation, SolverError};
use crate::symcone::{sigma_slice, HermitianMatrix, MetricFactor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
    #[error("bad parameter in `{0}`")]
    Parameter(String),
}

fn split(name: &str) -> (&str, Option<&str>) {
    match name.split_once(':') {
        Some((head, tail)) => (head.trim(), Some(tail.trim())),
        None => (name.trim(), None),
    }
}

fn param(name: &str, raw: Option<&str>, default: f64) -> Result<f64, CatalogError> {
    match raw {
        None => Ok(default),
        Some(s) => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CatalogError::Parameter(name.to_string())),
    }
}

fn params(name: &str, raw: Option<&str>) -> Result<Vec<f64>, CatalogError> {
    let raw = raw.ok_or_else(|| CatalogError::Parameter(name.to_string()))?;
    raw.split([',', ';', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CatalogError::Parameter(name.to_string()))
}

fn norm_sq(z: &[f64]) -> f64 {
    z.iter().map(|x| x * x).sum()
}

/// Real-valued analytic functions on `ℂⁿ`, evaluated at real coordinates
/// `(x¹, y¹, …, xⁿ, yⁿ)`.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticFn {
    Constant(f64),
    /// `c|z|²`.
    Quadratic { scale: f64 },
    /// `|z|² + c|z¹|⁴`.
    QuarticBlend { quartic: f64 },
}

impl AnalyticFn {
    pub fn parse(name: &str) -> Result<Self, CatalogError> {
        let (head, raw) = split(name);
        match head {
            "constant" => Ok(AnalyticFn::Constant(param(name, raw, 0.0)?)),
            "quadratic" => Ok(AnalyticFn::Quadratic { scale: param(name, raw, 1.0)? }),
            "quartic_blend" => Ok(AnalyticFn::QuarticBlend { quartic: param(name, raw, 0.1)? }),
            _ => Err(CatalogError::Unknown(name.to_string())),
        }
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        match *self {
            AnalyticFn::Constant(c) => c,
            AnalyticFn::Quadratic { scale } => scale * norm_sq(z),
            AnalyticFn::QuarticBlend { quartic } => {
                let r1 = z[0] * z[0] + z[1] * z[1];
                norm_sq(z) + quartic * r1 * r1
            }
        }
    }

    /// Exact `i∂∂̄` of the function.
    pub fn complex_hessian(&self, z: &[f64]) -> HermitianMatrix {
        let n = z.len() / 2;
        match *self {
            AnalyticFn::Constant(_) => HermitianMatrix::zeros(n),
            AnalyticFn::Quadratic { scale } => HermitianMatrix::scaled_identity(n, scale),
            AnalyticFn::QuarticBlend { quartic } => {
                let mut d = vec![1.0; n];
                d[0] += 4.0 * quartic * (z[0] * z[0] + z[1] * z[1]);
                HermitianMatrix::from_real_diagonal(&d)
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(grid, |z| self.value(z))
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticFn::Constant(c) => write!(f, "constant:{c}"),
            AnalyticFn::Quadratic { scale } => write!(f, "quadratic:{scale}"),
            AnalyticFn::QuarticBlend { quartic } => write!(f, "quartic_blend:{quartic}"),
        }
    }
}

/// Metric `α`.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpec {
    Identity,
    /// `c I`.
    Scaled(f64),
    /// Constant diagonal.
    Diagonal(Vec<f64>),
    /// `(1 + c|z|²) I`.
    Conformal(f64),
}

impl MetricSpec {
    pub fn parse(name: &str) -> Result<Self, CatalogError> {
        let (head, raw) = split(name);
        match head {
            "identity" => Ok(MetricSpec::Identity),
            "scaled" => Ok(MetricSpec::Scaled(param(name, raw, 1.0)?)),
            "diagonal" => Ok(MetricSpec::Diagonal(params(name, raw)?)),
            "conformal" => Ok(MetricSpec::Conformal(param(name, raw, 0.1)?)),
            _ => Err(CatalogError::Unknown(name.to_string())),
        }
    }

    pub fn at(&self, z: &[f64]) -> HermitianMatrix {
        let n = z.len() / 2;
        match self {
            MetricSpec::Identity => HermitianMatrix::identity(n),
            MetricSpec::Scaled(c) => HermitianMatrix::scaled_identity(n, *c),
            MetricSpec::Diagonal(d) => HermitianMatrix::from_real_diagonal(d),
            MetricSpec::Conformal(c) => HermitianMatrix::scaled_identity(n, 1.0 + c * norm_sq(z)),
        }
    }

    /// Dimension check for the constant diagonal form.
    pub fn fits(&self, n: usize) -> bool {
        !matches!(self, MetricSpec::Diagonal(d) if d.len() != n)
    }

    pub fn field(&self, grid: &Grid) -> HermitianField {
        match self {
            MetricSpec::Conformal(_) => HermitianField::from_fn(grid, |z| self.at(z)),
            _ => HermitianField::Constant(self.at(&vec![0.0; grid.real_dim()])),
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpec::Identity => write!(f, "identity"),
            MetricSpec::Scaled(c) => write!(f, "scaled:{c}"),
            MetricSpec::Diagonal(d) => write!(f, "diagonal:{}", join(d)),
            MetricSpec::Conformal(c) => write!(f, "conformal:{c}"),
        }
    }
}

/// Background form `χ`.
#[derive(Clone, Debug, PartialEq)]
pub enum FormSpec {
    Zero,
    /// `c I`.
    Scaled(f64),
    Diagonal(Vec<f64>),
}

impl FormSpec {
    pub fn parse(name: &str) -> Result<Self, CatalogError> {
        let (head, raw) = split(name);
        match head {
            "zero" => Ok(FormSpec::Zero),
            "scaled" => Ok(FormSpec::Scaled(param(name, raw, 1.0)?)),
            "diagonal" => Ok(FormSpec::Diagonal(params(name, raw)?)),
            _ => Err(CatalogError::Unknown(name.to_string())),
        }
    }

    pub fn fits(&self, n: usize) -> bool {
        !matches!(self, FormSpec::Diagonal(d) if d.len() != n)
    }

    pub fn matrix(&self, n: usize) -> HermitianMatrix {
        match self {
            FormSpec::Zero => HermitianMatrix::zeros(n),
            FormSpec::Scaled(c) => HermitianMatrix::scaled_identity(n, *c),
            FormSpec::Diagonal(d) => HermitianMatrix::from_real_diagonal(d),
        }
    }

    pub fn field(&self, grid: &Grid) -> HermitianField {
        HermitianField::Constant(self.matrix(grid.n()))
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormSpec::Zero => write!(f, "zero"),
            FormSpec::Scaled(c) => write!(f, "scaled:{c}"),
            FormSpec::Diagonal(d) => write!(f, "diagonal:{}", join(d)),
        }
    }
}

/// Right-hand side `ψ`.
#[derive(Clone, Debug, PartialEq)]
pub enum DensitySpec {
    Constant(f64),
    /// `ψ = σ_k(λ(α⁻¹(χ + i∂∂̄u*)))` for an analytic `u*`, evaluated exactly.
    Manufactured(AnalyticFn),
}

impl DensitySpec {
    pub fn parse(name: &str) -> Result<Self, CatalogError> {
        let (head, raw) = split(name);
        match head {
            "constant" => Ok(DensitySpec::Constant(param(name, raw, 1.0)?)),
            "manufactured" => {
                let inner = raw.ok_or_else(|| CatalogError::Parameter(name.to_string()))?;
                Ok(DensitySpec::Manufactured(AnalyticFn::parse(inner)?))
            }
            _ => Err(CatalogError::Unknown(name.to_string())),
        }
    }
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensitySpec::Constant(c) => write!(f, "constant:{c}"),
            DensitySpec::Manufactured(u) => write!(f, "manufactured:{u}"),
        }
    }
}

/// Full description of a Dirichlet problem built from catalog entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub k: usize,
    pub metric: MetricSpec,
    pub chi: FormSpec,
    pub psi: DensitySpec,
    pub subsolution: AnalyticFn,
    /// Boundary data source; the trace of the subsolution when `None`.
    pub boundary: Option<AnalyticFn>,
    /// Analytic reference solution, when known.
    pub exact: Option<AnalyticFn>,
}

/// A [`ProblemSpec`] realised on a grid.
pub struct ProblemInstance {
    pub grid: Grid,
    pub alpha: HermitianField,
    pub chi: HermitianField,
    pub psi: ScalarField,
    /// Subsolution sampled on the grid; its boundary values are its own trace.
    pub subsolution: ScalarField,
    /// Boundary data `φ`.
    pub phi: Vec<f64>,
    pub exact: Option<ScalarField>,
    pub k: usize,
}

impl ProblemInstance {
    pub fn equation(&self) -> Result<Equation<'_>, SolverError> {
        Equation::new(&self.grid, self.k, self.alpha.clone(), self.chi.clone())
    }
}

impl ProblemSpec {
    /// Realises the problem; `points_per_axis` overrides the domain resolution.
    pub fn instantiate(&self, points_per_axis: Option<usize>) -> Result<ProblemInstance, GeometryError> {
        let mut domain = self.domain;
        if let Some(m) = points_per_axis {
            domain.points_per_axis = m;
        }
        let grid = Grid::build(domain)?;
        let alpha = self.metric.field(&grid);
        let chi = self.chi.field(&grid);
        let psi = match &self.psi {
            DensitySpec::Constant(c) => ScalarField::constant(&grid, *c),
            DensitySpec::Manufactured(f) => {
                let chi_m = self.chi.matrix(grid.n());
                let k = self.k;
                let metric = &self.metric;
                let vals = |z: &[f64]| {
                    let form = chi_m.add(&f.complex_hessian(z));
                    let reduced = match MetricFactor::new(&metric.at(z)) {
                        Ok(fac) => fac.reduce(&form),
                        Err(_) => return f64::NAN,
                    };
                    sigma_slice(reduced.eigen().values(), k)
                };
                ScalarField::from_fn(&grid, vals)
            }
        };
        let subsolution = self.subsolution.sample(&grid);
        let phi = match &self.boundary {
            None => subsolution.boundary.clone(),
            Some(f) => f.sample(&grid).boundary,
        };
        let exact = self.exact.as_ref().map(|f| f.sample(&grid));
        Ok(ProblemInstance { grid, alpha, chi, psi, subsolution, phi, exact, k: self.k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;

    #[test]
    fn names_round_trip() {
        for name in ["quadratic:2", "quartic_blend:0.1", "constant:-1.5"] {
            assert_eq!(AnalyticFn::parse(name).unwrap().to_string(), name);
        }
        assert_eq!(AnalyticFn::parse("quadratic").unwrap(), AnalyticFn::Quadratic { scale: 1.0 });
        for name in ["identity", "scaled:2", "diagonal:1,0.5", "conformal:0.2"] {
            assert_eq!(MetricSpec::parse(name).unwrap().to_string(), name);
        }
        for name in ["zero", "scaled:0.3", "diagonal:2,1"] {
            assert_eq!(FormSpec::parse(name).unwrap().to_string(), name);
        }
        for name in ["constant:1", "manufactured:quartic_blend:0.1"] {
            assert_eq!(DensitySpec::parse(name).unwrap().to_string(), name);
        }
        assert!(AnalyticFn::parse("cubic").is_err());
        assert!(AnalyticFn::parse("quadratic:x").is_err());
        assert!(MetricSpec::parse("diagonal").is_err());
    }

    #[test]
    fn quartic_blend_hessian_by_differences() {
        let f = AnalyticFn::QuarticBlend { quartic: 0.1 };
        let z = [0.3, -0.4, 0.2, 0.5];
        let h = f.complex_hessian(&z);
        // ∂²/∂x∂x + ∂²/∂y∂y of the first coordinate, by central differences
        let e = 1e-4;
        let second = |a: usize| {
            let mut p = z;
            let mut m = z;
            p[a] += e;
            m[a] -= e;
            (f.value(&p) - 2.0 * f.value(&z) + f.value(&m)) / (e * e)
        };
        assert!((h.get(0, 0).re - 0.25 * (second(0) + second(1))).abs() < 1e-6);
        assert!((h.get(1, 1).re - 0.25 * (second(2) + second(3))).abs() < 1e-6);
    }

    #[test]
    fn manufactured_density_is_exact_sigma() {
        let spec = ProblemSpec {
            domain: DomainSpec::new(2, Shape::Box, 5).unwrap(),
            k: 2,
            metric: MetricSpec::Identity,
            chi: FormSpec::Zero,
            psi: DensitySpec::Manufactured(AnalyticFn::QuarticBlend { quartic: 0.1 }),
            subsolution: AnalyticFn::Quadratic { scale: 1.0 },
            boundary: None,
            exact: None,
        };
        let inst = spec.instantiate(None).unwrap();
        for p in 0..inst.grid.interior_len() {
            let z = inst.grid.interior_point(p);
            let want = 1.0 + 0.4 * (z[0] * z[0] + z[1] * z[1]);
            assert!((inst.psi.interior[p] - want).abs() < 1e-13);
        }
        assert_eq!(inst.phi, inst.subsolution.boundary);
    }
}
