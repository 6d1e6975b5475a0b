use rayon::prelude::*;

use super::SolverError;
use crate::geometry::{complex_hessian_at, GeometryError, Grid, HermitianField, ScalarField};
use crate::symcone::{cone_membership_slice, sigma_gradient_from_eigen, sigma_slice, EigenDecomposition, MetricFactor};

#[derive(Clone, Debug)]
enum Factors {
    Constant(MetricFactor),
    PerPoint(Vec<MetricFactor>),
}

/// `σ_k(λ(α⁻¹(χ + i∂∂̄u))) = ψ` on a grid.
#[derive(Clone, Debug)]
pub struct Equation<'g> {
    grid: &'g Grid,
    k: usize,
    alpha: HermitianField,
    chi: HermitianField,
    factors: Factors,
}

/// Pointwise data of `h(u)` at one interior point.
#[derive(Clone, Copy, Debug)]
pub struct PointState {
    pub sigma: f64,
    /// `min_{j ≤ k} σ_j(λ)`; positive iff `λ ∈ Γ_k`.
    pub margin: f64,
    pub eigen: EigenDecomposition,
    pub norm: f64,
}

impl<'g> Equation<'g> {
    pub fn new(grid: &'g Grid, k: usize, alpha: HermitianField, chi: HermitianField) -> Result<Self, SolverError> {
        let n = grid.n();
        if k == 0 || k > n {
            return Err(SolverError::Order { k, n });
        }
        alpha.check(grid)?;
        chi.check(grid)?;
        let not_pd = |p: usize| GeometryError::MetricNotPositive { index: p, coords: grid.interior_point(p).to_vec() };
        let factors = match &alpha {
            HermitianField::Constant(a) => Factors::Constant(MetricFactor::new(a).map_err(|_| not_pd(0))?),
            HermitianField::PerPoint(v) => Factors::PerPoint(
                v.iter()
                    .enumerate()
                    .map(|(p, a)| MetricFactor::new(a).map_err(|_| not_pd(p)))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(Self { grid, k, alpha, chi, factors })
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &HermitianField {
        &self.alpha
    }

    pub fn chi(&self) -> &HermitianField {
        &self.chi
    }

    pub fn factor(&self, p: usize) -> &MetricFactor {
        match &self.factors {
            Factors::Constant(f) => f,
            Factors::PerPoint(v) => &v[p],
        }
    }

    pub fn point_state(&self, u: &ScalarField, p: usize) -> PointState {
        let form = self.chi.at(p).add(&complex_hessian_at(self.grid, u, p));
        let reduced = self.factor(p).reduce(&form);
        let eigen = reduced.eigen();
        let values = eigen.values();
        PointState {
            sigma: sigma_slice(values, self.k),
            margin: cone_membership_slice(values, self.k).margin,
            eigen,
            norm: reduced.frobenius_norm(),
        }
    }

    /// `σ_k` and cone margin at every interior point.
    pub fn evaluate(&self, u: &ScalarField) -> Evaluation {
        let (sigma, margin) = (0..self.grid.interior_len())
            .into_par_iter()
            .map(|p| {
                let s = self.point_state(u, p);
                (s.sigma, s.margin)
            })
            .unzip();
        Evaluation { sigma, margin }
    }

    /// `σ_k(λ(u)) − ψ` on the interior, zero on the boundary.
    pub fn residual(&self, u: &ScalarField, psi: &ScalarField) -> ScalarField {
        let eval = self.evaluate(u);
        ScalarField {
            interior: eval.sigma.iter().zip(&psi.interior).map(|(s, f)| s - f).collect(),
            boundary: vec![0.0; self.grid.boundary_len()],
        }
    }

    /// The frozen linearization `∂σ_k/∂(i∂∂̄u)` at every interior point,
    /// together with the pointwise evaluation it was computed from.
    pub fn linearize(&self, u: &ScalarField) -> (HermitianField, Evaluation) {
        let states: Vec<(f64, f64, crate::symcone::HermitianMatrix)> = (0..self.grid.interior_len())
            .into_par_iter()
            .map(|p| {
                let s = self.point_state(u, p);
                let g = sigma_gradient_from_eigen(&s.eigen, self.k, s.norm);
                (s.sigma, s.margin, self.factor(p).pull_back(&g.matrix))
            })
            .collect();
        let mut eval = Evaluation { sigma: Vec::with_capacity(states.len()), margin: Vec::with_capacity(states.len()) };
        let mut coeff = Vec::with_capacity(states.len());
        for (s, m, c) in states {
            eval.sigma.push(s);
            eval.margin.push(m);
            coeff.push(c);
        }
        (HermitianField::PerPoint(coeff), eval)
    }
}

/// Pointwise `σ_k` and `Γ_k` margins.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub sigma: Vec<f64>,
    pub margin: Vec<f64>,
}

impl Evaluation {
    /// Index and value of the smallest margin.
    pub fn min_margin(&self) -> (usize, f64) {
        self.margin
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, m)| if m < best.1 { (i, m) } else { best })
    }

    pub fn admissible(&self) -> bool {
        self.min_margin().1 > 0.0
    }

    /// `max |σ_k − ψ|` over the interior.
    pub fn residual_norm(&self, psi: &ScalarField) -> f64 {
        self.sigma.iter().zip(&psi.interior).fold(0.0, |m, (s, f)| m.max((s - f).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Shape};
    use crate::symcone::{binomial, HermitianMatrix};

    #[test]
    fn quadratic_residual_is_exactly_zero() {
        let g = Grid::build(DomainSpec::new(2, Shape::Box, 7).unwrap()).unwrap();
        let eq = Equation::new(
            &g,
            2,
            HermitianField::Constant(HermitianMatrix::identity(2)),
            HermitianField::Constant(HermitianMatrix::zeros(2)),
        )
        .unwrap();
        let u = ScalarField::from_fn(&g, |z| z.iter().map(|x| x * x).sum());
        let psi = ScalarField::constant(&g, binomial(2, 2));
        let r = eq.residual(&u, &psi);
        assert!(r.max_abs_interior() < 1e-12);
        let shifted = ScalarField::constant(&g, binomial(2, 2) + 1.0);
        let r2 = eq.residual(&u, &shifted);
        for (a, b) in r.interior.iter().zip(&r2.interior) {
            assert!((a - b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_order_and_metric() {
        let g = Grid::build(DomainSpec::new(1, Shape::Box, 5).unwrap()).unwrap();
        let id = HermitianField::Constant(HermitianMatrix::identity(1));
        assert!(matches!(Equation::new(&g, 2, id.clone(), id.clone()), Err(SolverError::Order { .. })));
        let neg = HermitianField::Constant(HermitianMatrix::scaled_identity(1, -1.0));
        assert!(Equation::new(&g, 1, neg, id).is_err());
    }

    #[test]
    fn linearization_matches_directional_difference() {
        let g = Grid::build(DomainSpec::new(2, Shape::Box, 7).unwrap()).unwrap();
        let alpha = HermitianField::from_fn(&g, |z| HermitianMatrix::scaled_identity(2, 1.0 + 0.2 * z[0] * z[0]));
        let chi = HermitianField::Constant(HermitianMatrix::from_real_diagonal(&[0.3, 0.1]));
        let eq = Equation::new(&g, 2, alpha, chi).unwrap();
        let u = ScalarField::from_fn(&g, |z| z.iter().map(|x| x * x).sum::<f64>() + 0.1 * z[0] * z[2]);
        let du = ScalarField::from_fn(&g, |z| (z[0] + 0.5 * z[3]).sin()).with_boundary(vec![0.0; g.boundary_len()]);
        let (coeff, _) = eq.linearize(&u);
        let op = crate::solver::LinearizedOperator::new(&g, &coeff).unwrap();
        let mut lin = vec![0.0; g.interior_len()];
        op.apply(&du.interior, &mut lin);
        let eps = 1e-6;
        let plus = eq.evaluate(&u.axpy_interior(eps, &du.interior));
        let minus = eq.evaluate(&u.axpy_interior(-eps, &du.interior));
        for p in 0..g.interior_len() {
            let fd = (plus.sigma[p] - minus.sigma[p]) / (2.0 * eps);
            assert!((fd - lin[p]).abs() < 1e-5 * lin[p].abs().max(1.0), "{p}: {fd} vs {}", lin[p]);
        }
    }
}
