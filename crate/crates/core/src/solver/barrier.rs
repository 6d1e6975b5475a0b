use super::{LinearizedOperator, SolverConfig, SolverError};
use crate::geometry::{GeometryError, Grid, HermitianField, ScalarField};
use crate::symcone::MetricFactor;

/// Solves `tr(α⁻¹(χ + i∂∂̄b)) = 0` with `b = φ` on the boundary.
pub fn build_linear_barrier(
    alpha: &HermitianField,
    chi: &HermitianField,
    phi: &[f64],
    grid: &Grid,
    cfg: &SolverConfig,
) -> Result<ScalarField, SolverError> {
    alpha.check(grid)?;
    chi.check(grid)?;
    if phi.len() != grid.boundary_len() {
        return Err(GeometryError::Length { expected: grid.boundary_len(), got: phi.len() }.into());
    }
    let inverse = |p: usize| {
        MetricFactor::new(alpha.at(p))
            .map(|f| f.inverse_metric())
            .map_err(|_| GeometryError::MetricNotPositive { index: p, coords: grid.interior_point(p).to_vec() })
    };
    let coeff = match alpha {
        HermitianField::Constant(_) => HermitianField::Constant(inverse(0)?),
        HermitianField::PerPoint(v) => {
            HermitianField::PerPoint((0..v.len()).map(inverse).collect::<Result<_, _>>()?)
        }
    };
    let op = LinearizedOperator::new(grid, &coeff)?;
    let lift = op.apply_boundary(phi);
    let rhs: Vec<f64> = (0..grid.interior_len())
        .map(|p| -coeff.at(p).trace_product(chi.at(p)) - lift[p])
        .collect();
    let sol = op.solve(&rhs, cfg)?;
    Ok(ScalarField { interior: sol.interior, boundary: phi.to_vec() })
}

/// `(max(u̲ − u), max(u − b))` over all grid values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonReport {
    pub sub_minus_u: f64,
    pub u_minus_b: f64,
}

pub fn check_comparison(sub: &ScalarField, u: &ScalarField, b: &ScalarField) -> ComparisonReport {
    let max_diff = |a: &ScalarField, c: &ScalarField| {
        a.interior
            .iter()
            .zip(&c.interior)
            .chain(a.boundary.iter().zip(&c.boundary))
            .fold(f64::NEG_INFINITY, |m, (x, y)| m.max(x - y))
    };
    ComparisonReport { sub_minus_u: max_diff(sub, u), u_minus_b: max_diff(u, b) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Shape};
    use crate::symcone::HermitianMatrix;

    fn fields(n: usize, chi: f64) -> (HermitianField, HermitianField) {
        (
            HermitianField::Constant(HermitianMatrix::identity(n)),
            HermitianField::Constant(HermitianMatrix::scaled_identity(n, chi)),
        )
    }

    #[test]
    fn constant_data_gives_constant_barrier() {
        let g = Grid::build(DomainSpec::new(2, Shape::Box, 7).unwrap()).unwrap();
        let (a, c) = fields(2, 0.0);
        let b = build_linear_barrier(&a, &c, &vec![1.0; g.boundary_len()], &g, &SolverConfig::default()).unwrap();
        assert!(b.interior.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn ball_barrier_dominates_quadratic() {
        let g = Grid::build(DomainSpec::new(2, Shape::Ball, 9).unwrap()).unwrap();
        let (a, c) = fields(2, 0.0);
        let u = ScalarField::from_fn(&g, |z| z.iter().map(|x| x * x).sum());
        let b = build_linear_barrier(&a, &c, &u.boundary, &g, &SolverConfig::default()).unwrap();
        assert!(b.interior.iter().all(|v| (v - 1.0).abs() < 1e-9));
        assert!(check_comparison(&u, &u, &b).u_minus_b <= 1e-9);
    }

    #[test]
    fn unit_form_matches_poisson_solve() {
        let g = Grid::build(DomainSpec::new(1, Shape::Box, 9).unwrap()).unwrap();
        let (a, c) = fields(1, 1.0);
        let cfg = SolverConfig::default();
        let b = build_linear_barrier(&a, &c, &vec![0.0; g.boundary_len()], &g, &cfg).unwrap();
        let poisson = crate::solver::linearized_solve(&a, &ScalarField::constant(&g, -1.0), &g, &cfg).unwrap();
        for (x, y) in b.interior.iter().zip(&poisson.interior) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn identical_fields_compare_to_zero() {
        let g = Grid::build(DomainSpec::new(1, Shape::Box, 5).unwrap()).unwrap();
        let u = ScalarField::from_fn(&g, |z| z[0]);
        assert_eq!(check_comparison(&u, &u, &u), ComparisonReport { sub_minus_u: 0.0, u_minus_b: 0.0 });
    }
}
