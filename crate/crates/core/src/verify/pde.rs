use std::collections::HashMap;

use super::VerifyError;
use crate::catalog::{ProblemInstance, ProblemSpec};
use crate::geometry::{complex_hessian_at, gradient, Grid, ScalarField};
use crate::solver::{continuity_solve, ContinuityState, Equation, SolverConfig};

/// A problem together with its continuation result.
pub struct SolvedProblem {
    pub instance: ProblemInstance,
    pub state: ContinuityState,
}

/// Realises `spec` (optionally at another resolution) and runs the
/// continuity method from its subsolution.
pub fn solve_problem(
    spec: &ProblemSpec,
    points_per_axis: Option<usize>,
    cfg: &SolverConfig,
) -> Result<SolvedProblem, VerifyError> {
    let instance = spec.instantiate(points_per_axis)?;
    let state = {
        let eq = instance.equation()?;
        continuity_solve(&eq, &instance.subsolution, &instance.psi, &instance.phi, cfg)?
    };
    Ok(SolvedProblem { instance, state })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxPrincipleReport {
    /// `min (v − u)` over the interior.
    pub min_v_minus_u: f64,
    pub index: usize,
    pub spacing: f64,
}

/// Comparison harness: `u` solves `σ_k = ψ`, the spectrum of `v` lies outside
/// `{λ ∈ Γ_k : σ_k(λ) ≥ ψ}` at every interior point, and `u ≤ v` on the
/// boundary. Any unmet precondition is reported as an error and the test is
/// not run.
pub fn max_principle_test(
    eq: &Equation<'_>,
    u: &ScalarField,
    v: &ScalarField,
    psi: &ScalarField,
    solve_tol: f64,
) -> Result<MaxPrincipleReport, VerifyError> {
    let grid = eq.grid();
    u.check(grid)?;
    v.check(grid)?;
    psi.check(grid)?;
    let eval_u = eq.evaluate(u);
    let (p, margin) = eval_u.min_margin();
    if !(margin > 0.0) {
        return Err(VerifyError::Precondition(format!("u is not admissible at interior point {p}")));
    }
    let res = eval_u.residual_norm(psi);
    if !(res <= solve_tol) {
        return Err(VerifyError::Precondition(format!("u leaves residual {res:.3e} above {solve_tol:.3e}")));
    }
    let eval_v = eq.evaluate(v);
    if let Some(p) = (0..grid.interior_len()).find(|&p| eval_v.margin[p] > 0.0 && eval_v.sigma[p] >= psi.interior[p]) {
        return Err(VerifyError::Precondition(format!(
            "spectrum of v lies in {{σ_{} ≥ ψ}} at interior point {p} (z = {:?})",
            eq.k(),
            grid.interior_point(p)
        )));
    }
    if let Some(b) = u.boundary.iter().zip(&v.boundary).position(|(a, c)| a - c > 1e-12 * c.abs().max(1.0)) {
        return Err(VerifyError::Precondition(format!("u exceeds v at boundary point {b}")));
    }
    let (index, min_v_minus_u) = v
        .interior
        .iter()
        .zip(&u.interior)
        .map(|(a, b)| a - b)
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best });
    Ok(MaxPrincipleReport { min_v_minus_u, index, spacing: grid.spacing() })
}

/// One member of a scaling family.
#[derive(Clone, Debug)]
pub struct ScalingMember {
    pub parameter: f64,
    pub spec: ProblemSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub parameter: f64,
    /// `sup ‖i∂∂̄u‖` in the metric (Frobenius norm of the reduced matrix).
    pub hessian_sup: f64,
    /// `1 + sup ‖∂u‖²`.
    pub k_value: f64,
    pub ratio: f64,
    pub failure: Option<String>,
}

/// `sup ‖i∂∂̄u‖_α` and `K = 1 + sup ‖∂u‖²_α` for a solved field.
pub fn scaling_measures(eq: &Equation<'_>, u: &ScalarField) -> Result<(f64, f64), VerifyError> {
    let grid = eq.grid();
    let hessian_sup = (0..grid.interior_len())
        .map(|p| eq.factor(p).reduce(&complex_hessian_at(grid, u, p)).frobenius_norm())
        .fold(0.0, f64::max);
    let k_value = gradient(u, grid).k_value(eq.alpha())?;
    Ok((hessian_sup, k_value))
}

/// Solves every member and tabulates `sup‖i∂∂̄u‖ / K`. A failed member gets
/// a row with its failure and NaN measures; the family continues.
pub fn c2_scaling_report(members: &[ScalingMember], cfg: &SolverConfig) -> Vec<ScalingRow> {
    members
        .iter()
        .map(|m| {
            let measured = solve_problem(&m.spec, None, cfg).and_then(|solved| {
                let eq = solved.instance.equation()?;
                scaling_measures(&eq, &solved.state.u)
            });
            match measured {
                Ok((hessian_sup, k_value)) => ScalingRow {
                    parameter: m.parameter,
                    hessian_sup,
                    k_value,
                    ratio: hessian_sup / k_value,
                    failure: None,
                },
                Err(e) => ScalingRow {
                    parameter: m.parameter,
                    hessian_sup: f64::NAN,
                    k_value: f64::NAN,
                    ratio: f64::NAN,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// `max ratio / min ratio` over the successful rows.
pub fn scaling_spread(rows: &[ScalingRow]) -> Option<f64> {
    let ok: Vec<f64> = rows.iter().filter(|r| r.failure.is_none()).map(|r| r.ratio).collect();
    if ok.is_empty() {
        return None;
    }
    let max = ok.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ok.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max / min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub points_per_axis: usize,
    pub spacing: f64,
    /// L∞ error against the reference; `None` for the reference grid itself
    /// or after a failed solve.
    pub error: Option<f64>,
    /// `log(e_prev / e) / log(h_prev / h)`.
    pub order: Option<f64>,
    /// The error is at the solver's resolution, so no order is reported.
    pub roundoff: bool,
    pub failure: Option<String>,
}

fn key(z: &[f64]) -> Vec<i64> {
    z.iter().map(|x| (x * 1e9).round() as i64).collect()
}

fn lookup(grid: &Grid, field: &ScalarField) -> HashMap<Vec<i64>, f64> {
    let mut map = HashMap::with_capacity(grid.interior_len() + grid.boundary_len());
    for p in 0..grid.interior_len() {
        map.insert(key(grid.interior_point(p)), field.interior[p]);
    }
    for b in 0..grid.boundary_len() {
        map.insert(key(grid.boundary_point(b)), field.boundary[b]);
    }
    map
}

/// Mesh study over `resolutions` (points per axis). The analytic solution of
/// `spec` is the reference when present; otherwise the finest grid is, and
/// only points shared with it are compared.
pub fn convergence_study(
    spec: &ProblemSpec,
    resolutions: &[usize],
    cfg: &SolverConfig,
) -> Result<Vec<ConvergenceRow>, VerifyError> {
    let mut res = resolutions.to_vec();
    res.sort_unstable();
    res.dedup();
    if res.is_empty() {
        return Err(VerifyError::Spec("no resolutions given".into()));
    }
    let floor = 100.0 * cfg.newton_tol;
    let reference = match &spec.exact {
        Some(_) => None,
        None => {
            let finest = *res.last().unwrap();
            let solved = solve_problem(spec, Some(finest), cfg)?;
            Some(lookup(&solved.instance.grid, &solved.state.u))
        }
    };
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (i, &m) in res.iter().enumerate() {
        let spacing = 2.0 / (m - 1) as f64;
        let mut row = ConvergenceRow { points_per_axis: m, spacing, error: None, order: None, roundoff: false, failure: None };
        if reference.is_some() && i + 1 == res.len() {
            rows.push(row);
            continue;
        }
        match solve_problem(spec, Some(m), cfg) {
            Ok(solved) => {
                let grid = &solved.instance.grid;
                let u = &solved.state.u;
                let err = match (&solved.instance.exact, &reference) {
                    (Some(exact), _) => u.max_abs_diff(exact),
                    (None, Some(map)) => {
                        let coarse = lookup(grid, u);
                        coarse
                            .iter()
                            .filter_map(|(k, v)| map.get(k).map(|r| (v - r).abs()))
                            .fold(0.0, f64::max)
                    }
                    (None, None) => unreachable!(),
                };
                row.error = Some(err);
                row.roundoff = err <= floor;
            }
            Err(e) => row.failure = Some(e.to_string()),
        }
        if let (Some(prev), Some(e)) = (rows.last(), row.error) {
            if let Some(pe) = prev.error {
                if !row.roundoff && !prev.roundoff {
                    row.order = Some((pe / e).ln() / (prev.spacing / spacing).ln());
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AnalyticFn, DensitySpec, FormSpec, MetricSpec};
    use crate::geometry::{DomainSpec, Shape};

    fn quadratic_problem(n: usize, k: usize, shape: Shape, m: usize, psi: f64) -> ProblemSpec {
        ProblemSpec {
            domain: DomainSpec::new(n, shape, m).unwrap(),
            k,
            metric: MetricSpec::Identity,
            chi: FormSpec::Zero,
            psi: DensitySpec::Constant(psi),
            subsolution: AnalyticFn::Quadratic { scale: 1.0 },
            boundary: None,
            exact: Some(AnalyticFn::Quadratic { scale: 1.0 }),
        }
    }

    #[test]
    fn ball_quadratic_under_constant_one() {
        let spec = quadratic_problem(2, 2, Shape::Ball, 9, 1.0);
        let inst = spec.instantiate(None).unwrap();
        let eq = inst.equation().unwrap();
        let u = inst.exact.clone().unwrap();
        let v = ScalarField::constant(&inst.grid, 1.0);
        let r = max_principle_test(&eq, &u, &v, &inst.psi, 1e-9).unwrap();
        assert!(r.min_v_minus_u >= 0.0);
        // v = u + c has the same spectrum, which lies in the set
        let shifted = ScalarField::from_fn(&inst.grid, |z| 0.5 + z.iter().map(|x| x * x).sum::<f64>());
        assert!(matches!(max_principle_test(&eq, &u, &shifted, &inst.psi, 1e-9), Err(VerifyError::Precondition(_))));
    }

    #[test]
    fn trivial_member_measures() {
        let spec = quadratic_problem(2, 2, Shape::Box, 7, 1.0);
        let rows = c2_scaling_report(&[ScalingMember { parameter: 1.0, spec }], &SolverConfig::default());
        assert!(rows[0].failure.is_none());
        assert!((rows[0].hessian_sup - 2f64.sqrt()).abs() < 1e-8);
        let edge = 1.0 - 2.0 / 6.0;
        assert!((rows[0].k_value - (1.0 + 4.0 * edge * edge)).abs() < 1e-8);
        assert!(c2_scaling_report(&[], &SolverConfig::default()).is_empty());
        assert_eq!(scaling_spread(&rows), Some(1.0));
    }

    #[test]
    fn exact_quadratic_is_flagged_roundoff() {
        let spec = quadratic_problem(1, 1, Shape::Box, 5, 1.0);
        let rows = convergence_study(&spec, &[5, 9], &SolverConfig::default()).unwrap();
        assert!(rows.iter().all(|r| r.roundoff && r.order.is_none()));
    }

    #[test]
    fn one_dimensional_study_is_second_order() {
        let spec = ProblemSpec {
            domain: DomainSpec::new(1, Shape::Box, 9).unwrap(),
            k: 1,
            metric: MetricSpec::Identity,
            chi: FormSpec::Zero,
            psi: DensitySpec::Manufactured(AnalyticFn::QuarticBlend { quartic: 0.1 }),
            subsolution: AnalyticFn::QuarticBlend { quartic: 0.1 },
            boundary: None,
            exact: Some(AnalyticFn::QuarticBlend { quartic: 0.1 }),
        };
        let rows = convergence_study(&spec, &[9, 17], &SolverConfig::default()).unwrap();
        let order = rows[1].order.unwrap();
        assert!((1.7..=2.3).contains(&order), "{rows:?}");
    }

    #[test]
    fn finest_grid_reference() {
        let mut spec = quadratic_problem(1, 1, Shape::Box, 5, 1.0);
        spec.psi = DensitySpec::Constant(1.3);
        spec.subsolution = AnalyticFn::Quadratic { scale: 1.3 };
        spec.boundary = Some(AnalyticFn::Quadratic { scale: 1.3 });
        spec.exact = None;
        let rows = convergence_study(&spec, &[5, 9], &SolverConfig::default()).unwrap();
        assert!(rows[1].error.is_none());
        assert!(rows[0].error.unwrap() < 1e-8);
    }
}
