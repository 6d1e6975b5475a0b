use super::{newton_solve, Equation, IterateRecord, SolverConfig, SolverError};
use crate::geometry::ScalarField;

/// Summary of one accepted continuation stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageRecord {
    pub t: f64,
    pub newton_iters: usize,
    pub residual: f64,
    pub min_margin: f64,
    /// `min (σ_k(λ̲) − ψ_t)` over the interior.
    pub subsolution_slack: f64,
}

#[derive(Clone, Debug)]
pub struct ContinuityState {
    pub t: f64,
    pub u: ScalarField,
    pub psi_t: ScalarField,
    pub history: Vec<StageRecord>,
    /// Every accepted Newton iterate, tagged with its stage parameter.
    pub iterates: Vec<(f64, IterateRecord)>,
    /// Attempted stage parameters whose Newton solve failed, with the reason.
    pub rejected: Vec<(f64, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsolutionReport {
    pub min_margin: f64,
    /// `min (σ_k(λ̲) − ψ)` and where it occurs.
    pub min_slack: f64,
    pub worst_index: usize,
}

/// Checks `λ̲ ∈ Γ_k`, `σ_k(λ̲) ≥ ψ − tol` pointwise and `u̲ = φ` on the boundary.
pub fn check_subsolution(
    eq: &Equation<'_>,
    sub: &ScalarField,
    psi: &ScalarField,
    phi: &[f64],
    tol: f64,
) -> Result<SubsolutionReport, SolverError> {
    let grid = eq.grid();
    sub.check(grid)?;
    psi.check(grid)?;
    if phi.len() != grid.boundary_len() {
        return Err(crate::geometry::GeometryError::Length { expected: grid.boundary_len(), got: phi.len() }.into());
    }
    if let Some((index, deviation)) = sub
        .boundary
        .iter()
        .zip(phi)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .enumerate()
        .find(|(_, d)| !(*d <= 1e-12))
    {
        return Err(SolverError::BoundaryMismatch { index, deviation });
    }
    let eval = eq.evaluate(sub);
    let (mi, min_margin) = eval.min_margin();
    if !(min_margin > 0.0) {
        return Err(SolverError::Subsolution {
            index: mi,
            coords: grid.interior_point(mi).to_vec(),
            reason: format!("eigenvalues leave Γ_{} (margin {min_margin:.3e})", eq.k()),
        });
    }
    let (worst_index, min_slack) = eval
        .sigma
        .iter()
        .zip(&psi.interior)
        .map(|(s, f)| s - f)
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best });
    if !(min_slack >= -tol) {
        return Err(SolverError::Subsolution {
            index: worst_index,
            coords: grid.interior_point(worst_index).to_vec(),
            reason: format!(
                "σ_{} = {} is below ψ = {} by {:.3e}",
                eq.k(),
                eval.sigma[worst_index],
                psi.interior[worst_index],
                -min_slack
            ),
        });
    }
    Ok(SubsolutionReport { min_margin, min_slack, worst_index })
}

/// Follows `ψ_t = tψ + (1 − t)σ_k(λ̲)` from `t = 0`, where `u̲` is an exact
/// solution, to `t = 1`, warm-starting Newton from the previous stage.
pub fn continuity_solve(
    eq: &Equation<'_>,
    sub: &ScalarField,
    psi: &ScalarField,
    phi: &[f64],
    cfg: &SolverConfig,
) -> Result<ContinuityState, SolverError> {
    cfg.validate()?;
    check_subsolution(eq, sub, psi, phi, cfg.subsolution_tol)?;
    let sigma_sub = eq.evaluate(sub).sigma;
    let psi_at = |t: f64| ScalarField {
        interior: psi.interior.iter().zip(&sigma_sub).map(|(f, s)| t * f + (1.0 - t) * s).collect(),
        boundary: psi.boundary.clone(),
    };
    let slack_at = |psi_t: &ScalarField| {
        sigma_sub.iter().zip(&psi_t.interior).fold(f64::INFINITY, |m, (s, f)| m.min(s - f))
    };

    let start = sub.with_boundary(phi.to_vec());
    let psi0 = psi_at(0.0);
    let first = newton_solve(eq, &start, &psi0, cfg)?;
    let mut state = ContinuityState {
        t: 0.0,
        u: first.u,
        history: vec![StageRecord {
            t: 0.0,
            newton_iters: first.iterations,
            residual: first.residual,
            min_margin: first.history.last().map_or(f64::NAN, |r| r.min_margin),
            subsolution_slack: slack_at(&psi0),
        }],
        iterates: first.history.iter().map(|r| (0.0, *r)).collect(),
        psi_t: psi0,
        rejected: Vec::new(),
    };

    let mut dt = cfg.continuity_dt0;
    while state.t < 1.0 {
        let t_next = if state.t + dt >= 1.0 { 1.0 } else { state.t + dt };
        let psi_next = psi_at(t_next);
        match newton_solve(eq, &state.u, &psi_next, cfg) {
            Ok(out) => {
                state.history.push(StageRecord {
                    t: t_next,
                    newton_iters: out.iterations,
                    residual: out.residual,
                    min_margin: out.history.last().map_or(f64::NAN, |r| r.min_margin),
                    subsolution_slack: slack_at(&psi_next),
                });
                state.iterates.extend(out.history.iter().map(|r| (t_next, *r)));
                if out.iterations <= cfg.fast_stage_iters {
                    dt = (dt * cfg.dt_growth).min(cfg.continuity_dt0);
                }
                state.t = t_next;
                state.u = out.u;
                state.psi_t = psi_next;
            }
            Err(
                e @ (SolverError::MaxIterations { .. }
                | SolverError::DampingFloor { .. }
                | SolverError::LinearSolve { .. }
                | SolverError::EllipticityLoss { .. }),
            ) => {
                state.rejected.push((t_next, e.to_string()));
                dt *= 0.5;
                if dt < cfg.dt_min {
                    let (t, dt_min) = (state.t, cfg.dt_min);
                    return Err(SolverError::StepUnderflow { t, dt_min, state: Box::new(state) });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(state)
}
