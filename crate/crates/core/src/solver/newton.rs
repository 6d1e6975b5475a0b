use std::io::Write;

use super::{Equation, LinearizedOperator, SolverConfig, SolverError};
use crate::geometry::ScalarField;

/// One accepted Newton iterate; iteration 0 is the starting point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateRecord {
    pub iteration: usize,
    /// L∞ residual after the step.
    pub residual: f64,
    /// Smallest `Γ_k` margin over the interior after the step.
    pub min_margin: f64,
    /// Accepted step length (0 for the starting point).
    pub step: f64,
    pub linear_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub u: ScalarField,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<IterateRecord>,
}

/// Damped Newton for `σ_k(λ(u)) = ψ` with the boundary values of `u0` held
/// fixed. A step is halved until the residual drops by the configured factor
/// and every interior point stays in `Γ_k`.
pub fn newton_solve(
    eq: &Equation<'_>,
    u0: &ScalarField,
    psi: &ScalarField,
    cfg: &SolverConfig,
) -> Result<NewtonOutcome, SolverError> {
    let grid = eq.grid();
    u0.check(grid)?;
    psi.check(grid)?;
    let mut u = u0.clone();
    let (mut coeff, mut eval) = eq.linearize(&u);
    let (worst, margin) = eval.min_margin();
    if !(margin > 0.0) {
        return Err(SolverError::NotAdmissible { index: worst, coords: grid.interior_point(worst).to_vec(), margin });
    }
    let mut residual = eval.residual_norm(psi);
    let mut history =
        vec![IterateRecord { iteration: 0, residual, min_margin: margin, step: 0.0, linear_iterations: 0 }];
    let mut iterations = 0;
    while residual > cfg.newton_tol {
        if iterations == cfg.max_newton_iters {
            return Err(SolverError::MaxIterations { iterations, residual, history });
        }
        let rhs: Vec<f64> = psi.interior.iter().zip(&eval.sigma).map(|(f, s)| f - s).collect();
        let delta = LinearizedOperator::new(grid, &coeff)?.solve(&rhs, cfg)?;
        let mut step = 1.0;
        let accepted = loop {
            let trial = u.axpy_interior(step, &delta.interior);
            let trial_eval = eq.evaluate(&trial);
            let r = trial_eval.residual_norm(psi);
            if trial_eval.admissible() && (r <= cfg.sufficient_decrease * residual || r <= cfg.newton_tol) {
                break trial;
            }
            step *= cfg.backtrack_factor;
            if step < cfg.min_step {
                return Err(SolverError::DampingFloor { residual, history });
            }
        };
        u = accepted;
        iterations += 1;
        (coeff, eval) = eq.linearize(&u);
        residual = eval.residual_norm(psi);
        history.push(IterateRecord {
            iteration: iterations,
            residual,
            min_margin: eval.min_margin().1,
            step,
            linear_iterations: delta.iterations,
        });
    }
    Ok(NewtonOutcome { u, iterations, residual, history })
}

/// Writes `t,newton_iter,residual,min_margin,step` rows.
pub fn write_history_csv<W: Write>(rows: &[(f64, IterateRecord)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,newton_iter,residual,min_margin,step")?;
    for (t, r) in rows {
        writeln!(out, "{t},{},{},{},{}", r.iteration, r.residual, r.min_margin, r.step)?;
    }
    Ok(())
}
