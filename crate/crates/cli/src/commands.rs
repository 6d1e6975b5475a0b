use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use khessian::geometry::io::{write_binary, write_csv};
use khessian::geometry::{GeometryError, Grid, ScalarField};
use khessian::solver::{
    build_linear_barrier, check_comparison, check_subsolution, continuity_solve, write_history_csv, ContinuityState,
    SolverError,
};
use khessian::verify::{convergence_study, max_principle_test, run_inequality_suite, SampleSpec, VerifyError};

use crate::config::{parse_config, ConfigError, FieldFormat, ProblemConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", join_config_errors(.0))]
    Config(Vec<ConfigError>),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Check(String),
}

fn join_config_errors(errs: &[ConfigError]) -> String {
    let lines: Vec<String> = errs.iter().map(|e| format!("  {e}")).collect();
    format!("configuration rejected:\n{}", lines.join("\n"))
}

impl CliError {
    /// 2 for bad input, 1 for numerical failures and failed checks.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } => 2,
            CliError::Verify(VerifyError::Spec(_)) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn load_config(path: &Path) -> Result<ProblemConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text).map_err(CliError::Config)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(io_err(path))
}

fn output_dir(cfg: &ProblemConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    Ok(dir)
}

fn write_field(dir: &Path, stem: &str, format: FieldFormat, grid: &Grid, field: &ScalarField) -> Result<PathBuf, CliError> {
    let path = dir.join(match format {
        FieldFormat::Csv => format!("{stem}.csv"),
        FieldFormat::Binary => format!("{stem}.bin"),
    });
    let mut w = create(&path)?;
    match format {
        FieldFormat::Csv => write_csv(grid, field, &mut w)?,
        FieldFormat::Binary => write_binary(grid, field, &mut w)?,
    }
    finish(w, &path)?;
    Ok(path)
}

fn write_history(dir: &Path, state: &ContinuityState) -> Result<(), CliError> {
    let path = dir.join("history.csv");
    let mut w = create(&path)?;
    write_history_csv(&state.iterates, &mut w).map_err(io_err(&path))?;
    finish(w, &path)?;

    let path = dir.join("stages.csv");
    let mut w = create(&path)?;
    let mut rows = || -> std::io::Result<()> {
        writeln!(w, "t,newton_iters,residual,min_margin,subsolution_slack")?;
        for s in &state.history {
            writeln!(w, "{},{},{},{},{}", s.t, s.newton_iters, s.residual, s.min_margin, s.subsolution_slack)?;
        }
        Ok(())
    };
    rows().map_err(io_err(&path))?;
    finish(w, &path)
}

/// Solves the configured problem; writes the solution, `history.csv`
/// (one row per Newton iterate) and `stages.csv` (one row per accepted `t`).
/// A failed continuation still leaves its partial history behind.
pub fn cmd_solve(config: &Path) -> Result<String, CliError> {
    let cfg = load_config(config)?;
    let inst = cfg.problem.instantiate(None)?;
    let eq = inst.equation()?;
    let dir = output_dir(&cfg)?;
    let state = match continuity_solve(&eq, &inst.subsolution, &inst.psi, &inst.phi, &cfg.solver) {
        Ok(state) => state,
        Err(SolverError::StepUnderflow { t, dt_min, state }) => {
            write_history(&dir, &state)?;
            return Err(SolverError::StepUnderflow { t, dt_min, state }.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_history(&dir, &state)?;
    let path = write_field(&dir, "solution", cfg.output.format, &inst.grid, &state.u)?;
    let residual = eq.evaluate(&state.u).residual_norm(&inst.psi);
    let newton: usize = state.history.iter().map(|s| s.newton_iters).sum();
    let mut msg = format!(
        "solved on {} interior points: {} stages, {} Newton iterations, final residual {residual:.3e}\nwrote {}",
        inst.grid.interior_len(),
        state.history.len(),
        newton,
        path.display()
    );
    if let Some(exact) = &inst.exact {
        msg += &format!("\nmax error against the exact solution {:.3e}", state.u.max_abs_diff(exact));
    }
    Ok(msg)
}

pub struct PropsArgs {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Runs the sampled inequality suite; fails with exit code 1 on any violation.
pub fn cmd_props(args: &PropsArgs) -> Result<String, CliError> {
    let spec = SampleSpec::new(args.n, args.k, args.samples, args.seed)?;
    let report = run_inequality_suite(&spec)?;
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        report.write_csv(&mut w, true).map_err(io_err(path))?;
        finish(w, path)?;
    }
    let summary = report.summary();
    if report.has_violations() {
        return Err(CliError::Check(format!("{summary}{} violations", report.total_violations())));
    }
    Ok(summary)
}

/// Mesh-refinement study; writes `convergence.csv`.
pub fn cmd_mms(config: &Path, resolutions: &[usize]) -> Result<String, CliError> {
    let cfg = load_config(config)?;
    if let Some(m) = resolutions.iter().find(|&&m| m < 3 || m % 2 == 0) {
        return Err(CliError::Usage(format!("resolution {m} must be odd and at least 3")));
    }
    let rows = convergence_study(&cfg.problem, resolutions, &cfg.solver)?;
    let dir = output_dir(&cfg)?;
    let path = dir.join("convergence.csv");
    let mut w = create(&path)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let mut table = String::new();
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "points_per_axis,spacing,error,order,roundoff,failure")?;
        for r in &rows {
            let failure = r.failure.as_deref().unwrap_or("").replace(',', ";");
            writeln!(w, "{},{},{},{},{},{failure}", r.points_per_axis, r.spacing, opt(r.error), opt(r.order), r.roundoff)?;
            table += &format!(
                "m = {:>3}  h = {:.4}  error = {:>10}  order = {:>6}{}\n",
                r.points_per_axis,
                r.spacing,
                r.error.map_or("-".into(), |e| format!("{e:.3e}")),
                r.order.map_or("-".into(), |o| format!("{o:.3}")),
                if r.roundoff { "  (round-off)" } else { "" }
            );
        }
        Ok(())
    };
    write().map_err(io_err(&path))?;
    finish(w, &path)?;
    if let Some(r) = rows.iter().find(|r| r.failure.is_some()) {
        return Err(CliError::Check(format!("{table}solve failed at m = {}: {}", r.points_per_axis, r.failure.as_ref().unwrap())));
    }
    Ok(format!("{table}wrote {}", path.display()))
}

/// Checks the subsolution, solves, builds the linear barrier, and runs the
/// comparison and maximum-principle checks against it.
pub fn cmd_verify(config: &Path) -> Result<String, CliError> {
    let cfg = load_config(config)?;
    let inst = cfg.problem.instantiate(None)?;
    let eq = inst.equation()?;
    let sub = check_subsolution(&eq, &inst.subsolution, &inst.psi, &inst.phi, cfg.solver.subsolution_tol)?;
    let mut lines = vec![format!(
        "subsolution: min margin {:.3e}, min slack {:.3e} at interior point {}",
        sub.min_margin, sub.min_slack, sub.worst_index
    )];
    let state = continuity_solve(&eq, &inst.subsolution, &inst.psi, &inst.phi, &cfg.solver)?;
    let u = &state.u;
    lines.push(format!("solve: {} stages, final residual {:.3e}", state.history.len(), eq.evaluate(u).residual_norm(&inst.psi)));
    let b = build_linear_barrier(&inst.alpha, &inst.chi, &inst.phi, &inst.grid, &cfg.solver)?;
    let h = inst.grid.spacing();
    let tol = 10.0 * h * h;
    let cmp = check_comparison(&inst.subsolution, u, &b);
    lines.push(format!(
        "comparison: max(sub - u) = {:.3e}, max(u - b) = {:.3e}, tolerance {tol:.3e}",
        cmp.sub_minus_u, cmp.u_minus_b
    ));
    let mp = max_principle_test(&eq, u, &b, &inst.psi, cfg.solver.newton_tol)?;
    lines.push(format!("maximum principle against the barrier: min(b - u) = {:.3e}", mp.min_v_minus_u));

    let dir = output_dir(&cfg)?;
    write_history(&dir, &state)?;
    write_field(&dir, "solution", cfg.output.format, &inst.grid, u)?;
    write_field(&dir, "barrier", cfg.output.format, &inst.grid, &b)?;
    let report = lines.join("\n");
    let path = dir.join("verify.txt");
    fs::write(&path, format!("{report}\n")).map_err(io_err(&path))?;

    let mut failed = Vec::new();
    if cmp.sub_minus_u > tol {
        failed.push("subsolution exceeds the solution");
    }
    if cmp.u_minus_b > tol {
        failed.push("solution exceeds the barrier");
    }
    if mp.min_v_minus_u < -tol {
        failed.push("maximum principle violated");
    }
    if !failed.is_empty() {
        return Err(CliError::Check(format!("{report}\nFAILED: {}", failed.join("; "))));
    }
    Ok(report)
}
