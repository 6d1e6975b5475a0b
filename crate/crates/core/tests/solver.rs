use approx::assert_abs_diff_eq;
use khessian::catalog::{AnalyticFn, DensitySpec, FormSpec, MetricSpec, ProblemSpec};
use khessian::geometry::{DomainSpec, ScalarField, Shape};
use khessian::solver::{build_linear_barrier, continuity_solve, newton_solve, SolverConfig, SolverError};
use khessian::verify::{max_principle_test, solve_problem};

fn spec(n: usize, k: usize, shape: Shape, m: usize) -> ProblemSpec {
    ProblemSpec {
        domain: DomainSpec::new(n, shape, m).unwrap(),
        k,
        metric: MetricSpec::Identity,
        chi: FormSpec::Zero,
        psi: DensitySpec::Constant(1.0),
        subsolution: AnalyticFn::Quadratic { scale: 1.0 },
        boundary: None,
        exact: None,
    }
}

#[test]
fn conformal_metric_manufactured_solution() {
    let star = AnalyticFn::QuarticBlend { quartic: 0.1 };
    let mut p = spec(2, 2, Shape::Box, 9);
    p.metric = MetricSpec::Conformal(0.2);
    p.chi = FormSpec::Scaled(0.3);
    p.psi = DensitySpec::Manufactured(star.clone());
    p.subsolution = star.clone();
    p.exact = Some(star);
    let solved = solve_problem(&p, None, &SolverConfig::default()).unwrap();
    let h = solved.instance.grid.spacing();
    assert!(solved.state.history.last().unwrap().residual <= 1e-9);
    assert!(solved.state.u.max_abs_diff(solved.instance.exact.as_ref().unwrap()) < h * h);
}

#[test]
fn nontrivial_path_reaches_lower_density() {
    // u̲ = |z|² has σ₂ = 1 ≥ ψ = 0.3, so the path moves away from u̲
    let mut p = spec(2, 2, Shape::Box, 9);
    p.psi = DensitySpec::Constant(0.3);
    let solved = solve_problem(&p, None, &SolverConfig::default()).unwrap();
    let st = &solved.state;
    assert_eq!(st.t, 1.0);
    assert!(st.history.len() >= 5);
    assert!(st.iterates.iter().all(|(_, r)| r.min_margin > 0.0));
    for w in st.history.windows(2) {
        assert!(w[1].t > w[0].t);
    }
    // the solution lies above the subsolution and below the harmonic barrier
    let inst = &solved.instance;
    let b = build_linear_barrier(&inst.alpha, &inst.chi, &inst.phi, &inst.grid, &SolverConfig::default()).unwrap();
    for p in 0..inst.grid.interior_len() {
        assert!(st.u.interior[p] >= inst.subsolution.interior[p] - 1e-10);
        assert!(st.u.interior[p] <= b.interior[p] + 1e-10);
    }
}

#[test]
fn barrier_passes_the_comparison_harness() {
    let mut p = spec(2, 2, Shape::Box, 9);
    p.psi = DensitySpec::Constant(0.5);
    let solved = solve_problem(&p, None, &SolverConfig::default()).unwrap();
    let inst = &solved.instance;
    let eq = inst.equation().unwrap();
    let b = build_linear_barrier(&inst.alpha, &inst.chi, &inst.phi, &inst.grid, &SolverConfig::default()).unwrap();
    let r = max_principle_test(&eq, &solved.state.u, &b, &inst.psi, 1e-9).unwrap();
    let h = inst.grid.spacing();
    assert!(r.min_v_minus_u >= -10.0 * h * h);
}

#[test]
fn linear_case_returns_the_subsolution() {
    // k = 1 with σ₁(λ̲) = ψ: the solution is u̲ itself, below the barrier
    let mut p = spec(1, 1, Shape::Ball, 11);
    p.chi = FormSpec::Scaled(1.0);
    p.psi = DensitySpec::Constant(2.0);
    let solved = solve_problem(&p, None, &SolverConfig::default()).unwrap();
    let inst = &solved.instance;
    let b = build_linear_barrier(&inst.alpha, &inst.chi, &inst.phi, &inst.grid, &SolverConfig::default()).unwrap();
    for ((u, sub), bar) in solved.state.u.interior.iter().zip(&inst.subsolution.interior).zip(&b.interior) {
        assert_abs_diff_eq!(*u, *sub, epsilon = 1e-12);
        assert!(u <= bar);
    }
}

#[test]
fn dt_underflow_is_reported_with_history() {
    let p = spec(2, 2, Shape::Box, 7);
    let inst = p.instantiate(None).unwrap();
    let eq = inst.equation().unwrap();
    let psi = ScalarField::constant(&inst.grid, 0.2);
    // one Newton iteration per stage cannot reach the tolerance
    let cfg = SolverConfig { max_newton_iters: 1, newton_tol: 1e-14, dt_min: 0.1, ..Default::default() };
    match continuity_solve(&eq, &inst.subsolution, &psi, &inst.phi, &cfg) {
        Err(SolverError::StepUnderflow { state, .. }) => {
            assert!(!state.rejected.is_empty());
            assert_eq!(state.history[0].t, 0.0);
        }
        other => panic!("unexpected {:?}", other.map(|s| s.t)),
    }
}

#[test]
fn newton_reports_iteration_limit() {
    let p = spec(2, 2, Shape::Box, 7);
    let inst = p.instantiate(None).unwrap();
    let eq = inst.equation().unwrap();
    let psi = ScalarField::constant(&inst.grid, 0.2);
    let cfg = SolverConfig { max_newton_iters: 1, ..Default::default() };
    match newton_solve(&eq, &inst.subsolution, &psi, &cfg) {
        Err(SolverError::MaxIterations { history, .. }) => assert_eq!(history.len(), 2),
        other => panic!("unexpected {:?}", other.map(|o| o.iterations)),
    }
}
