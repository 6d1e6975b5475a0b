//! Batch property harness: random-sample certification of the
//! symmetric-function inequalities, discrete maximum-principle checks, the
//! second-derivative scaling diagnostic and mesh-convergence studies.

mod pde;
mod report;
mod sampling;
mod suite;

use thiserror::Error;

pub use pde::{
    c2_scaling_report, convergence_study, max_principle_test, scaling_measures, scaling_spread, solve_problem, ConvergenceRow,
    MaxPrincipleReport, ScalingMember, ScalingRow, SolvedProblem,
};
pub use report::{CheckSummary, DiagnosticReport, SLACK_TOL};
pub use sampling::{random_unitary, SampleSpec, Sampler};
pub use suite::{run_inequality_suite, run_on_samples};

use crate::geometry::GeometryError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid sample specification: {0}")]
    Spec(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
