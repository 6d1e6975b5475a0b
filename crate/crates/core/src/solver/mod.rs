//! Continuity method with damped, cone-preserving Newton iterations, the
//! linear barrier, and the comparison check `u̲ ≤ u ≤ b`.

mod barrier;
mod config;
mod continuity;
mod equation;
mod linear;
mod newton;

use thiserror::Error;

pub use barrier::{build_linear_barrier, check_comparison, ComparisonReport};
pub use config::SolverConfig;
pub use continuity::{check_subsolution, continuity_solve, ContinuityState, StageRecord, SubsolutionReport};
pub use equation::{Equation, PointState};
pub use linear::{linearized_solve, LinearMethod, LinearSolution, LinearizedOperator};
pub use newton::{newton_solve, write_history_csv, IterateRecord, NewtonOutcome};

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("order k = {k} outside 1..={n}")]
    Order { k: usize, n: usize },
    #[error("iterate not admissible at interior point {index} (z = {coords:?}, margin {margin:.3e})")]
    NotAdmissible { index: usize, coords: Vec<f64>, margin: f64 },
    #[error("ellipticity lost at interior point {index} (z = {coords:?}, smallest coefficient eigenvalue {min_eigenvalue:.3e})")]
    EllipticityLoss { index: usize, coords: Vec<f64>, min_eigenvalue: f64 },
    #[error("linear solver did not converge: relative residual {achieved:.3e} after {iterations} iterations")]
    LinearSolve { achieved: f64, iterations: usize },
    #[error("Newton exceeded {iterations} iterations (residual {residual:.3e})")]
    MaxIterations { iterations: usize, residual: f64, history: Vec<IterateRecord> },
    #[error("Newton damping reached its floor (residual {residual:.3e})")]
    DampingFloor { residual: f64, history: Vec<IterateRecord> },
    #[error("subsolution check failed at interior point {index} (z = {coords:?}): {reason}")]
    Subsolution { index: usize, coords: Vec<f64>, reason: String },
    #[error("subsolution does not match boundary data at boundary point {index} (deviation {deviation:.3e})")]
    BoundaryMismatch { index: usize, deviation: f64 },
    #[error("continuation step fell below {dt_min:e} at t = {t}")]
    StepUnderflow { t: f64, dt_min: f64, state: Box<ContinuityState> },
}
