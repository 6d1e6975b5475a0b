//! Discrete domains in `ℂⁿ`, grid functions, and the complex Hessian stencil.
//!
//! Real coordinates are ordered `(x¹, y¹, x², y², …)` with `z^j = x^j + i y^j`.
//! Every second derivative is a three-point difference along a lattice line:
//! the coordinate axes for pure derivatives and the diagonals `e_a ± e_b` for
//! mixed ones, with `∂_a∂_b u = (D_{a+b} u − D_{a−b} u)/4`. On the ball, a
//! line that leaves the domain is cut at the sphere (Shortley–Weller), so the
//! stencil stays exact on quadratics everywhere.

mod field;
mod grid;
pub mod io;
pub(crate) mod stencil;

use thiserror::Error;

pub use field::{GradientField, HermitianField, ScalarField, SpectrumField};
pub use grid::{DomainSpec, Grid, HessianLayout, LineDir, NodeRef, Shape};
pub use stencil::{
    complex_hessian, complex_hessian_at, endomorphism_spectrum, gradient, hessian_from_lines,
    line_weights, LineStencil,
};

use crate::symcone::SymconeError;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("complex dimension {0} outside 1..=3")]
    Dimension(usize),
    #[error("points per axis must be odd and at least {min}, got {got}")]
    Resolution { got: usize, min: usize },
    #[error("grid has no interior point")]
    NoInterior,
    #[error("grid with {0} lattice nodes exceeds the supported size")]
    TooLarge(usize),
    #[error("field length {got} does not match grid ({expected})")]
    Length { expected: usize, got: usize },
    #[error("metric is not positive definite at interior point {index} (z = {coords:?})")]
    MetricNotPositive { index: usize, coords: Vec<f64> },
    #[error("non-finite value at interior point {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Symcone(#[from] SymconeError),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
