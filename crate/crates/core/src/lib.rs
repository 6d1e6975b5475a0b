//! Finite-difference solver and verification harness for the Dirichlet
//! problem of complex k-Hessian equations
//!
//! ```text
//! σ_k(λ(α⁻¹(χ + i∂∂̄u))) = ψ   in Ω,      u = φ   on ∂Ω,
//! ```
//!
//! on coordinate domains of `ℂⁿ` (`n ≤ 3`).
//!
//! * [`symcone`]: pointwise symmetric-function algebra and the `Γ_k` cone.
//! * [`geometry`]: grids, fields, and the complex Hessian stencil.
//! * [`solver`]: damped Newton, the continuity path, and the linear barrier.
//! * [`verify`]: randomized inequality certification and solver diagnostics.
//! * [`catalog`]: analytic functions used for data and manufactured solutions.

pub mod catalog;
pub mod geometry;
pub mod solver;
pub mod symcone;
pub mod verify;
