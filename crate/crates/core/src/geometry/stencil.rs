use num_complex::Complex64;
use rayon::prelude::*;

use super::{GeometryError, GradientField, Grid, HermitianField, HessianLayout, NodeRef, ScalarField, SpectrumField};
use crate::symcone::{HermitianMatrix, MetricFactor};

/// Upper bound on the number of lattice lines (n = 3: 6 axes + 24 diagonals).
pub(crate) const MAX_LINES: usize = 32;

/// Three-point second difference along one line at one interior point.
#[derive(Clone, Copy, Debug)]
pub struct LineStencil {
    pub back: NodeRef,
    pub fwd: NodeRef,
    pub c_back: f64,
    pub c_fwd: f64,
    pub c_center: f64,
}

impl LineStencil {
    /// Nonuniform steps `θ₋ h`, `θ₊ h`; exact on quadratics along the line.
    #[inline]
    pub fn new(grid: &Grid, p: usize, l: usize) -> Self {
        let (back, fwd) = grid.neighbors(p, l);
        let (tb, tf) = grid.fractions(p, l);
        let h2 = grid.spacing() * grid.spacing();
        let c_fwd = 2.0 / (h2 * tf * (tf + tb));
        let c_back = 2.0 / (h2 * tb * (tf + tb));
        Self { back, fwd, c_back, c_fwd, c_center: -(c_fwd + c_back) }
    }

    #[inline]
    pub fn apply(&self, u: &ScalarField, center: f64) -> f64 {
        self.c_back * value(u, self.back) + self.c_fwd * value(u, self.fwd) + self.c_center * center
    }
}

#[inline]
pub(crate) fn value(u: &ScalarField, r: NodeRef) -> f64 {
    match r {
        NodeRef::Interior(i) => u.interior[i as usize],
        NodeRef::Boundary(b) => u.boundary[b as usize],
    }
}

/// `D_ℓ u(p)` for every line `ℓ`.
pub(crate) fn line_second_differences(grid: &Grid, u: &ScalarField, p: usize, out: &mut [f64]) {
    let center = u.interior[p];
    for (l, d) in out.iter_mut().enumerate().take(grid.lines().len()) {
        *d = LineStencil::new(grid, p, l).apply(u, center);
    }
}

/// Assembles `u_{j k̄}` from the line second differences.
///
/// `u_{j k̄} = ¼[(u_{x^j x^k} + u_{y^j y^k}) + i(u_{x^j y^k} − u_{y^j x^k})]`.
pub fn hessian_from_lines(n: usize, layout: &HessianLayout, d: &[f64]) -> HermitianMatrix {
    let mixed = |a: usize, b: usize| {
        let (plus, minus) = layout.mixed_lines(a, b);
        0.25 * (d[plus] - d[minus])
    };
    HermitianMatrix::from_upper(n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        if j == k {
            Complex64::new(0.25 * (d[layout.axes[xj]] + d[layout.axes[yj]]), 0.0)
        } else {
            Complex64::new(
                0.25 * (mixed(xj, xk) + mixed(yj, yk)),
                0.25 * (mixed(xj, yk) - mixed(yj, xk)),
            )
        }
    })
}

/// Line weights `w` with `Σ_ℓ w_ℓ D_ℓ u = tr(C · i∂∂̄u)`: the adjoint of
/// [`hessian_from_lines`] for a Hermitian coefficient `C`.
pub fn line_weights(c: &HermitianMatrix, layout: &HessianLayout, out: &mut [f64]) {
    out.fill(0.0);
    let n = c.dim();
    for j in 0..n {
        let cjj = c.get(j, j).re;
        out[layout.axes[2 * j]] += 0.25 * cjj;
        out[layout.axes[2 * j + 1]] += 0.25 * cjj;
        for k in j + 1..n {
            let cjk = c.get(j, k);
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            // tr(C B) picks up 2 Re(C_jk conj(B_jk)) from the (j,k) pair, and
            // each mixed derivative is (D₊ − D₋)/4
            for (a, b, coef) in [
                (xj, xk, 0.5 * cjk.re),
                (yj, yk, 0.5 * cjk.re),
                (xj, yk, 0.5 * cjk.im),
                (yj, xk, -0.5 * cjk.im),
            ] {
                let (plus, minus) = layout.mixed_lines(a, b);
                out[plus] += 0.25 * coef;
                out[minus] -= 0.25 * coef;
            }
        }
    }
}

/// `i∂∂̄u` at interior point `p`.
pub fn complex_hessian_at(grid: &Grid, u: &ScalarField, p: usize) -> HermitianMatrix {
    let mut d = [0.0; MAX_LINES];
    line_second_differences(grid, u, p, &mut d);
    hessian_from_lines(grid.n(), grid.layout(), &d)
}

/// `i∂∂̄u` at every interior point. Exactly Hermitian by construction.
pub fn complex_hessian(u: &ScalarField, grid: &Grid) -> HermitianField {
    let values = (0..grid.interior_len())
        .into_par_iter()
        .map(|p| complex_hessian_at(grid, u, p))
        .collect();
    HermitianField::PerPoint(values)
}

/// Centered first differences, assembled into `∂u/∂z^j = ½(u_{x^j} − i u_{y^j})`.
pub fn gradient(u: &ScalarField, grid: &Grid) -> GradientField {
    let n = grid.n();
    let h = grid.spacing();
    let layout = grid.layout();
    let values: Vec<Complex64> = (0..grid.interior_len())
        .into_par_iter()
        .flat_map_iter(|p| {
            let u0 = u.interior[p];
            let mut real = [0.0; 6];
            for (a, r) in real.iter_mut().enumerate().take(2 * n) {
                let l = layout.axes[a];
                let (back, fwd) = grid.neighbors(p, l);
                let (tb, tf) = grid.fractions(p, l);
                let (um, up) = (value(u, back), value(u, fwd));
                *r = (tb * tb * (up - u0) + tf * tf * (u0 - um)) / (h * tf * tb * (tf + tb));
            }
            (0..n).map(move |j| Complex64::new(0.5 * real[2 * j], -0.5 * real[2 * j + 1]))
        })
        .collect();
    GradientField::new(n, values)
}

/// Eigenvalues of `h = α⁻¹(χ + i∂∂̄u)` at every interior point, descending.
pub fn endomorphism_spectrum(
    alpha: &HermitianField,
    chi: &HermitianField,
    u: &ScalarField,
    grid: &Grid,
) -> Result<SpectrumField, GeometryError> {
    alpha.check(grid)?;
    chi.check(grid)?;
    u.check(grid)?;
    let n = grid.n();
    let constant = match alpha {
        HermitianField::Constant(a) => Some(
            MetricFactor::new(a).map_err(|_| GeometryError::MetricNotPositive { index: 0, coords: grid.interior_point(0).to_vec() })?,
        ),
        HermitianField::PerPoint(_) => None,
    };
    let per_point: Result<Vec<Vec<f64>>, GeometryError> = (0..grid.interior_len())
        .into_par_iter()
        .map(|p| {
            let factor = match constant {
                Some(f) => f,
                None => MetricFactor::new(alpha.at(p)).map_err(|_| GeometryError::MetricNotPositive {
                    index: p,
                    coords: grid.interior_point(p).to_vec(),
                })?,
            };
            let form = chi.at(p).add(&complex_hessian_at(grid, u, p));
            Ok(factor.reduce(&form).eigen().values().to_vec())
        })
        .collect();
    let values = per_point?.into_iter().flatten().collect();
    Ok(SpectrumField::new(n, values))
}
