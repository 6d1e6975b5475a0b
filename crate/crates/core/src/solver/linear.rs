//! The frozen-coefficient operator `δu ↦ tr(C · i∂∂̄δu)` on interior values
//! with homogeneous boundary data, and its solvers.
//!
//! The non-divergence operator is symmetric only when the grid is uniform and
//! the coefficient is the same at every point; that case goes to conjugate
//! gradients on `−L`. Everything else uses BiCGStab. Both are Jacobi
//! preconditioned, and small systems fall back to dense LU on failure.

use rayon::prelude::*;

use super::{SolverConfig, SolverError};
use crate::geometry::stencil::MAX_LINES;
use crate::geometry::{line_weights, Grid, HermitianField, LineStencil, NodeRef, ScalarField};

const CHUNK: usize = 4096;

/// Sum in fixed-size blocks so the result does not depend on the thread count.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearMethod {
    ConjugateGradient,
    BiCgStab,
    DenseLu,
    Trivial,
}

/// Sparse rows of the discrete operator.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    diag: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    bnd_start: Vec<usize>,
    bnd_cols: Vec<u32>,
    bnd_vals: Vec<f64>,
    symmetric: bool,
}

impl LinearizedOperator {
    /// Assembles the operator for coefficient `coeff`, which must be positive
    /// definite at every interior point.
    pub fn new(grid: &Grid, coeff: &HermitianField) -> Result<Self, SolverError> {
        coeff.check(grid)?;
        let np = grid.interior_len();
        for p in 0..np {
            let c = coeff.at(p);
            if c.cholesky().is_none() {
                let min_eigenvalue = c.eigenvalues().last().copied().unwrap_or(f64::NAN);
                return Err(SolverError::EllipticityLoss {
                    index: p,
                    coords: grid.interior_point(p).to_vec(),
                    min_eigenvalue,
                });
            }
            if matches!(coeff, HermitianField::Constant(_)) {
                break;
            }
        }
        let lines = grid.lines().len();
        let rows: Vec<(f64, Vec<(u32, f64)>, Vec<(u32, f64)>)> = (0..np)
            .into_par_iter()
            .map(|p| {
                let mut w = [0.0; MAX_LINES];
                line_weights(coeff.at(p), grid.layout(), &mut w[..lines]);
                let mut diag = 0.0;
                let mut inner = Vec::with_capacity(2 * lines);
                let mut outer = Vec::new();
                for (l, &wl) in w.iter().enumerate().take(lines) {
                    if wl == 0.0 {
                        continue;
                    }
                    let s = LineStencil::new(grid, p, l);
                    diag += wl * s.c_center;
                    for (node, c) in [(s.back, s.c_back), (s.fwd, s.c_fwd)] {
                        match node {
                            NodeRef::Interior(i) => inner.push((i, wl * c)),
                            NodeRef::Boundary(b) => outer.push((b, wl * c)),
                        }
                    }
                }
                (diag, inner, outer)
            })
            .collect();
        let mut op = Self {
            diag: Vec::with_capacity(np),
            row_start: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
            bnd_start: vec![0],
            bnd_cols: Vec::new(),
            bnd_vals: Vec::new(),
            symmetric: false,
        };
        for (d, inner, outer) in rows {
            op.diag.push(d);
            for (c, v) in inner {
                op.cols.push(c);
                op.vals.push(v);
            }
            op.row_start.push(op.cols.len());
            for (c, v) in outer {
                op.bnd_cols.push(c);
                op.bnd_vals.push(v);
            }
            op.bnd_start.push(op.bnd_cols.len());
        }
        let uniform_coeff = match coeff {
            HermitianField::Constant(_) => true,
            HermitianField::PerPoint(v) => v.iter().all(|c| c == &v[0]),
        };
        op.symmetric = grid.is_uniform() && uniform_coeff;
        Ok(op)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `out = L x` for interior values `x` and zero boundary values.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, block)| {
            let base = chunk * CHUNK;
            for (i, o) in block.iter_mut().enumerate() {
                let p = base + i;
                let mut s = self.diag[p] * x[p];
                for e in self.row_start[p]..self.row_start[p + 1] {
                    s += self.vals[e] * x[self.cols[e] as usize];
                }
                *o = s;
            }
        });
    }

    /// Contribution of boundary values to `L` at each interior point.
    pub fn apply_boundary(&self, boundary: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|p| {
                (self.bnd_start[p]..self.bnd_start[p + 1])
                    .map(|e| self.bnd_vals[e] * boundary[self.bnd_cols[e] as usize])
                    .sum()
            })
            .collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut a = vec![0.0; n * n];
        for p in 0..n {
            a[p * n + p] += self.diag[p];
            for e in self.row_start[p]..self.row_start[p + 1] {
                a[p * n + self.cols[e] as usize] += self.vals[e];
            }
        }
        a
    }

    /// Solves `L x = rhs`.
    pub fn solve(&self, rhs: &[f64], cfg: &SolverConfig) -> Result<LinearSolution, SolverError> {
        let n = self.len();
        let bnorm = norm(rhs);
        if bnorm == 0.0 {
            return Ok(LinearSolution::new(vec![0.0; n], 0, 0.0, LinearMethod::Trivial));
        }
        let attempt = if self.symmetric { self.cg(rhs, bnorm, cfg) } else { self.bicgstab(rhs, bnorm, cfg) };
        match attempt {
            Ok(sol) => Ok(sol),
            Err(err) if n <= cfg.dense_limit => self.dense(rhs, bnorm).ok_or(err),
            Err(err) => Err(err),
        }
    }

    fn relative_residual(&self, x: &[f64], rhs: &[f64], bnorm: f64) -> f64 {
        let mut r = vec![0.0; x.len()];
        self.apply(x, &mut r);
        r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri = bi - *ri);
        norm(&r) / bnorm
    }

    fn cg(&self, rhs: &[f64], bnorm: f64, cfg: &SolverConfig) -> Result<LinearSolution, SolverError> {
        // work with A = −L, which is symmetric positive definite
        let n = self.len();
        let inv_diag: Vec<f64> = self.diag.iter().map(|d| -1.0 / d).collect();
        let b: Vec<f64> = rhs.iter().map(|v| -v).collect();
        let mut x = vec![0.0; n];
        let mut r = b.clone();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, m)| a * m).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let target = cfg.linear_tol * bnorm;
        for it in 1..=cfg.linear_max_iters {
            self.apply(&p, &mut ap);
            ap.iter_mut().for_each(|v| *v = -*v);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                break;
            }
            let a = rz / pap;
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += a * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= a * api);
            if norm(&r) <= target {
                let res = self.relative_residual(&x, rhs, bnorm);
                if res <= cfg.linear_tol {
                    return Ok(LinearSolution::new(x, it, res, LinearMethod::ConjugateGradient));
                }
            }
            z.iter_mut().zip(r.iter().zip(&inv_diag)).for_each(|(zi, (ri, m))| *zi = ri * m);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        Err(SolverError::LinearSolve {
            achieved: self.relative_residual(&x, rhs, bnorm),
            iterations: cfg.linear_max_iters,
        })
    }

    fn bicgstab(&self, rhs: &[f64], bnorm: f64, cfg: &SolverConfig) -> Result<LinearSolution, SolverError> {
        let n = self.len();
        let inv_diag: Vec<f64> = self.diag.iter().map(|d| 1.0 / d).collect();
        let precond = |v: &[f64], out: &mut [f64]| {
            out.iter_mut().zip(v.iter().zip(&inv_diag)).for_each(|(o, (a, m))| *o = a * m);
        };
        let target = cfg.linear_tol * bnorm;
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut iterations = 0;
        // restart on breakdown, from the current iterate
        'restart: while iterations < cfg.linear_max_iters {
            let r_hat = r.clone();
            let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
            let mut v = vec![0.0; n];
            let mut p = vec![0.0; n];
            let mut y = vec![0.0; n];
            let mut s = vec![0.0; n];
            let mut zs = vec![0.0; n];
            let mut t = vec![0.0; n];
            while iterations < cfg.linear_max_iters {
                iterations += 1;
                let rho_new = dot(&r_hat, &r);
                if rho_new.abs() < 1e-300 || omega == 0.0 {
                    r = self.residual_vec(&x, rhs);
                    continue 'restart;
                }
                let beta = (rho_new / rho) * (alpha / omega);
                rho = rho_new;
                p.iter_mut()
                    .zip(r.iter().zip(&v))
                    .for_each(|(pi, (ri, vi))| *pi = ri + beta * (*pi - omega * vi));
                precond(&p, &mut y);
                self.apply(&y, &mut v);
                let rv = dot(&r_hat, &v);
                if rv.abs() < 1e-300 {
                    r = self.residual_vec(&x, rhs);
                    continue 'restart;
                }
                alpha = rho / rv;
                s.iter_mut().zip(r.iter().zip(&v)).for_each(|(si, (ri, vi))| *si = ri - alpha * vi);
                if norm(&s) <= target {
                    x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi += alpha * yi);
                    if let Some(sol) = self.accept(&x, rhs, bnorm, iterations, cfg) {
                        return Ok(sol);
                    }
                    r = self.residual_vec(&x, rhs);
                    continue 'restart;
                }
                precond(&s, &mut zs);
                self.apply(&zs, &mut t);
                let tt = dot(&t, &t);
                omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
                x.iter_mut()
                    .zip(y.iter().zip(&zs))
                    .for_each(|(xi, (yi, zi))| *xi += alpha * yi + omega * zi);
                r.iter_mut().zip(s.iter().zip(&t)).for_each(|(ri, (si, ti))| *ri = si - omega * ti);
                if norm(&r) <= target {
                    if let Some(sol) = self.accept(&x, rhs, bnorm, iterations, cfg) {
                        return Ok(sol);
                    }
                    r = self.residual_vec(&x, rhs);
                    continue 'restart;
                }
            }
        }
        Err(SolverError::LinearSolve { achieved: self.relative_residual(&x, rhs, bnorm), iterations })
    }

    fn residual_vec(&self, x: &[f64], rhs: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; x.len()];
        self.apply(x, &mut r);
        r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri = bi - *ri);
        r
    }

    /// Confirms convergence with the true residual.
    fn accept(&self, x: &[f64], rhs: &[f64], bnorm: f64, it: usize, cfg: &SolverConfig) -> Option<LinearSolution> {
        let res = self.relative_residual(x, rhs, bnorm);
        (res <= cfg.linear_tol).then(|| LinearSolution::new(x.to_vec(), it, res, LinearMethod::BiCgStab))
    }

    fn dense(&self, rhs: &[f64], bnorm: f64) -> Option<LinearSolution> {
        let x = dense_solve(self.to_dense(), rhs.to_vec(), self.len())?;
        let res = self.relative_residual(&x, rhs, bnorm);
        Some(LinearSolution::new(x, 1, res, LinearMethod::DenseLu))
    }
}

/// Gaussian elimination with partial pivoting on a row-major matrix.
pub(crate) fn dense_solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= f * a[col * n + j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|j| a[row * n + j] * x[j]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[derive(Clone, Debug)]
pub struct LinearSolution {
    /// Interior values of `δu`; the boundary is zero.
    pub interior: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub method: LinearMethod,
}

impl LinearSolution {
    fn new(interior: Vec<f64>, iterations: usize, relative_residual: f64, method: LinearMethod) -> Self {
        Self { interior, iterations, relative_residual, method }
    }

    pub fn to_field(&self, grid: &Grid) -> ScalarField {
        ScalarField { interior: self.interior.clone(), boundary: vec![0.0; grid.boundary_len()] }
    }
}

/// Solves `tr(coeff · i∂∂̄δu) = rhs` on the interior with `δu = 0` on the
/// boundary. Only the interior of `rhs` is read.
pub fn linearized_solve(
    coeff: &HermitianField,
    rhs: &ScalarField,
    grid: &Grid,
    cfg: &SolverConfig,
) -> Result<LinearSolution, SolverError> {
    rhs.check(grid)?;
    LinearizedOperator::new(grid, coeff)?.solve(&rhs.interior, cfg)
}
