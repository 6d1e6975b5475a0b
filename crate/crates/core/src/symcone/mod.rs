//! Pointwise algebra of elementary symmetric polynomials.
//!
//! `σ_k` on real vectors and on Hermitian matrices, membership in the Gårding
//! cone `Γ_k = {σ_1 > 0, …, σ_k > 0}`, the derivative of `σ_k` as a function
//! of a Hermitian matrix, and slack evaluators for the symmetric-function
//! inequalities used by the a priori estimates.
//!
//! Everything here is a pure function of its inputs.

mod hermitian;
mod inequalities;
mod poly;

use thiserror::Error;

pub use hermitian::{EigenDecomposition, HermitianMatrix, MetricFactor, SmallMatrix, MAX_DIM};
pub use inequalities::{
    check_garding, check_newton_maclaurin, ellipticity_check, hmw_bound_slack, newton_maclaurin_min_slack, quad_split_bound,
    quad_split_witness, schur_horn_slack, EllipticityCheck,
};
pub use poly::{binomial, sigma as sigma_slice, sigma_all_into, sigma_deleted_into};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymconeError {
    #[error("matrix dimension {n} outside 1..={max}")]
    Dimension { n: usize, max: usize },
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("order {k} outside 1..={n}")]
    Order { k: usize, n: usize },
    #[error("index {i} outside 0..{n}")]
    Index { i: usize, n: usize },
    #[error("vector not in Γ_{k} (margin {margin:.3e})")]
    NotInCone { k: usize, margin: f64 },
    #[error("invalid index tuple: {0}")]
    IndexTuple(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Mismatch(usize, usize),
    #[error("weights must be non-negative and ascending")]
    Weights,
    #[error("parameter must be positive, got {0}")]
    NonPositive(f64),
}

/// Real eigenvalue vector, stored sorted descending (`λ_1 ≥ … ≥ λ_n`).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

/// Result of a `Γ_k` membership query. `margin` is `min_{1≤j≤k} σ_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeMembership {
    pub inside: bool,
    pub margin: f64,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self, SymconeError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SymconeError::NonFinite);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn scaled(&self, c: f64) -> Spectrum {
        let mut values: Vec<f64> = self.values.iter().map(|v| v * c).collect();
        if c < 0.0 {
            values.reverse();
        }
        Spectrum { values }
    }

    /// `σ_k(λ)`; zero for `k > n`.
    pub fn sigma(&self, k: usize) -> f64 {
        poly::sigma(&self.values, k)
    }

    /// `∂σ_k/∂λ_i = σ_{k-1}(λ|i)` for the `i`-th entry (0-based, descending order).
    pub fn sigma_partial(&self, k: usize, i: usize) -> Result<f64, SymconeError> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(SymconeError::Order { k, n });
        }
        if i >= n {
            return Err(SymconeError::Index { i, n });
        }
        Ok(self.sigma_partials(k)[i])
    }

    /// All `σ_{k-1}(λ|i)` in one sweep.
    pub fn sigma_partials(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        if k > 0 {
            poly::sigma_deleted_into(&self.values, k - 1, &mut out);
        }
        out
    }

    pub fn cone_membership(&self, k: usize) -> Result<ConeMembership, SymconeError> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(SymconeError::Order { k, n });
        }
        Ok(cone_membership_slice(&self.values, k))
    }

    pub fn in_gamma_k(&self, k: usize) -> Result<bool, SymconeError> {
        self.cone_membership(k).map(|m| m.inside)
    }
}

/// Membership with zero threshold: the cone is open, so `σ_j = 0` is outside.
pub fn cone_membership_slice(values: &[f64], k: usize) -> ConeMembership {
    let mut buf = [0.0; MAX_DIM + 2];
    let margin = if k < buf.len() {
        sigma_all_into(values, &mut buf[..=k]);
        buf[1..=k].iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        let mut v = vec![0.0; k + 1];
        sigma_all_into(values, &mut v);
        v[1..].iter().copied().fold(f64::INFINITY, f64::min)
    };
    ConeMembership { inside: margin > 0.0, margin }
}

/// `σ_k` of the eigenvalues of `h`.
pub fn sigma_of_hermitian(h: &HermitianMatrix, k: usize) -> f64 {
    poly::sigma(h.eigen().values(), k)
}

/// `σ_k(h)` as the sum of the `k×k` principal minors, i.e. the coefficient of
/// `θ^k` in `det(I + θh)`. Independent of the eigensolver.
pub fn sigma_by_principal_minors(h: &HermitianMatrix, k: usize) -> f64 {
    let n = h.dim();
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let mut total = 0.0;
    let mut idx = Vec::with_capacity(k);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        idx.clear();
        idx.extend((0..n).filter(|i| mask & (1 << i) != 0));
        total += h.as_matrix().principal(&idx).determinant().re;
    }
    total
}

/// `∂σ_k/∂h` in the basis of `h`, together with an ellipticity flag.
#[derive(Clone, Copy, Debug)]
pub struct SigmaGradient {
    /// `S diag(σ_{k-1}(λ|i)) S†`; satisfies `dσ_k = tr(G dh)`.
    pub matrix: HermitianMatrix,
    /// True when `λ ∈ Γ_k`, so the gradient is positive definite.
    pub elliptic: bool,
    pub eigen: EigenDecomposition,
}

/// Relative width used to merge nearly equal eigenvalues into one cluster.
const CLUSTER_TOL: f64 = 1e-10;

pub fn sigma_gradient(h: &HermitianMatrix, k: usize) -> SigmaGradient {
    let eigen = h.eigen();
    sigma_gradient_from_eigen(&eigen, k, h.frobenius_norm())
}

/// Same as [`sigma_gradient`] for an already decomposed matrix of norm `scale`.
pub fn sigma_gradient_from_eigen(eigen: &EigenDecomposition, k: usize, scale: f64) -> SigmaGradient {
    let values = eigen.values();
    let n = values.len();
    let mut weights = [0.0; MAX_DIM];
    let w = &mut weights[..n];
    if k >= 1 {
        sigma_deleted_into(values, k - 1, w);
    }
    // within an eigenspace the derivative is basis independent; use the
    // cluster mean so eigenvector noise cannot break the symmetry
    let gap = CLUSTER_TOL * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= gap {
            end += 1;
        }
        if end - start > 1 {
            let mean = w[start..end].iter().sum::<f64>() / (end - start) as f64;
            w[start..end].fill(mean);
        }
        start = end;
    }
    let elliptic = k >= 1 && k <= n && cone_membership_slice(values, k).inside;
    SigmaGradient { matrix: eigen.reassemble(w), elliptic, eigen: *eigen }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(spec(&[1.0, 1.0, 1.0]).sigma(2), 3.0);
        assert_eq!(spec(&[3.0, 2.0, 1.0]).sigma(2), 11.0);
        assert_eq!(spec(&[5.0, -2.0]).sigma(3), 0.0);
    }

    #[test]
    fn partial_examples() {
        // indices are 0-based into the descending order
        assert_eq!(spec(&[5.0, 2.0]).sigma_partial(2, 0).unwrap(), 2.0);
        assert_eq!(spec(&[3.0, 2.0, 1.0]).sigma_partial(2, 1).unwrap(), 4.0);
        assert_eq!(spec(&[1.0, 1.0, 1.0]).sigma_partial(3, 0).unwrap(), 1.0);
        assert!(spec(&[1.0]).sigma_partial(1, 3).is_err());
        assert!(spec(&[1.0]).sigma_partial(2, 0).is_err());
    }

    #[test]
    fn partial_matches_finite_difference() {
        let lam = [2.3, 1.1, -0.4, 0.7];
        let h = 1e-5;
        for k in 1..=4 {
            let s = spec(&lam);
            for i in 0..4 {
                // perturb entry i of the sorted vector
                let mut p = s.values().to_vec();
                let mut m = p.clone();
                p[i] += h;
                m[i] -= h;
                let fd = (sigma_slice(&p, k) - sigma_slice(&m, k)) / (2.0 * h);
                let exact = s.sigma_partial(k, i).unwrap();
                assert!((fd - exact).abs() <= 1e-8 * exact.abs().max(1.0), "k={k} i={i}");
            }
        }
    }

    #[test]
    fn cone_examples() {
        let m = spec(&[1.0, 1.0, 1.0]).cone_membership(3).unwrap();
        assert!(m.inside);
        let m = spec(&[2.0, 2.0, -1.0]).cone_membership(2).unwrap();
        assert!(!m.inside);
        assert_eq!(m.margin, 0.0);
        assert!(spec(&[1.0, 0.0, 0.0]).in_gamma_k(1).unwrap());
        assert!(spec(&[1.0, 0.0, 0.0]).cone_membership(4).is_err());
    }

    #[test]
    fn hermitian_sigma_examples() {
        assert!((sigma_of_hermitian(&HermitianMatrix::identity(3), 2) - 3.0).abs() < 1e-14);
        let d = HermitianMatrix::from_real_diagonal(&[3.0, 2.0, 1.0]);
        assert!((sigma_of_hermitian(&d, 2) - 11.0).abs() < 1e-13);
        for k in 1..=3 {
            assert_eq!(sigma_of_hermitian(&HermitianMatrix::zeros(3), k), 0.0);
        }
        assert!((sigma_by_principal_minors(&d, 2) - 11.0).abs() < 1e-13);
    }

    #[test]
    fn gradient_examples() {
        let g = sigma_gradient(&HermitianMatrix::identity(3), 2);
        assert!(g.elliptic);
        assert!(g.matrix.sub(&HermitianMatrix::scaled_identity(3, 2.0)).frobenius_norm() < 1e-14);
        let g = sigma_gradient(&HermitianMatrix::from_real_diagonal(&[3.0, 2.0, 1.0]), 2);
        let want = HermitianMatrix::from_real_diagonal(&[3.0, 4.0, 5.0]);
        assert!(g.matrix.sub(&want).frobenius_norm() < 1e-13);
    }

    #[test]
    fn gradient_flags_non_elliptic() {
        let g = sigma_gradient(&HermitianMatrix::from_real_diagonal(&[1.0, -3.0]), 2);
        assert!(!g.elliptic);
    }

    #[test]
    fn degenerate_cluster_is_exactly_scalar() {
        // a rotated identity block: eigenvectors are arbitrary in the cluster
        let h = HermitianMatrix::from_upper(3, |i, j| match (i, j) {
            (0, 0) | (1, 1) => Complex64::new(2.0, 0.0),
            (2, 2) => Complex64::new(-0.5, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let g = sigma_gradient(&h, 2);
        let want = HermitianMatrix::from_real_diagonal(&[1.5, 1.5, 4.0]);
        assert!(g.matrix.sub(&want).frobenius_norm() < 1e-13);
    }
}
