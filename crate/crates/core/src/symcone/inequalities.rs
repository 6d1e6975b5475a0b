//! Slack evaluators. Each returns `lhs - rhs` of an inequality that holds on
//! `Γ_k`, so a value below zero (beyond round-off) is a violation.

use super::poly::{binomial, sigma, sigma_all_into, sigma_deleted_into};
use super::{cone_membership_slice, HermitianMatrix, Spectrum, SymconeError};

fn require_cone(values: &[f64], k: usize) -> Result<(), SymconeError> {
    let n = values.len();
    if k == 0 || k > n {
        return Err(SymconeError::Order { k, n });
    }
    let m = cone_membership_slice(values, k);
    if !m.inside {
        return Err(SymconeError::NotInCone { k, margin: m.margin });
    }
    Ok(())
}

/// Generalized Newton–Maclaurin:
/// `(H_ℓ/H_r)^{1/(ℓ-r)} - (H_k/H_s)^{1/(k-s)}` with `H_j = σ_j / C(n, j)`.
///
/// Requires `λ ∈ Γ_k`, `k > s ≥ 0`, `ℓ > r ≥ 0`, `k ≥ ℓ` and `s ≥ r`.
pub fn check_newton_maclaurin(
    lambda: &Spectrum,
    k: usize,
    s: usize,
    l: usize,
    r: usize,
) -> Result<f64, SymconeError> {
    if !(k > s && l > r && k >= l && s >= r) {
        return Err(SymconeError::IndexTuple(format!("k={k} s={s} l={l} r={r}")));
    }
    let values = lambda.values();
    require_cone(values, k)?;
    let n = values.len();
    let mut sig = vec![0.0; k + 1];
    sigma_all_into(values, &mut sig);
    let h = |j: usize| sig[j] / binomial(n, j);
    let lower = (h(l) / h(r)).powf(1.0 / (l - r) as f64);
    let upper = (h(k) / h(s)).powf(1.0 / (k - s) as f64);
    Ok(lower - upper)
}

/// Smallest Newton–Maclaurin slack over every valid `(k', s, ℓ, r)` with
/// `k' ≤ k`, from one table of `σ_j`. Returns the slack and its tuple.
pub fn newton_maclaurin_min_slack(lambda: &Spectrum, k: usize) -> Result<(f64, [usize; 4]), SymconeError> {
    let values = lambda.values();
    require_cone(values, k)?;
    let n = values.len();
    let mut sig = vec![0.0; k + 1];
    sigma_all_into(values, &mut sig);
    let h: Vec<f64> = (0..=k).map(|j| sig[j] / binomial(n, j)).collect();
    let mean = |a: usize, b: usize| (h[a] / h[b]).powf(1.0 / (a - b) as f64);
    let mut worst = (f64::INFINITY, [0; 4]);
    for top in 1..=k {
        for s in 0..top {
            let upper = mean(top, s);
            for l in 1..=top {
                for r in 0..l.min(s + 1) {
                    let slack = mean(l, r) - upper;
                    if slack < worst.0 {
                        worst = (slack, [top, s, l, r]);
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Gårding: `Σ_i σ_{k-1}(λ|i) q_i - k σ_k(λ)^{(k-1)/k} σ_k(q)^{1/k}`.
///
/// `q` is paired entrywise with the descending order of `λ`; both must lie in `Γ_k`.
pub fn check_garding(lambda: &Spectrum, q: &[f64], k: usize) -> Result<f64, SymconeError> {
    let values = lambda.values();
    if q.len() != values.len() {
        return Err(SymconeError::Mismatch(values.len(), q.len()));
    }
    require_cone(values, k)?;
    require_cone(q, k)?;
    let mut partials = vec![0.0; values.len()];
    sigma_deleted_into(values, k - 1, &mut partials);
    let lhs: f64 = partials.iter().zip(q).map(|(f, qi)| f * qi).sum();
    let kf = k as f64;
    let rhs = kf * sigma(values, k).powf((kf - 1.0) / kf) * sigma(q, k).powf(1.0 / kf);
    Ok(lhs - rhs)
}

/// Lower bound for the smallest partial: `σ_{k-1}(λ|1) - (k/n) σ_k(λ)/λ_1`.
pub fn hmw_bound_slack(lambda: &Spectrum, k: usize) -> Result<f64, SymconeError> {
    let values = lambda.values();
    require_cone(values, k)?;
    let n = values.len();
    let mut partials = vec![0.0; n];
    sigma_deleted_into(values, k - 1, &mut partials);
    let top = values[0];
    Ok(partials[0] - (k as f64 / n as f64) * sigma(values, k) / top)
}

/// Positivity and ordering of the partials on `Γ_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticityCheck {
    /// `min_i σ_{k-1}(λ|i)`; must be strictly positive.
    pub min_partial: f64,
    /// `min_i [σ_{k-1}(λ|i+1) - σ_{k-1}(λ|i)]` over the descending order; must be ≥ 0.
    pub ordering_gap: f64,
}

pub fn ellipticity_check(lambda: &Spectrum, k: usize) -> Result<EllipticityCheck, SymconeError> {
    let values = lambda.values();
    require_cone(values, k)?;
    let mut partials = vec![0.0; values.len()];
    sigma_deleted_into(values, k - 1, &mut partials);
    let min_partial = partials.iter().copied().fold(f64::INFINITY, f64::min);
    let ordering_gap = partials
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(EllipticityCheck { min_partial, ordering_gap })
}

/// Smallest `C ≥ 0` with
/// `Σ f_i|λ_i| ≤ ε Σ_{i≠r} f_i λ_i² + (C/ε) Σ f_i + C`, where `f_i = σ_{k-1}(λ|i)`.
///
/// `r` is a 0-based index into the descending order.
pub fn quad_split_witness(lambda: &Spectrum, k: usize, r: usize, eps: f64) -> Result<f64, SymconeError> {
    let values = lambda.values();
    let n = values.len();
    if k == 0 || k > n {
        return Err(SymconeError::Order { k, n });
    }
    if r >= n {
        return Err(SymconeError::Index { i: r, n });
    }
    if !(eps > 0.0) {
        return Err(SymconeError::NonPositive(eps));
    }
    let mut f = vec![0.0; n];
    sigma_deleted_into(values, k - 1, &mut f);
    let lhs: f64 = f.iter().zip(values).map(|(fi, l)| fi * l.abs()).sum();
    let quad: f64 = (0..n).filter(|&i| i != r).map(|i| f[i] * values[i] * values[i]).sum();
    let total: f64 = f.iter().sum();
    let deficit = lhs - eps * quad;
    Ok((deficit / (total / eps + 1.0)).max(0.0))
}

/// An explicit admissible constant for the quadratic split:
/// `max(1, k σ_k(λ), (n-1)/2)`. Any witness above it is a violation.
///
/// For `λ_r ≥ 0`, `f_r λ_r ≤ kσ_k + Σ_{i≠r} f_i|λ_i|` and `2|a| ≤ εa² + 1/ε`
/// give `C = max(1, kσ_k)`. For `λ_r < 0`, `f_r λ_r² ≤ (n-1) Σ_{i≠r} f_i λ_i²`
/// and the same splitting give `C = (n-1)/2`.
pub fn quad_split_bound(n: usize, k: usize, sigma_k: f64) -> f64 {
    1f64.max(k as f64 * sigma_k).max((n as f64 - 1.0) / 2.0)
}

/// `Σ f_i A_ii - Σ f_i λ_i` for ascending non-negative weights `f` and the
/// descending eigenvalues `λ` of `A`.
pub fn schur_horn_slack(a: &HermitianMatrix, weights: &[f64]) -> Result<f64, SymconeError> {
    let n = a.dim();
    if weights.len() != n {
        return Err(SymconeError::Mismatch(n, weights.len()));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) || weights.windows(2).any(|w| w[0] > w[1]) {
        return Err(SymconeError::Weights);
    }
    let eig = a.eigen();
    let diag: f64 = (0..n).map(|i| weights[i] * a.get(i, i).re).sum();
    let paired: f64 = weights.iter().zip(eig.values()).map(|(f, l)| f * l).sum();
    Ok(diag - paired)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn newton_maclaurin_examples() {
        let ones = spec(&[1.0; 3]);
        assert!(check_newton_maclaurin(&ones, 3, 1, 2, 0).unwrap().abs() < 1e-14);
        let s = check_newton_maclaurin(&spec(&[3.0, 2.0, 1.0]), 2, 0, 1, 0).unwrap();
        assert!((s - (2.0 - (11.0f64 / 3.0).sqrt())).abs() < 1e-14);
        assert!((s - 0.0852).abs() < 1e-4);
        let five = spec(&[1.0; 5]);
        for (k, sl, l, r) in [(5, 2, 3, 1), (4, 0, 1, 0), (3, 3, 3, 0)] {
            match check_newton_maclaurin(&five, k, sl, l, r) {
                Ok(v) => assert!(v.abs() < 1e-14),
                Err(SymconeError::IndexTuple(_)) => assert!(!(k > sl)),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn newton_maclaurin_sweep_agrees_with_single_checks() {
        let lam = spec(&[2.5, 1.0, 0.6, -0.1]);
        let (worst, [k, s, l, r]) = newton_maclaurin_min_slack(&lam, 3).unwrap();
        assert_eq!(worst, check_newton_maclaurin(&lam, k, s, l, r).unwrap());
        for k in 1..=3 {
            for s in 0..k {
                for l in 1..=k {
                    for r in 0..l.min(s + 1) {
                        assert!(check_newton_maclaurin(&lam, k, s, l, r).unwrap() >= worst);
                    }
                }
            }
        }
        assert!(worst >= -1e-12);
    }

    #[test]
    fn newton_maclaurin_preconditions() {
        assert!(matches!(
            check_newton_maclaurin(&spec(&[1.0, 1.0]), 1, 1, 1, 0),
            Err(SymconeError::IndexTuple(_))
        ));
        assert!(matches!(
            check_newton_maclaurin(&spec(&[1.0, -2.0]), 2, 0, 1, 0),
            Err(SymconeError::NotInCone { .. })
        ));
    }

    #[test]
    fn garding_examples() {
        let ones = spec(&[1.0; 3]);
        assert!(check_garding(&ones, &[1.0; 3], 2).unwrap().abs() < 1e-13);
        let s = check_garding(&spec(&[3.0, 2.0, 1.0]), &[1.0; 3], 2).unwrap();
        assert!((s - (12.0 - 2.0 * 33f64.sqrt())).abs() < 1e-13);
        assert!((s - 0.511).abs() < 1e-3);
        // homogeneous of degree one in q
        let q = [1.5, 0.5, 0.8];
        let lam = spec(&[2.0, 1.0, -0.2]);
        let base = check_garding(&lam, &q, 2).unwrap();
        let scaled: Vec<f64> = q.iter().map(|v| 3.5 * v).collect();
        assert!((check_garding(&lam, &scaled, 2).unwrap() - 3.5 * base).abs() < 1e-12);
        assert!(check_garding(&lam, &[1.0, -5.0, 1.0], 2).is_err());
    }

    #[test]
    fn hmw_examples() {
        assert!(hmw_bound_slack(&spec(&[1.0; 3]), 2).unwrap().abs() < 1e-14);
        let s = hmw_bound_slack(&spec(&[3.0, 2.0, 1.0]), 2).unwrap();
        assert!((s - (3.0 - 22.0 / 9.0)).abs() < 1e-14);
        for t in [0.1, 1.0, 7.5] {
            assert!(hmw_bound_slack(&spec(&[t; 4]), 3).unwrap().abs() < 1e-12 * t.powi(2));
        }
    }

    #[test]
    fn ellipticity_on_cone() {
        let e = ellipticity_check(&spec(&[3.0, 1.0, -0.5]), 2).unwrap();
        assert!(e.min_partial > 0.0);
        assert!(e.ordering_gap >= 0.0);
    }

    #[test]
    fn quad_split_examples() {
        let ones = spec(&[1.0; 3]);
        assert_eq!(quad_split_witness(&ones, 2, 0, 2.0).unwrap(), 0.0);
        // deficit 6 - 0.1·4 = 5.6 over (1/0.1)·6 + 1 = 61
        let w = quad_split_witness(&ones, 2, 0, 0.1).unwrap();
        assert!((w - 5.6 / 61.0).abs() < 1e-15);
        assert!(quad_split_witness(&ones, 2, 3, 0.1).is_err());
        assert!(quad_split_witness(&ones, 2, 0, 0.0).is_err());
    }

    #[test]
    fn schur_horn_examples() {
        // descending diagonal already realizes the minimal pairing
        let d = HermitianMatrix::from_real_diagonal(&[2.0, 0.3, -1.0]);
        assert!(schur_horn_slack(&d, &[0.1, 0.5, 2.0]).unwrap().abs() < 1e-14);
        // any other order of the same diagonal is strictly worse
        let d = HermitianMatrix::from_real_diagonal(&[0.3, -1.0, 2.0]);
        assert!((schur_horn_slack(&d, &[0.1, 0.5, 2.0]).unwrap() - 5.18).abs() < 1e-13);
        let flip = HermitianMatrix::from_upper(2, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        assert!((schur_horn_slack(&flip, &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(schur_horn_slack(&flip, &[-1.0, 1.0]), Err(SymconeError::Weights));
        assert_eq!(schur_horn_slack(&flip, &[2.0, 1.0]), Err(SymconeError::Weights));
    }
}
