use khessian::geometry::{endomorphism_spectrum, DomainSpec, Grid, HermitianField, ScalarField, Shape};
use khessian::symcone::{
    cone_membership_slice, sigma_by_principal_minors, sigma_deleted_into, sigma_of_hermitian, sigma_slice,
    HermitianMatrix, SmallMatrix,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn vector(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..=max_n)
}

fn cone_vector(n: usize, k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..3.0f64, n).prop_filter("in Γ_k", move |v| cone_membership_slice(v, k).inside)
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n)
}

fn hermitian(n: usize, e: &[(f64, f64)]) -> HermitianMatrix {
    HermitianMatrix::from_upper(n, |i, j| {
        let (re, im) = e[i * n + j];
        if i == j { Complex64::new(re, 0.0) } else { Complex64::new(re, im) }
    })
}

fn general(n: usize, e: &[(f64, f64)]) -> SmallMatrix {
    SmallMatrix::from_fn(n, |i, j| Complex64::new(e[i * n + j].0, e[i * n + j].1))
}

/// `B B† + δ I`, positive definite.
fn positive(n: usize, e: &[(f64, f64)]) -> HermitianMatrix {
    let b = general(n, e);
    HermitianMatrix::symmetrized(&b.mul(&b.adjoint())).add(&HermitianMatrix::scaled_identity(n, 0.5))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn sigma_is_permutation_invariant(v in vector(6), k in 0usize..7, seed in any::<u64>()) {
        let mut w = v.clone();
        let n = w.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            w.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert!(rel(sigma_slice(&v, k), sigma_slice(&w, k)) < 1e-12);
    }

    #[test]
    fn sigma_is_homogeneous(v in vector(6), k in 0usize..7, c in 0.1..4.0f64) {
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert!(rel(sigma_slice(&scaled, k), c.powi(k as i32) * sigma_slice(&v, k)) < 1e-12);
    }

    #[test]
    fn euler_identity_for_partials(v in vector(6), k in 1usize..7) {
        prop_assume!(k <= v.len());
        let mut f = vec![0.0; v.len()];
        sigma_deleted_into(&v, k - 1, &mut f);
        let lhs: f64 = f.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!(rel(lhs, k as f64 * sigma_slice(&v, k)) < 1e-11);
    }

    #[test]
    fn cone_is_convex(a in cone_vector(4, 3), b in cone_vector(4, 3), t in 0.0..1.0f64) {
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        prop_assert!(cone_membership_slice(&mid, 3).inside);
    }

    #[test]
    fn kth_root_is_concave(a in cone_vector(5, 2), b in cone_vector(5, 2)) {
        let f = |v: &[f64]| sigma_slice(v, 2).sqrt();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        prop_assert!(f(&mid) >= 0.5 * (f(&a) + f(&b)) - 1e-12);
    }

    #[test]
    fn weyl_monotonicity(n in 1usize..5, ea in complex_entries(4), ep in complex_entries(4)) {
        let a = hermitian(n, &ea);
        let b = a.add(&positive(n, &ep));
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!(*x <= y + 1e-12);
        }
    }

    #[test]
    fn pencil_spectrum_is_congruence_invariant(
        ea in complex_entries(3), eal in complex_entries(3), es in complex_entries(3),
    ) {
        let g = Grid::build(DomainSpec::new(3, Shape::Box, 5).unwrap()).unwrap();
        let a = hermitian(3, &ea);
        let alpha = positive(3, &eal);
        let s = general(3, &es);
        prop_assume!(s.determinant().norm() > 1e-2);
        let u = ScalarField::zeros(&g);
        let base = endomorphism_spectrum(&HermitianField::Constant(alpha), &HermitianField::Constant(a), &u, &g).unwrap();
        let moved = endomorphism_spectrum(
            &HermitianField::Constant(alpha.congruence(&s)),
            &HermitianField::Constant(a.congruence(&s)),
            &u,
            &g,
        )
        .unwrap();
        let scale = base.at(0).iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in base.at(0).iter().zip(moved.at(0)) {
            prop_assert!((x - y).abs() <= 1e-9 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigen_and_minor_routes_agree(n in 1usize..7, e in complex_entries(6), k in 1usize..7) {
        prop_assume!(k <= n);
        let h = hermitian(n, &e);
        let a = sigma_of_hermitian(&h, k);
        let b = sigma_by_principal_minors(&h, k);
        let scale = h.frobenius_norm().max(1.0).powi(k as i32);
        prop_assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
    }
}

proptest! {
    #[test]
    fn jacobi_matches_nalgebra(n in 1usize..7, e in complex_entries(6)) {
        let h = hermitian(n, &e);
        // real symmetric embedding [[Re, −Im], [Im, Re]] doubles every eigenvalue
        let emb = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let z = h.get(r % n, c % n);
            match (r < n, c < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let mut oracle: Vec<f64> = emb.symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let ours = h.eigenvalues();
        for (i, v) in ours.iter().enumerate() {
            prop_assert!((v - oracle[2 * i]).abs() < 1e-10 * h.frobenius_norm().max(1.0));
        }
    }
}
