use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::VerifyError;
use crate::symcone::{cone_membership_slice, SmallMatrix, MAX_DIM};

/// Samples per independent random stream.
pub(crate) const BLOCK: usize = 4096;
const MAX_REJECTIONS: usize = 10_000;

/// What to draw: `sample_count` vectors in `Γ_k ⊂ ℝⁿ` from `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub n: usize,
    pub k: usize,
    pub sample_count: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(n: usize, k: usize, sample_count: usize, seed: u64) -> Result<Self, VerifyError> {
        let spec = Self { n, k, sample_count, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if !(1..=MAX_DIM).contains(&self.n) {
            return Err(VerifyError::Spec(format!("n = {} outside 1..={MAX_DIM}", self.n)));
        }
        if !(1..=self.n).contains(&self.k) {
            return Err(VerifyError::Spec(format!("k = {} outside 1..={}", self.k, self.n)));
        }
        if self.sample_count == 0 {
            return Err(VerifyError::Spec("sample_count must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn blocks(&self) -> usize {
        self.sample_count.div_ceil(BLOCK)
    }
}

/// Deterministic sample stream for one block.
///
/// Even draws are uniform in `[-1, 3]ⁿ` conditioned on `Γ_k`; odd draws add a
/// positive vector with entries in `(0, 2)` to a conditioned draw, which
/// stays in `Γ_k` and covers the bulk of the cone.
pub struct Sampler {
    rng: ChaCha8Rng,
    n: usize,
    k: usize,
    count: u64,
}

impl Sampler {
    pub fn new(seed: u64, block: u64, n: usize, k: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        Self { rng, n, k, count: 0 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn conditioned(&mut self) -> Vec<f64> {
        for _ in 0..MAX_REJECTIONS {
            let v: Vec<f64> = (0..self.n).map(|_| self.rng.gen_range(-1.0..3.0)).collect();
            if cone_membership_slice(&v, self.k).inside {
                return v;
            }
        }
        // (0, 3)ⁿ lies in every Γ_k
        (0..self.n).map(|_| self.rng.gen_range(f64::MIN_POSITIVE..3.0)).collect()
    }

    /// Next vector in `Γ_k`.
    pub fn draw(&mut self) -> Vec<f64> {
        let mut v = self.conditioned();
        if self.count % 2 == 1 {
            for x in v.iter_mut() {
                *x += self.rng.gen_range(f64::MIN_POSITIVE..2.0);
            }
        }
        self.count += 1;
        v
    }
}

/// Unitary matrix from Gram–Schmidt on a random complex matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> SmallMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let mut ok = true;
        for j in 0..n {
            for i in 0..j {
                let proj: Complex64 = (0..n).map(|r| cols[i][r].conj() * cols[j][r]).sum();
                for r in 0..n {
                    let c = cols[i][r];
                    cols[j][r] -= proj * c;
                }
            }
            let norm = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            cols[j].iter_mut().for_each(|c| *c /= norm);
        }
        if ok {
            return SmallMatrix::from_fn(n, |r, c| cols[c][r]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_in_the_cone_and_reproducible() {
        let mut a = Sampler::new(7, 0, 4, 3);
        let mut b = Sampler::new(7, 0, 4, 3);
        for _ in 0..500 {
            let v = a.draw();
            assert!(cone_membership_slice(&v, 3).inside);
            assert_eq!(v, b.draw());
        }
        let mut other = Sampler::new(7, 1, 4, 3);
        assert_ne!(Sampler::new(7, 0, 4, 3).draw(), other.draw());
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 5);
        let prod = u.adjoint().mul(&u);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SampleSpec::new(3, 4, 10, 0).is_err());
        assert!(SampleSpec::new(3, 2, 0, 0).is_err());
        assert!(SampleSpec::new(7, 2, 10, 0).is_err());
        assert_eq!(SampleSpec::new(3, 2, 4097, 0).unwrap().blocks(), 2);
    }
}
