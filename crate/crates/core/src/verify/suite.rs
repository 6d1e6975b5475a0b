use rand::Rng;
use rayon::prelude::*;

use super::report::{CheckSummary, DiagnosticReport};
use super::sampling::{random_unitary, SampleSpec, Sampler, BLOCK};
use super::VerifyError;
use crate::symcone::{
    check_garding, ellipticity_check, hmw_bound_slack, newton_maclaurin_min_slack, quad_split_bound,
    quad_split_witness, schur_horn_slack, sigma_deleted_into, sigma_slice, HermitianMatrix, SmallMatrix, Spectrum,
};

const NAMES: [&str; 7] = [
    "newton_maclaurin",
    "hmw_bound",
    "ellipticity_positive",
    "ellipticity_ordering",
    "garding",
    "schur_horn",
    "quad_split",
];

/// Auxiliary inputs paired with one sample.
struct Companions {
    q: Vec<f64>,
    unitary: Option<SmallMatrix>,
    eps: f64,
}

struct Partial {
    checks: Vec<CheckSummary>,
    max_witness: f64,
}

impl Partial {
    fn new() -> Self {
        Self { checks: NAMES.iter().map(|n| CheckSummary::new(n)).collect(), max_witness: 0.0 }
    }

    fn merge(&mut self, other: Partial) {
        for (a, b) in self.checks.iter_mut().zip(other.checks) {
            a.merge(b);
        }
        self.max_witness = self.max_witness.max(other.max_witness);
    }
}

fn evaluate(lambda: &[f64], k: usize, aux: &Companions, acc: &mut Partial) {
    let n = lambda.len();
    let spec = match Spectrum::new(lambda.to_vec()) {
        Ok(s) => s,
        Err(_) => return,
    };
    let sorted = spec.values();
    let [nm, hmw, pos, ord, gar, sh, qs] = &mut acc.checks[..] else { unreachable!() };

    match newton_maclaurin_min_slack(&spec, k) {
        Ok((slack, t)) => nm.record(slack, sorted, || format!("k={} s={} l={} r={}", t[0], t[1], t[2], t[3])),
        Err(e) => nm.record(f64::NAN, sorted, || e.to_string()),
    }
    hmw.record(hmw_bound_slack(&spec, k).unwrap_or(f64::NAN), sorted, String::new);
    match ellipticity_check(&spec, k) {
        Ok(e) => {
            pos.record(e.min_partial, sorted, String::new);
            ord.record(e.ordering_gap, sorted, String::new);
        }
        Err(err) => {
            pos.record(f64::NAN, sorted, || err.to_string());
            ord.record(f64::NAN, sorted, || err.to_string());
        }
    }
    let garding_input: Vec<f64> = sorted.iter().chain(&aux.q).copied().collect();
    match check_garding(&spec, &aux.q, k) {
        Ok(s) => gar.record(s, &garding_input, String::new),
        Err(e) => gar.record(f64::NAN, &garding_input, || e.to_string()),
    }

    let mut weights = vec![0.0; n];
    sigma_deleted_into(sorted, k - 1, &mut weights);
    // partials of a descending vector in Γ_k are ascending; enforce exactly
    for i in 1..n {
        weights[i] = weights[i].max(weights[i - 1]);
    }
    let diag = HermitianMatrix::from_real_diagonal(sorted);
    let a = match &aux.unitary {
        Some(u) => diag.congruence(u),
        None => diag,
    };
    match schur_horn_slack(&a, &weights) {
        Ok(s) => sh.record(s, sorted, String::new),
        Err(e) => sh.record(f64::NAN, sorted, || e.to_string()),
    }

    // quadratic split on the level set σ_k = 1
    let scale = sigma_slice(sorted, k).powf(-1.0 / k as f64);
    let level = spec.scaled(scale);
    let bound = quad_split_bound(n, k, 1.0);
    for r in 0..n {
        match quad_split_witness(&level, k, r, aux.eps) {
            Ok(w) => {
                acc.max_witness = acc.max_witness.max(w);
                qs.record(bound - w, level.values(), || format!("r={r} eps={}", aux.eps));
            }
            Err(e) => qs.record(f64::NAN, level.values(), || e.to_string()),
        }
    }
}

fn assemble(n: usize, k: usize, samples: usize, seed: u64, partial: Partial) -> DiagnosticReport {
    DiagnosticReport {
        n,
        k,
        samples,
        seed,
        checks: partial.checks,
        quad_split_max_witness: partial.max_witness,
        quad_split_bound: quad_split_bound(n, k, 1.0),
    }
}

/// Draws `spec.sample_count` vectors in `Γ_k` and evaluates every check on
/// each. Blocks of samples use independent streams derived from the seed, so
/// the report does not depend on the number of worker threads.
pub fn run_inequality_suite(spec: &SampleSpec) -> Result<DiagnosticReport, VerifyError> {
    spec.validate()?;
    let SampleSpec { n, k, sample_count, seed } = *spec;
    let partials: Vec<Partial> = (0..spec.blocks())
        .into_par_iter()
        .map(|b| {
            let mut sampler = Sampler::new(seed, b as u64, n, k);
            let mut acc = Partial::new();
            let count = BLOCK.min(sample_count - b * BLOCK);
            for _ in 0..count {
                let lambda = sampler.draw();
                let mut q = sampler.draw();
                // q is compared entrywise, so shuffle it against λ's order
                for i in (1..n).rev() {
                    let j = sampler.rng().gen_range(0..=i);
                    q.swap(i, j);
                }
                let unitary = Some(random_unitary(sampler.rng(), n));
                let eps = 10f64.powf(sampler.rng().gen_range(-1.0..1.0));
                evaluate(&lambda, k, &Companions { q, unitary, eps }, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = Partial::new();
    for p in partials {
        total.merge(p);
    }
    Ok(assemble(n, k, sample_count, seed, total))
}

/// Evaluates the checks on given vectors, each paired with itself for
/// Gårding, an unrotated diagonal for Schur–Horn and `ε = 1`.
pub fn run_on_samples(k: usize, samples: &[Vec<f64>]) -> Result<DiagnosticReport, VerifyError> {
    let n = samples.first().map_or(0, |s| s.len());
    SampleSpec::new(n, k, samples.len(), 0)?;
    if samples.iter().any(|s| s.len() != n) {
        return Err(VerifyError::Spec("samples differ in length".into()));
    }
    let mut acc = Partial::new();
    for s in samples {
        evaluate(s, k, &Companions { q: s.clone(), unitary: None, eps: 1.0 }, &mut acc);
    }
    Ok(assemble(n, k, samples.len(), 0, acc))
}
