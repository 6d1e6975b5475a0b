//! Elementary symmetric polynomial kernels on plain slices.
//!
//! All routines build the coefficients of `Π (1 + λ_i x)` incrementally, so a
//! single pass produces every `σ_j` up to the requested order. This avoids
//! the cancellation of alternating sums and is `O(n k)` per call.

/// Largest order served from stack buffers; larger orders fall back to heap.
const STACK_ORDER: usize = 8;

/// Fills `out[j] = σ_j(values)` for `j = 0..out.len()`.
pub fn sigma_all_into(values: &[f64], out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out.fill(0.0);
    out[0] = 1.0;
    let top = out.len() - 1;
    for (i, &lam) in values.iter().enumerate() {
        let hi = top.min(i + 1);
        for j in (1..=hi).rev() {
            out[j] += lam * out[j - 1];
        }
    }
}

/// `σ_k(values)` with the conventions `σ_0 = 1` and `σ_k = 0` for `k > n`.
pub fn sigma(values: &[f64], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > values.len() {
        return 0.0;
    }
    if k < STACK_ORDER {
        let mut buf = [0.0; STACK_ORDER];
        sigma_all_into(values, &mut buf[..=k]);
        buf[k]
    } else {
        let mut buf = vec![0.0; k + 1];
        sigma_all_into(values, &mut buf);
        buf[k]
    }
}

/// Fills `out[i] = σ_m(values | i)`, the order-`m` polynomial of `values` with
/// entry `i` removed, for every `i` at once.
///
/// Uses a suffix table and a running prefix, so no entry is ever divided out.
pub fn sigma_deleted_into(values: &[f64], m: usize, out: &mut [f64]) {
    let n = values.len();
    assert_eq!(out.len(), n, "output length must match the spectrum");
    if m == 0 {
        out.fill(1.0);
        return;
    }
    if n == 0 {
        return;
    }
    if m + 1 > n {
        // each deleted vector has n - 1 < m entries
        out.fill(0.0);
        return;
    }
    let width = m + 1;
    if n <= STACK_ORDER && width <= STACK_ORDER {
        let mut suffix = [0.0; (STACK_ORDER + 1) * STACK_ORDER];
        let mut prefix = [0.0; STACK_ORDER];
        deleted_kernel(values, m, out, &mut suffix[..(n + 1) * width], &mut prefix[..width]);
    } else {
        let mut suffix = vec![0.0; (n + 1) * width];
        let mut prefix = vec![0.0; width];
        deleted_kernel(values, m, out, &mut suffix, &mut prefix);
    }
}

fn deleted_kernel(values: &[f64], m: usize, out: &mut [f64], suffix: &mut [f64], prefix: &mut [f64]) {
    let n = values.len();
    let width = m + 1;
    // suffix row i holds the coefficients of Π_{j >= i} (1 + λ_j x)
    suffix[n * width..].fill(0.0);
    suffix[n * width] = 1.0;
    for i in (0..n).rev() {
        let (head, tail) = suffix.split_at_mut((i + 1) * width);
        let row = &mut head[i * width..];
        let next = &tail[..width];
        row[0] = next[0];
        for j in 1..width {
            row[j] = next[j] + values[i] * next[j - 1];
        }
    }
    prefix.fill(0.0);
    prefix[0] = 1.0;
    for i in 0..n {
        let after = &suffix[(i + 1) * width..(i + 2) * width];
        out[i] = (0..=m).map(|a| prefix[a] * after[m - a]).sum();
        for j in (1..width).rev() {
            prefix[j] += values[i] * prefix[j - 1];
        }
    }
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_by_subsets(values: &[f64], k: usize) -> f64 {
        let n = values.len();
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| {
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| values[i])
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn matches_subset_enumeration() {
        let values = [0.7, -1.3, 2.5, 0.1, -0.4, 1.9];
        for k in 0..=6 {
            let a = sigma(&values, k);
            let b = sigma_by_subsets(&values, k);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn conventions() {
        assert_eq!(sigma(&[5.0, -2.0], 0), 1.0);
        assert_eq!(sigma(&[5.0, -2.0], 3), 0.0);
        assert_eq!(sigma(&[], 0), 1.0);
        assert_eq!(sigma(&[], 1), 0.0);
    }

    #[test]
    fn deleted_matches_direct_removal() {
        let values = [3.0, -0.5, 2.0, 1.25, 0.75];
        for m in 0..=5 {
            let mut out = [0.0; 5];
            sigma_deleted_into(&values, m, &mut out);
            for i in 0..5 {
                let rest: Vec<f64> = values
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &v)| v)
                    .collect();
                let want = sigma_by_subsets(&rest, m);
                assert!((out[i] - want).abs() < 1e-12, "m={m} i={i}");
            }
        }
    }

    #[test]
    fn heap_path_for_long_vectors() {
        let values: Vec<f64> = (0..12).map(|i| 0.1 * i as f64 - 0.3).collect();
        let mut out = vec![0.0; 12];
        sigma_deleted_into(&values, 9, &mut out);
        let rest: Vec<f64> = values[1..].to_vec();
        assert!((out[0] - sigma_by_subsets(&rest, 9)).abs() < 1e-12);
        assert!((sigma(&values, 10) - sigma_by_subsets(&values, 10)).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}
