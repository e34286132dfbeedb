//! Sampling from the homogeneous stochastic block model.

use crate::error::Result;
use crate::graph::Graph;
use crate::labeling::{BalanceCertificate, Labeling, SbmParams};
use crate::rng::{stream_rng, StreamKind};
use rand::Rng;

/// Draw one SBM graph: each unordered pair `{i, j}` is an edge independently
/// with probability `a/n` when `truth(i) = truth(j)` and `b/n` otherwise.
/// Deterministic given `(seed, stream)`.
pub fn sample_sbm(params: &SbmParams, truth: &Labeling, seed: u64) -> Result<Graph> {
    sample_sbm_stream(params, truth, seed, 0)
}

/// Stream-indexed variant for parallel replicates; replicate `r` should pass
/// `stream = r` so draws are independent and order-insensitive.
pub fn sample_sbm_stream(
    params: &SbmParams,
    truth: &Labeling,
    seed: u64,
    stream: u64,
) -> Result<Graph> {
    BalanceCertificate::certify(truth, params)?;
    let p = params.p_within();
    let q = params.p_across();
    let mut rng = stream_rng(seed, StreamKind::GraphSample, stream);
    let n = params.n();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = if truth.label(i) == truth.label(j) { p } else { q };
            if rng.random::<f64>() < prob {
                g.set_edge(i, j, true);
            }
        }
    }
    Ok(g)
}

/// Exact log-probability of observing `g` under the SBM with the given
/// truth. Only used by exhaustive audits; `-inf` when the graph is
/// impossible (a degenerate 0/1 edge probability contradicted by `g`).
pub fn graph_log_prob(params: &SbmParams, truth: &Labeling, g: &Graph) -> f64 {
    let p = params.p_within();
    let q = params.p_across();
    let n = params.n();
    let mut log_prob = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = if truth.label(i) == truth.label(j) { p } else { q };
            let factor = if g.has_edge(i, j) { prob } else { 1.0 - prob };
            log_prob += factor.ln();
        }
    }
    log_prob
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn lab(xs: &[usize], k: usize) -> Labeling {
        Labeling::from_one_based(xs, k).unwrap()
    }

    #[test]
    fn degenerate_probabilities() {
        // a/n = 1 and b/n = 0: within pairs certain, cross pairs impossible.
        let params = SbmParams::new(4, 2, 4.0, 0.0, 1.0).unwrap();
        let truth = lab(&[1, 1, 2, 2], 2);
        for seed in 0..20 {
            let g = sample_sbm(&params, &truth, seed).unwrap();
            assert!(g.has_edge(0, 1));
            assert!(g.has_edge(2, 3));
            for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
                assert!(!g.has_edge(i, j));
            }
        }
    }

    #[test]
    fn unbalanced_truth_rejected() {
        let params = SbmParams::new(4, 2, 2.0, 1.0, 1.0).unwrap();
        let err = sample_sbm(&params, &lab(&[1, 1, 1, 2], 2), 1).unwrap_err();
        assert!(matches!(err, Error::BalanceViolation { .. }));
    }

    #[test]
    fn empirical_edge_frequencies() {
        // Monte Carlo oracle: within frequency 0.5 +/- 0.01, cross 0.25 +/- 0.01.
        let params = SbmParams::new(4, 2, 2.0, 1.0, 1.0).unwrap();
        let truth = lab(&[1, 1, 2, 2], 2);
        let replicates = 100_000u64;
        let mut within = 0u64;
        let mut cross = 0u64;
        for r in 0..replicates {
            let g = sample_sbm_stream(&params, &truth, 20_240_601, r).unwrap();
            within += u64::from(g.has_edge(0, 1)) + u64::from(g.has_edge(2, 3));
            cross += u64::from(g.has_edge(0, 2))
                + u64::from(g.has_edge(0, 3))
                + u64::from(g.has_edge(1, 2))
                + u64::from(g.has_edge(1, 3));
        }
        let within_freq = within as f64 / (2.0 * replicates as f64);
        let cross_freq = cross as f64 / (4.0 * replicates as f64);
        assert!((within_freq - 0.5).abs() <= 0.01, "within {within_freq}");
        assert!((cross_freq - 0.25).abs() <= 0.01, "cross {cross_freq}");
    }

    #[test]
    fn equal_rates_are_indistinguishable() {
        // a = b: two-proportion z-test on within vs cross frequencies should
        // not reject at p > 0.01.
        let params = SbmParams::new(4, 2, 1.5, 1.4999999999, 1.0).unwrap();
        let truth = lab(&[1, 1, 2, 2], 2);
        let replicates = 100_000u64;
        let mut within = 0u64;
        let mut cross = 0u64;
        for r in 0..replicates {
            let g = sample_sbm_stream(&params, &truth, 777, r).unwrap();
            within += u64::from(g.has_edge(0, 1)) + u64::from(g.has_edge(2, 3));
            cross += u64::from(g.has_edge(0, 2))
                + u64::from(g.has_edge(0, 3))
                + u64::from(g.has_edge(1, 2))
                + u64::from(g.has_edge(1, 3));
        }
        let n1 = 2.0 * replicates as f64;
        let n2 = 4.0 * replicates as f64;
        let p1 = within as f64 / n1;
        let p2 = cross as f64 / n2;
        let pooled = (within + cross) as f64 / (n1 + n2);
        let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
        let z = (p1 - p2) / se;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let p_value = 2.0 * (1.0 - normal.cdf(z.abs()));
        assert!(p_value > 0.01, "z={z}, p={p_value}");
    }

    #[test]
    fn relabeling_invariance_in_distribution() {
        // Simultaneously permuting vertices and truth leaves edge-count
        // statistics unchanged across replicates.
        let params = SbmParams::new(6, 2, 3.0, 1.0, 1.0).unwrap();
        let truth = lab(&[1, 1, 1, 2, 2, 2], 2);
        let perm = [3usize, 5, 0, 1, 4, 2]; // vertex i -> perm[i]
        let permuted_truth = {
            let mut labels = vec![0u16; 6];
            for (i, &pi) in perm.iter().enumerate() {
                labels[pi] = truth.label(i);
            }
            Labeling::new(labels, 2).unwrap()
        };
        let replicates = 10_000u64;
        let (mut sum_a, mut sum_b) = (0usize, 0usize);
        for r in 0..replicates {
            sum_a += sample_sbm_stream(&params, &truth, 5, r).unwrap().edge_count();
            sum_b += sample_sbm_stream(&params, &permuted_truth, 6, r)
                .unwrap()
                .edge_count();
        }
        let mean_a = sum_a as f64 / replicates as f64;
        let mean_b = sum_b as f64 / replicates as f64;
        // Mean edge count is 3*1/2 + 12*1/6 = 3.5 either way; allow MC noise.
        assert!((mean_a - mean_b).abs() < 0.1, "{mean_a} vs {mean_b}");
    }

    #[test]
    fn graph_log_prob_normalizes_at_small_n() {
        let params = SbmParams::new(4, 2, 2.0, 1.0, 1.0).unwrap();
        let truth = lab(&[1, 1, 2, 2], 2);
        let total: f64 = (0..64u64)
            .map(|mask| graph_log_prob(&params, &truth, &Graph::from_bitmask(4, mask)).exp())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "total {total}");
    }
}
