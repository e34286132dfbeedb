//! The node-private estimator: an Exponential Mechanism over balanced
//! labelings at inverse temperature `eta = epsilon / (4 delta_a)`, with
//! exact, Gumbel-max, and Metropolis samplers, plus the fallback policy
//! applied outside the degree envelope.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labeling::{canonical_balanced, enumerate_balanced_capped, Labeling, SbmParams};
use crate::labeling::ENUMERATION_CAP_DEFAULT;
use crate::rng::{stream_rng, StreamKind};
use crate::score::{in_envelope, DegreeEnvelope, ScoreContext};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Exact,
    Gumbel,
    Metropolis,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Exact => "exact",
            SamplerKind::Gumbel => "gumbel",
            SamplerKind::Metropolis => "metropolis",
        }
    }
}

/// What the full-domain estimator does when the graph leaves the envelope.
/// This replaces the existential Lipschitz extension; the privacy audit
/// measures the boundary behavior instead of assuming it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackPolicy {
    UniformBalanced,
    Reject,
}

/// Calibration of one estimator instance.
#[derive(Debug, Clone, Serialize)]
pub struct MechanismConfig {
    /// Total advertised budget; the EM itself runs at `epsilon0 = epsilon/2`,
    /// mirroring the 2x cost of the extension step it stands in for.
    pub epsilon: f64,
    pub envelope: DegreeEnvelope,
    pub sampler: SamplerKind,
    /// Proposal steps for the Metropolis sampler.
    pub chain_steps: usize,
    pub fallback: FallbackPolicy,
    /// Penalty weight for K >= 3 (None selects the midpoint; must stay None
    /// for K = 2).
    pub lambda_w: Option<f64>,
    /// Diagnostic only: replaces the calibrated inverse temperature so the
    /// audit can demonstrate it detects a broken mechanism. Never set in
    /// production paths.
    pub eta_override: Option<f64>,
    /// Cap on balanced-set enumeration.
    pub enumeration_cap: f64,
}

impl MechanismConfig {
    pub fn new(epsilon: f64, envelope: DegreeEnvelope, sampler: SamplerKind) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon={epsilon} must be finite and >= 0"
            )));
        }
        Ok(MechanismConfig {
            epsilon,
            envelope,
            sampler,
            chain_steps: 100_000,
            fallback: FallbackPolicy::UniformBalanced,
            lambda_w: None,
            eta_override: None,
            enumeration_cap: ENUMERATION_CAP_DEFAULT,
        })
    }

    pub fn epsilon0(&self) -> f64 {
        self.epsilon / 2.0
    }

    /// Inverse temperature `epsilon0 / (2 delta_a) = epsilon / (4 delta_a)`.
    pub fn eta(&self) -> f64 {
        match self.eta_override {
            Some(eta) => eta,
            None => self.epsilon / (4.0 * self.envelope.delta_a),
        }
    }
}

/// The exact Exponential-Mechanism law over the balanced labelings of one
/// graph, kept in log space.
#[derive(Debug, Clone)]
pub struct EmDistribution {
    pub support: Vec<Labeling>,
    /// `eta * T(sigma)` per support element.
    pub log_weights: Vec<f64>,
    pub log_partition: f64,
}

impl EmDistribution {
    pub fn log_probs(&self) -> Vec<f64> {
        self.log_weights
            .iter()
            .map(|w| w - self.log_partition)
            .collect()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs().into_iter().map(f64::exp).collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &Labeling {
        let probs = self.probs();
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (sigma, p) in self.support.iter().zip(&probs) {
            cum += p;
            if u < cum {
                return sigma;
            }
        }
        self.support.last().expect("nonempty support")
    }
}

/// Normalized log-probabilities for scores at inverse temperature `eta`,
/// via log-sum-exp; the linear-scale partition function never appears.
pub fn softmax_log_weights(scores: &[f64], eta: f64) -> (Vec<f64>, f64) {
    let weights: Vec<f64> = scores.iter().map(|t| eta * t).collect();
    let log_partition = log_sum_exp(&weights);
    (weights, log_partition)
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Exact EM probabilities over the balanced set.
pub fn em_distribution(
    ctx: &ScoreContext,
    cfg: &MechanismConfig,
    params: &SbmParams,
) -> Result<EmDistribution> {
    let support = enumerate_balanced_capped(params, cfg.enumeration_cap)?;
    if support.is_empty() {
        return Err(Error::EmptySigma);
    }
    let scores: Vec<f64> = support.iter().map(|sigma| ctx.score(sigma)).collect();
    let (log_weights, log_partition) = softmax_log_weights(&scores, cfg.eta());
    Ok(EmDistribution {
        support,
        log_weights,
        log_partition,
    })
}

/// Draw one labeling from the mechanism restricted to the balanced set.
///
/// Exact and Gumbel-max draws are distributionally identical; the Metropolis
/// chain is approximate and flagged as such in run metadata.
pub fn sample_em(
    ctx: &ScoreContext,
    cfg: &MechanismConfig,
    params: &SbmParams,
    rng_seed: u64,
) -> Result<Labeling> {
    sample_em_stream(ctx, cfg, params, rng_seed, 0)
}

pub fn sample_em_stream(
    ctx: &ScoreContext,
    cfg: &MechanismConfig,
    params: &SbmParams,
    rng_seed: u64,
    stream: u64,
) -> Result<Labeling> {
    match cfg.sampler {
        SamplerKind::Exact => {
            let dist = em_distribution(ctx, cfg, params)?;
            let mut rng = stream_rng(rng_seed, StreamKind::Mechanism, stream);
            Ok(dist.sample(&mut rng).clone())
        }
        SamplerKind::Gumbel => {
            let support = enumerate_balanced_capped(params, cfg.enumeration_cap)?;
            if support.is_empty() {
                return Err(Error::EmptySigma);
            }
            let eta = cfg.eta();
            let mut rng = stream_rng(rng_seed, StreamKind::Mechanism, stream);
            let mut best = 0usize;
            let mut best_value = f64::NEG_INFINITY;
            for (idx, sigma) in support.iter().enumerate() {
                let u: f64 = rng.random();
                // Standard Gumbel noise; u in (0,1) exclusive by construction.
                let gumbel = -(-(u.max(f64::MIN_POSITIVE)).ln()).ln();
                let value = eta * ctx.score(sigma) + gumbel;
                if value > best_value {
                    best_value = value;
                    best = idx;
                }
            }
            Ok(support[best].clone())
        }
        SamplerKind::Metropolis => metropolis_chain(ctx, cfg, params, rng_seed, stream),
    }
}

/// Single-vertex relabel Metropolis chain on the balanced set: uniform
/// vertex and label proposals, moves leaving the window rejected outright,
/// acceptance `min(1, exp(eta * delta T))`. Stationary law is the EM law
/// when the move graph is connected, which is instance-dependent.
fn metropolis_chain(
    ctx: &ScoreContext,
    cfg: &MechanismConfig,
    params: &SbmParams,
    rng_seed: u64,
    stream: u64,
) -> Result<Labeling> {
    if cfg.chain_steps == 0 {
        return Err(Error::InvalidParameter("chain_steps must be >= 1".into()));
    }
    let mut sigma = canonical_balanced(params)?;
    let n = params.n();
    let k = params.k();
    let (lo, hi) = params.balance_window();
    let lo_int = lo.ceil() as usize;
    let hi_int = hi.floor() as usize;
    let mut counts = sigma.class_counts(k);
    let eta = cfg.eta();
    let mut rng = stream_rng(rng_seed, StreamKind::Chain, stream);
    for _ in 0..cfg.chain_steps {
        let vertex = rng.random_range(0..n);
        let new_label = rng.random_range(0..k as u16);
        let old_label = sigma.label(vertex);
        if new_label == old_label {
            continue;
        }
        if counts[old_label as usize] - 1 < lo_int || counts[new_label as usize] + 1 > hi_int {
            continue;
        }
        let delta = ctx.score_delta(&sigma, vertex, new_label);
        let accept = delta >= 0.0 || rng.random::<f64>() < (eta * delta).exp();
        if accept {
            counts[old_label as usize] -= 1;
            counts[new_label as usize] += 1;
            sigma.set_label(vertex, new_label);
        }
    }
    Ok(sigma)
}

/// Metadata describing one estimator run; serialized as the JSON record.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatorRecord {
    pub epsilon: f64,
    pub epsilon0: f64,
    pub eta: f64,
    pub envelope_member: bool,
    pub sampler: String,
    /// True when the draw came from an approximate chain rather than the
    /// exact law.
    pub approximate: bool,
    pub fallback_applied: bool,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    /// 1-based labels; None when the reject policy abstained.
    pub labeling: Option<Vec<usize>>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct EstimatorRun {
    pub labeling: Option<Labeling>,
    pub record: EstimatorRecord,
}

/// The full-domain estimator: EM on the envelope at budget `epsilon0 =
/// epsilon/2`, the configured fallback outside it.
pub fn run_private_estimator(
    g: &Graph,
    cfg: &MechanismConfig,
    params: &SbmParams,
    rng_seed: u64,
) -> Result<EstimatorRun> {
    run_private_estimator_stream(g, cfg, params, rng_seed, 0)
}

pub fn run_private_estimator_stream(
    g: &Graph,
    cfg: &MechanismConfig,
    params: &SbmParams,
    rng_seed: u64,
    stream: u64,
) -> Result<EstimatorRun> {
    let member = in_envelope(g, &cfg.envelope);
    let (labeling, fallback_applied) = if member {
        let lambda = crate::info::penalty_lambda(params, cfg.lambda_w)?;
        let ctx = ScoreContext::new(g.clone(), lambda);
        (Some(sample_em_stream(&ctx, cfg, params, rng_seed, stream)?), false)
    } else {
        match cfg.fallback {
            FallbackPolicy::UniformBalanced => {
                let uniform = uniform_balanced_draw(cfg, params, rng_seed, stream)?;
                (Some(uniform), true)
            }
            FallbackPolicy::Reject => (None, true),
        }
    };
    let record = EstimatorRecord {
        epsilon: cfg.epsilon,
        epsilon0: cfg.epsilon0(),
        eta: cfg.eta(),
        envelope_member: member,
        sampler: cfg.sampler.as_str().to_string(),
        approximate: matches!(cfg.sampler, SamplerKind::Metropolis),
        fallback_applied,
        n: params.n(),
        k: params.k(),
        a: params.a(),
        b: params.b(),
        beta: params.beta(),
        labeling: labeling
            .as_ref()
            .map(|l| l.labels().iter().map(|&x| x as usize + 1).collect()),
        seed: rng_seed,
    };
    Ok(EstimatorRun { labeling, record })
}

fn uniform_balanced_draw(
    cfg: &MechanismConfig,
    params: &SbmParams,
    rng_seed: u64,
    stream: u64,
) -> Result<Labeling> {
    match cfg.sampler {
        SamplerKind::Metropolis => {
            // Zero-temperature chain: uniform stationary law on the window.
            let mut flat = cfg.clone();
            flat.eta_override = Some(0.0);
            let ctx = ScoreContext::new(Graph::empty(params.n()), 0.0);
            metropolis_chain(&ctx, &flat, params, rng_seed, stream)
        }
        _ => {
            let support = enumerate_balanced_capped(params, cfg.enumeration_cap)?;
            if support.is_empty() {
                return Err(Error::EmptySigma);
            }
            let mut rng = stream_rng(rng_seed, StreamKind::Mechanism, stream);
            Ok(support[rng.random_range(0..support.len())].clone())
        }
    }
}

/// Exact output law of the full-domain estimator on one graph: EM
/// probabilities inside the envelope, the fallback law outside. `abstain`
/// carries the reject-policy mass. Only meaningful for the exact sampler.
#[derive(Debug, Clone)]
pub struct OutputLaw {
    pub support: Vec<Labeling>,
    pub log_probs: Vec<f64>,
    pub abstain: f64,
}

impl OutputLaw {
    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().copied().map(f64::exp).collect()
    }
}

pub fn exact_output_law(
    g: &Graph,
    cfg: &MechanismConfig,
    params: &SbmParams,
) -> Result<OutputLaw> {
    let support = enumerate_balanced_capped(params, cfg.enumeration_cap)?;
    if support.is_empty() {
        return Err(Error::EmptySigma);
    }
    if in_envelope(g, &cfg.envelope) {
        let lambda = crate::info::penalty_lambda(params, cfg.lambda_w)?;
        let ctx = ScoreContext::new(g.clone(), lambda);
        let dist = em_distribution(&ctx, cfg, params)?;
        Ok(OutputLaw {
            log_probs: dist.log_probs(),
            support: dist.support,
            abstain: 0.0,
        })
    } else {
        match cfg.fallback {
            FallbackPolicy::UniformBalanced => {
                let log_p = -(support.len() as f64).ln();
                Ok(OutputLaw {
                    log_probs: vec![log_p; support.len()],
                    support,
                    abstain: 0.0,
                })
            }
            FallbackPolicy::Reject => Ok(OutputLaw {
                log_probs: vec![f64::NEG_INFINITY; support.len()],
                support,
                abstain: 1.0,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::node_distance;
    use crate::info::penalty_lambda;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn params_n4() -> SbmParams {
        SbmParams::new(4, 2, 2.0, 1.0, 1.0).unwrap()
    }

    fn ctx_for(g: Graph, params: &SbmParams) -> ScoreContext {
        ScoreContext::new(g, penalty_lambda(params, None).unwrap())
    }

    fn default_cfg(epsilon: f64, params: &SbmParams) -> MechanismConfig {
        let env = DegreeEnvelope::new(10.0, params.a(), params.n());
        MechanismConfig::new(epsilon, env, SamplerKind::Exact).unwrap()
    }

    #[test]
    fn zero_budget_gives_uniform_law() {
        let params = params_n4();
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let cfg = default_cfg(0.0, &params);
        let dist = em_distribution(&ctx_for(g, &params), &cfg, &params).unwrap();
        let probs = dist.probs();
        assert_eq!(probs.len(), 6);
        for p in &probs {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_support_is_balanced() {
        let params = params_n4();
        let g = Graph::from_bitmask(4, 0b101101);
        let cfg = default_cfg(3.0, &params);
        let dist = em_distribution(&ctx_for(g, &params), &cfg, &params).unwrap();
        let total: f64 = dist.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for sigma in &dist.support {
            assert!(crate::labeling::is_balanced(sigma, &params));
        }
    }

    #[test]
    fn softmax_matches_hand_computed_values() {
        // Equal scores halve; a single spike follows e^s / (5 + e^s).
        let (w, z) = softmax_log_weights(&[1.7, 1.7], 1.0);
        for weight in w {
            assert!(((weight - z).exp() - 0.5).abs() < 1e-12);
        }
        for s in [0.5, 1.0, 3.0] {
            let scores = [0.0, 0.0, 0.0, 0.0, 0.0, s];
            let (w, z) = softmax_log_weights(&scores, 1.0);
            let top = (w[5] - z).exp();
            let want = s.exp() / (5.0 + s.exp());
            assert!((top - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_sampler_matches_law_chi_squared() {
        let params = params_n4();
        let g = Graph::from_bitmask(4, 0b011011);
        let cfg = default_cfg(4.0, &params);
        let ctx = ctx_for(g, &params);
        let dist = em_distribution(&ctx, &cfg, &params).unwrap();
        let probs = dist.probs();
        let draws = 20_000usize;
        let mut counts = vec![0usize; probs.len()];
        for d in 0..draws {
            let sigma = sample_em_stream(&ctx, &cfg, &params, 31, d as u64).unwrap();
            let idx = dist.support.iter().position(|s| *s == sigma).unwrap();
            counts[idx] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&o, &p)| {
                let e = p * draws as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        let chi = ChiSquared::new((probs.len() - 1) as f64).unwrap();
        let p_value = 1.0 - chi.cdf(stat);
        assert!(p_value > 0.001, "chi2 {stat}, p {p_value}");
    }

    #[test]
    fn gumbel_and_exact_agree_in_distribution() {
        let params = params_n4();
        let g = Graph::from_bitmask(4, 0b110101);
        let exact_cfg = default_cfg(6.0, &params);
        let mut gumbel_cfg = exact_cfg.clone();
        gumbel_cfg.sampler = SamplerKind::Gumbel;
        let ctx = ctx_for(g, &params);
        let dist = em_distribution(&ctx, &exact_cfg, &params).unwrap();
        let draws = 20_000usize;
        let mut counts = vec![0usize; dist.support.len()];
        for d in 0..draws {
            let sigma = sample_em_stream(&ctx, &gumbel_cfg, &params, 77, d as u64).unwrap();
            let idx = dist.support.iter().position(|s| *s == sigma).unwrap();
            counts[idx] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(dist.probs())
            .map(|(&o, p)| (o as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.02, "TV {tv}");
    }

    #[test]
    fn metropolis_approaches_exact_law() {
        // n=6, beta=1.5 keeps single-vertex moves inside the window.
        let params = SbmParams::new(6, 2, 3.0, 1.0, 1.5).unwrap();
        let g = Graph::from_bitmask(6, 0b101_1010_0110_1001);
        let env = DegreeEnvelope::new(2.0, params.a(), params.n());
        let mut cfg = MechanismConfig::new(20.0, env, SamplerKind::Metropolis).unwrap();
        cfg.chain_steps = 2_000;
        let ctx = ctx_for(g, &params);
        let exact_cfg = MechanismConfig {
            sampler: SamplerKind::Exact,
            ..cfg.clone()
        };
        let dist = em_distribution(&ctx, &exact_cfg, &params).unwrap();
        let draws = 6_000usize;
        let mut counts = vec![0usize; dist.support.len()];
        for d in 0..draws {
            let sigma = sample_em_stream(&ctx, &cfg, &params, 13, d as u64).unwrap();
            let idx = dist.support.iter().position(|s| *s == sigma).unwrap();
            counts[idx] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(dist.probs())
            .map(|(&o, p)| (o as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.08, "TV {tv}");
    }

    #[test]
    fn estimator_uses_em_law_inside_envelope() {
        let params = params_n4();
        let cfg = default_cfg(2.0, &params);
        let g = Graph::from_bitmask(4, 0b111000);
        let law = exact_output_law(&g, &cfg, &params).unwrap();
        let ctx = ctx_for(g.clone(), &params);
        let dist = em_distribution(&ctx, &cfg, &params).unwrap();
        for (a, b) in law.probs().iter().zip(dist.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
        let run = run_private_estimator(&g, &cfg, &params, 5).unwrap();
        assert!(run.record.envelope_member);
        assert!(!run.record.fallback_applied);
        assert!(run.labeling.is_some());
    }

    #[test]
    fn fallback_outside_envelope() {
        let params = params_n4();
        // Tiny envelope: threshold below every positive degree.
        let env = DegreeEnvelope::from_scale(0.25, 1.0);
        let mut cfg = MechanismConfig::new(2.0, env, SamplerKind::Exact).unwrap();
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!in_envelope(&g, &env));

        let law = exact_output_law(&g, &cfg, &params).unwrap();
        for p in &law.probs() {
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }
        let run = run_private_estimator(&g, &cfg, &params, 8).unwrap();
        assert!(!run.record.envelope_member);
        assert!(run.record.fallback_applied);
        assert!(run.labeling.is_some());

        cfg.fallback = FallbackPolicy::Reject;
        let run = run_private_estimator(&g, &cfg, &params, 8).unwrap();
        assert!(run.labeling.is_none());
        assert_eq!(run.record.labeling, None);
        let law = exact_output_law(&g, &cfg, &params).unwrap();
        assert_eq!(law.abstain, 1.0);
    }

    #[test]
    fn concentration_as_budget_grows() {
        // P(score = max) is nondecreasing in epsilon and reaches ~1.
        let params = params_n4();
        let g = Graph::from_bitmask(4, 0b010011);
        let ctx = ctx_for(g.clone(), &params);
        let scores: Vec<f64> = enumerate_balanced_capped(&params, 1e6)
            .unwrap()
            .iter()
            .map(|s| ctx.score(s))
            .collect();
        let max_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut last = 0.0;
        let mut final_mass = 0.0;
        for epsilon in [0.0, 1.0, 4.0, 16.0, 64.0, 256.0, 2048.0, 16384.0] {
            let cfg = default_cfg(epsilon, &params);
            let dist = em_distribution(&ctx, &cfg, &params).unwrap();
            let argmax_mass: f64 = scores
                .iter()
                .zip(dist.probs())
                .filter(|(s, _)| **s >= max_score - 1e-12)
                .map(|(_, p)| p)
                .sum();
            assert!(argmax_mass >= last - 1e-12, "mass dropped");
            last = argmax_mass;
            final_mass = argmax_mass;
        }
        assert!(final_mass > 0.999, "final argmax mass {final_mass}");
    }

    #[test]
    fn law_is_orbit_invariant() {
        let params = params_n4();
        let g = Graph::from_bitmask(4, 0b100110);
        let cfg = default_cfg(5.0, &params);
        let law = exact_output_law(&g, &cfg, &params).unwrap();
        for (idx, sigma) in law.support.iter().enumerate() {
            let swapped = sigma.permuted(&[1, 0]);
            let other = law.support.iter().position(|s| *s == swapped).unwrap();
            assert!((law.log_probs[idx] - law.log_probs[other]).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_function_sandwich_at_n4() {
        // log Z_A - log Z_A' within +/- epsilon0 d_v / 2, exhaustively.
        let params = params_n4();
        let cfg = default_cfg(2.0, &params);
        let eps0 = cfg.epsilon0();
        let mut log_zs = Vec::new();
        for mask in 0..64u64 {
            let g = Graph::from_bitmask(4, mask);
            let ctx = ctx_for(g, &params);
            let dist = em_distribution(&ctx, &cfg, &params).unwrap();
            log_zs.push(dist.log_partition);
        }
        for a in 0..64usize {
            let ga = Graph::from_bitmask(4, a as u64);
            for b in 0..64usize {
                let gb = Graph::from_bitmask(4, b as u64);
                let d = node_distance(&ga, &gb).unwrap().value as f64;
                let gap = (log_zs[a] - log_zs[b]).abs();
                assert!(gap <= eps0 * d / 2.0 + 1e-9, "gap {gap} at d={d}");
            }
        }
    }

    #[test]
    fn empty_sigma_is_reported() {
        let params = SbmParams::new(8, 3, 2.0, 1.0, 1.2).unwrap();
        let cfg = MechanismConfig::new(
            1.0,
            DegreeEnvelope::new(10.0, 2.0, 8),
            SamplerKind::Exact,
        )
        .unwrap();
        let g = Graph::empty(8);
        assert!(matches!(
            run_private_estimator(&g, &cfg, &params, 1),
            Err(Error::EmptySigma)
        ));
    }
}
