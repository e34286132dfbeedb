//! Monte-Carlo risk estimation: epsilon sweeps with a non-private baseline,
//! lower-bound floor overlays, and feasibility records.

use crate::audit::risk_floor;
use crate::error::{Error, Result};
use crate::info::{renyi_half, signal};
use crate::labeling::{
    canonical_balanced, enumerate_balanced, mismatch_ratio, round_robin_balanced, Labeling,
    SbmParams,
};
use crate::mechanism::{FallbackPolicy, MechanismConfig, SamplerKind};
use crate::rng::{stream_rng, StreamKind};
use crate::sbm::sample_sbm_stream;
use crate::score::{in_envelope, DegreeEnvelope, ScoreContext};
use crate::stats::{mean_ci, wilson_ci, Z_99};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Unnamed absolute constants surfaced as knobs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Constants {
    pub c_s: f64,
    pub c_mg: f64,
    pub c0: f64,
    pub c1: f64,
    pub c3: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c_s: 1.0,
            c_mg: 1.0,
            c0: 1.0,
            c1: 1.0,
            c3: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthMode {
    /// One fixed, maximally balanced labeling for every replicate.
    FixedBalanced,
    /// A fresh uniform draw from the balanced set per replicate
    /// (enumeration scale only).
    UniformRandom,
}

/// One sweep cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub envelope_c: f64,
    pub sampler: SamplerKind,
    #[serde(default = "default_chain_steps")]
    pub chain_steps: usize,
}

fn default_chain_steps() -> usize {
    100_000
}

/// Cartesian grid, expanded into cells in deterministic order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub beta: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub envelope_c: Vec<f64>,
    pub sampler: SamplerKind,
    #[serde(default = "default_chain_steps")]
    pub chain_steps: usize,
}

impl SweepGrid {
    pub fn expand(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        for &n in &self.n {
            for &k in &self.k {
                for &a in &self.a {
                    for &b in &self.b {
                        for &beta in &self.beta {
                            for &epsilon in &self.epsilon {
                                for &envelope_c in &self.envelope_c {
                                    cells.push(SweepCell {
                                        n,
                                        k,
                                        a,
                                        b,
                                        beta,
                                        epsilon,
                                        envelope_c,
                                        sampler: self.sampler,
                                        chain_steps: self.chain_steps,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub cells: Vec<SweepCell>,
    pub replicates: u64,
    pub seed: u64,
    pub truth_mode: TruthMode,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub lambda_w: Option<f64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be >= 1".into()));
        }
        if self.cells.is_empty() {
            return Err(Error::InvalidParameter("no sweep cells".into()));
        }
        for cell in &self.cells {
            SbmParams::new(cell.n, cell.k, cell.a, cell.b, cell.beta)?;
        }
        Ok(())
    }
}

/// Feasibility quantities for one cell: entropy rate, inverse temperature,
/// their gap, and the implied slack level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FeasibilityRecord {
    /// The entropy rate `C0 K log(nK) / (nI)`.
    pub b_rate: f64,
    pub eta: f64,
    pub gamma0: f64,
    pub alpha: f64,
    /// Slack level `(C1 log(nK) + log(4/alpha)) / gamma0`; infinite when
    /// infeasible.
    pub s_star: f64,
    pub feasible: bool,
}

pub fn feasibility_report(
    params: &SbmParams,
    epsilon: f64,
    envelope: &DegreeEnvelope,
    constants: &Constants,
) -> Result<FeasibilityRecord> {
    let n_i = params.n() as f64 * renyi_half(params)?;
    let log_nk = (params.n() as f64 * params.k() as f64).ln();
    let b_rate = constants.c0 * params.k() as f64 * log_nk / n_i;
    let eta = epsilon / (4.0 * envelope.delta_a);
    let gamma0 = eta - b_rate;
    let feasible = gamma0 > 0.0;
    // In the large-budget regime pick alpha = e^{-c3 eps/2}/(nK), clamped
    // into the admissible (0, 1/2); log(4/alpha) is formed analytically so
    // an underflowing alpha cannot poison s_star.
    let log_alpha = (-constants.c3 * epsilon / 2.0 - log_nk).min(0.25f64.ln());
    let alpha = log_alpha.exp();
    let s_star = if feasible {
        (constants.c1 * log_nk + 4.0f64.ln() - log_alpha) / gamma0
    } else {
        f64::INFINITY
    };
    Ok(FeasibilityRecord {
        b_rate,
        eta,
        gamma0,
        alpha,
        s_star,
        feasible,
    })
}

/// Smallest budget making the cell feasible: `4 delta_a B`.
pub fn min_feasible_epsilon(
    params: &SbmParams,
    envelope: &DegreeEnvelope,
    constants: &Constants,
) -> Result<f64> {
    let n_i = params.n() as f64 * renyi_half(params)?;
    let log_nk = (params.n() as f64 * params.k() as f64).ln();
    Ok(4.0 * envelope.delta_a * constants.c0 * params.k() as f64 * log_nk / n_i)
}

/// Aggregates for one cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub cell: SweepCell,
    pub replicates: u64,
    pub mean_r: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub fail_frac: f64,
    pub fail_ci_lo: f64,
    pub fail_ci_hi: f64,
    pub envelope_exit_frac: f64,
    pub mle_mean_r: f64,
    pub floor_lb: f64,
    pub signal: f64,
    pub n_i: f64,
    pub feasible: bool,
    /// Paired per-replicate difference `r_em - r_mle` (mean, half-width).
    pub paired_diff_mean: f64,
    pub paired_diff_half_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub cells: Vec<CellReport>,
}

/// CSV schema, one row per cell.
pub const SWEEP_CSV_HEADER: &str = "n,K,a,b,beta,epsilon,C,sampler,replicates,mean_r,ci_lo,ci_hi,fail_frac,fail_ci_lo,fail_ci_hi,envelope_exit_frac,mle_mean_r,floor_lb,signal,nI,feasible";

impl RiskReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for report in &self.cells {
            let c = &report.cell;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                c.n,
                c.k,
                c.a,
                c.b,
                c.beta,
                c.epsilon,
                c.envelope_c,
                c.sampler.as_str(),
                report.replicates,
                report.mean_r,
                report.ci_lo,
                report.ci_hi,
                report.fail_frac,
                report.fail_ci_lo,
                report.fail_ci_hi,
                report.envelope_exit_frac,
                report.mle_mean_r,
                report.floor_lb,
                report.signal,
                report.n_i,
                report.feasible
            ));
        }
        out
    }
}

/// Overlay CSV schema: measured risk next to the minimax floor and the
/// non-private reference exp(-Signal).
pub const OVERLAY_CSV_HEADER: &str =
    "n,K,a,b,beta,epsilon,C,sampler,mean_r,ci_lo,ci_hi,floor_lb,nonprivate_ref,floor_respected";

pub fn lower_bound_overlay(report: &RiskReport) -> (String, bool) {
    let mut out = String::from(OVERLAY_CSV_HEADER);
    out.push('\n');
    let mut all_pass = true;
    for cell_report in &report.cells {
        let c = &cell_report.cell;
        let nonprivate_ref = (-cell_report.signal).exp();
        // Measured risk plus CI slack must clear the floor.
        let pass = cell_report.ci_hi >= cell_report.floor_lb - 1e-9;
        all_pass &= pass;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.n,
            c.k,
            c.a,
            c.b,
            c.beta,
            c.epsilon,
            c.envelope_c,
            c.sampler.as_str(),
            cell_report.mean_r,
            cell_report.ci_lo,
            cell_report.ci_hi,
            cell_report.floor_lb,
            nonprivate_ref,
            pass
        ));
    }
    (out, all_pass)
}

/// Stream index for graph draws: cells sharing the same SBM parameters and
/// truth mode reuse graphs across epsilon values (common random numbers),
/// so risk curves in epsilon are paired comparisons.
fn graph_stream_index(cell: &SweepCell, truth_mode: TruthMode, replicate: u64) -> u64 {
    let mut h = 0xcbf29ce484222325u64; // FNV-1a
    let mut eat = |v: u64| {
        h ^= v;
        h = h.wrapping_mul(0x100000001b3);
    };
    eat(cell.n as u64);
    eat(cell.k as u64);
    eat(cell.a.to_bits());
    eat(cell.b.to_bits());
    eat(cell.beta.to_bits());
    eat(match truth_mode {
        TruthMode::FixedBalanced => 1,
        TruthMode::UniformRandom => 2,
    });
    h ^ replicate.wrapping_mul(0x9e3779b97f4a7c15)
}

struct ReplicateOutcome {
    r_em: f64,
    r_mle: f64,
    envelope_exit: bool,
}

pub fn run_risk_sweep(cfg: &SweepConfig) -> Result<RiskReport> {
    cfg.validate()?;
    let cells = cfg
        .cells
        .iter()
        .enumerate()
        .map(|(index, cell)| run_cell(cell, cfg, index as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskReport { cells })
}

fn run_cell(cell: &SweepCell, cfg: &SweepConfig, cell_index: u64) -> Result<CellReport> {
    let params = SbmParams::new(cell.n, cell.k, cell.a, cell.b, cell.beta)?;
    let envelope = DegreeEnvelope::new(cell.envelope_c, cell.a, cell.n);
    let mut mech = MechanismConfig::new(cell.epsilon, envelope, cell.sampler)?;
    mech.chain_steps = cell.chain_steps;
    mech.fallback = FallbackPolicy::UniformBalanced;
    mech.lambda_w = cfg.lambda_w;
    let lambda = crate::info::penalty_lambda(&params, cfg.lambda_w)?;

    let exact_support = match cell.sampler {
        SamplerKind::Metropolis => None,
        _ => {
            let support = enumerate_balanced(&params)?;
            if support.is_empty() {
                return Err(Error::EmptySigma);
            }
            Some(support)
        }
    };
    // Interleaved truth: the lexicographic argmax tie-break must not be
    // secretly aligned with the truth labeling.
    let fixed_truth = round_robin_balanced(&params)?;
    let climb_start = canonical_balanced(&params)?;

    let outcomes: Vec<ReplicateOutcome> = (0..cfg.replicates)
        .into_par_iter()
        .map(|replicate| -> Result<ReplicateOutcome> {
            let truth = match cfg.truth_mode {
                TruthMode::FixedBalanced => fixed_truth.clone(),
                TruthMode::UniformRandom => {
                    let support = exact_support.as_ref().ok_or_else(|| {
                        Error::InvalidParameter(
                            "uniform_random truth requires an enumerable cell".into(),
                        )
                    })?;
                    let mut rng = stream_rng(cfg.seed, StreamKind::Mechanism, u64::MAX - replicate);
                    support[rng.random_range(0..support.len())].clone()
                }
            };
            let g = sample_sbm_stream(
                &params,
                &truth,
                cfg.seed,
                graph_stream_index(cell, cfg.truth_mode, replicate),
            )?;
            let envelope_exit = !in_envelope(&g, &envelope);
            let mech_stream = (cell_index << 40) | replicate;
            let ctx = ScoreContext::new(g.clone(), lambda);
            let (estimate, mle) = match &exact_support {
                Some(support) => {
                    let scores: Vec<f64> = support.iter().map(|s| ctx.score(s)).collect();
                    let mle_idx = argmax(&scores);
                    let estimate = if envelope_exit {
                        let mut rng = stream_rng(cfg.seed, StreamKind::Mechanism, mech_stream);
                        support[rng.random_range(0..support.len())].clone()
                    } else {
                        let (log_w, log_z) =
                            crate::mechanism::softmax_log_weights(&scores, mech.eta());
                        let mut rng = stream_rng(cfg.seed, StreamKind::Mechanism, mech_stream);
                        let u: f64 = rng.random();
                        let mut cum = 0.0;
                        let mut chosen = support.len() - 1;
                        for (idx, w) in log_w.iter().enumerate() {
                            cum += (w - log_z).exp();
                            if u < cum {
                                chosen = idx;
                                break;
                            }
                        }
                        support[chosen].clone()
                    };
                    (estimate, support[mle_idx].clone())
                }
                None => {
                    let run = crate::mechanism::run_private_estimator_stream(
                        &g,
                        &mech,
                        &params,
                        cfg.seed,
                        mech_stream,
                    )?;
                    let estimate = run.labeling.expect("uniform fallback never abstains");
                    let mle = hill_climb(&ctx, &params, climb_start.clone());
                    (estimate, mle)
                }
            };
            Ok(ReplicateOutcome {
                r_em: mismatch_ratio(&truth, &estimate, cell.k),
                r_mle: mismatch_ratio(&truth, &mle, cell.k),
                envelope_exit,
            })
        })
        .collect::<Result<_>>()?;

    let rs: Vec<f64> = outcomes.iter().map(|o| o.r_em).collect();
    let (mean_r, ci_lo, ci_hi) = mean_ci(&rs, Z_99);
    let fails = outcomes.iter().filter(|o| o.r_em > 0.0).count() as u64;
    let (fail_ci_lo, fail_ci_hi) = wilson_ci(fails, cfg.replicates, Z_99);
    let exits = outcomes.iter().filter(|o| o.envelope_exit).count();
    let mle_rs: Vec<f64> = outcomes.iter().map(|o| o.r_mle).collect();
    let diffs: Vec<f64> = outcomes.iter().map(|o| o.r_em - o.r_mle).collect();
    let (diff_mean, diff_lo, diff_hi) = mean_ci(&diffs, Z_99);
    let feas = feasibility_report(&params, cell.epsilon, &envelope, &cfg.constants)?;
    Ok(CellReport {
        cell: cell.clone(),
        replicates: cfg.replicates,
        mean_r,
        ci_lo,
        ci_hi,
        fail_frac: fails as f64 / cfg.replicates as f64,
        fail_ci_lo,
        fail_ci_hi,
        envelope_exit_frac: exits as f64 / cfg.replicates as f64,
        mle_mean_r: mle_rs.iter().sum::<f64>() / mle_rs.len() as f64,
        floor_lb: risk_floor(cell.n, cell.epsilon),
        signal: signal(&params)?,
        n_i: cell.n as f64 * renyi_half(&params)?,
        feasible: feas.feasible,
        paired_diff_mean: diff_mean,
        paired_diff_half_width: (diff_hi - diff_lo) / 2.0,
    })
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0usize;
    for (idx, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = idx;
        }
    }
    best
}

/// Greedy single-vertex ascent used as the non-private baseline at chain
/// scale; exact enumeration replaces it wherever the support is enumerable.
fn hill_climb(ctx: &ScoreContext, params: &SbmParams, start: Labeling) -> Labeling {
    let n = params.n();
    let k = params.k() as u16;
    let (lo, hi) = params.balance_window();
    let (lo_int, hi_int) = (lo.ceil() as usize, hi.floor() as usize);
    let mut sigma = start;
    let mut counts = sigma.class_counts(params.k());
    for _ in 0..10 * n {
        let mut best: Option<(usize, u16, f64)> = None;
        for vertex in 0..n {
            let old = sigma.label(vertex);
            for label in 0..k {
                if label == old
                    || counts[old as usize] - 1 < lo_int
                    || counts[label as usize] + 1 > hi_int
                {
                    continue;
                }
                let delta = ctx.score_delta(&sigma, vertex, label);
                if delta > best.map_or(1e-12, |(_, _, d)| d) {
                    best = Some((vertex, label, delta));
                }
            }
        }
        match best {
            Some((vertex, label, _)) => {
                counts[sigma.label(vertex) as usize] -= 1;
                counts[label as usize] += 1;
                sigma = sigma.with_label(vertex, label);
            }
            None => break,
        }
    }
    sigma
}
