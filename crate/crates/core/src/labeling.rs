//! Labelings, SBM parameter sets, and the balanced labeling set.

use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// Default cap on `K^n` candidate evaluations for exhaustive enumeration.
pub const ENUMERATION_CAP_DEFAULT: f64 = 2e7;

/// Largest K for which label alignment enumerates all K! permutations;
/// beyond it the assignment solver takes over.
const FACTORIAL_ALIGNMENT_MAX_K: usize = 6;

/// A community assignment for `n` vertices. Labels are stored 0-based
/// internally; the text format is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Labeling {
    labels: Vec<u16>,
}

impl Labeling {
    /// Build from 0-based labels, checking every value lies in `0..k`.
    pub fn new(labels: Vec<u16>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| (l as usize) >= k) {
            return Err(Error::InvalidParameter(format!(
                "label {} out of range for K={k}",
                bad + 1
            )));
        }
        Ok(Labeling { labels })
    }

    /// Build from 1-based labels as they appear in the text format.
    pub fn from_one_based(labels: &[usize], k: usize) -> Result<Self> {
        let zero_based: Vec<u16> = labels
            .iter()
            .map(|&l| {
                if l == 0 || l > k {
                    Err(Error::InvalidParameter(format!(
                        "label {l} out of range 1..={k}"
                    )))
                } else {
                    Ok((l - 1) as u16)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Labeling { labels: zero_based })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, vertex: usize) -> u16 {
        self.labels[vertex]
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// Class sizes under `k` communities.
    pub fn class_counts(&self, k: usize) -> Vec<usize> {
        let mut counts = vec![0usize; k];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Copy with one vertex relabeled.
    pub fn with_label(&self, vertex: usize, new_label: u16) -> Labeling {
        let mut labels = self.labels.clone();
        labels[vertex] = new_label;
        Labeling { labels }
    }

    pub(crate) fn set_label(&mut self, vertex: usize, new_label: u16) {
        self.labels[vertex] = new_label;
    }

    /// Apply a label permutation: vertex `i` gets `perm[old_label]`.
    pub fn permuted(&self, perm: &[u16]) -> Labeling {
        Labeling {
            labels: self.labels.iter().map(|&l| perm[l as usize]).collect(),
        }
    }

    /// Orbit representative under label permutations: classes renumbered by
    /// first appearance. Two labelings induce the same partition iff their
    /// canonical forms are equal.
    pub fn canonical_orbit_form(&self, k: usize) -> Vec<u16> {
        let mut rename = vec![u16::MAX; k];
        let mut next = 0u16;
        self.labels
            .iter()
            .map(|&l| {
                if rename[l as usize] == u16::MAX {
                    rename[l as usize] = next;
                    next += 1;
                }
                rename[l as usize]
            })
            .collect()
    }

    /// One line of 1-based labels, space separated.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.labels.iter().map(|&l| (l + 1).to_string()).collect();
        parts.join(" ")
    }

    pub fn parse_text(line: &str, k: usize) -> Result<Self> {
        let labels: Vec<usize> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad label token {tok:?}")))
            })
            .collect::<Result<_>>()?;
        Labeling::from_one_based(&labels, k)
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parameters of the homogeneous K-class SBM family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SbmParams {
    n: usize,
    k: usize,
    a: f64,
    b: f64,
    beta: f64,
}

impl SbmParams {
    pub fn new(n: usize, k: usize, a: f64, b: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n={n} must be >= 2")));
        }
        if k < 2 {
            return Err(Error::InvalidParameter(format!("K={k} must be >= 2")));
        }
        if k > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("K={k} too large")));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter("a, b must be finite".into()));
        }
        if b < 0.0 || b >= a {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= b < a, got a={a}, b={b}"
            )));
        }
        if a > n as f64 {
            return Err(Error::InvalidProbability { value: a / n as f64 });
        }
        if beta < 1.0 {
            return Err(Error::InvalidParameter(format!("beta={beta} must be >= 1")));
        }
        if k >= 3 && beta >= (5.0f64 / 3.0).sqrt() {
            return Err(Error::InvalidParameter(format!(
                "K>=3 requires beta < sqrt(5/3) ~ 1.2910, got {beta}"
            )));
        }
        let params = SbmParams { n, k, a, b, beta };
        let (lo, hi) = params.balance_window();
        if admissible_counts(lo, hi).is_none() {
            return Err(Error::EmptyBalanceWindow { lo, hi });
        }
        Ok(params)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Within-community edge probability a/n.
    pub fn p_within(&self) -> f64 {
        self.a / self.n as f64
    }

    /// Across-community edge probability b/n.
    pub fn p_across(&self) -> f64 {
        self.b / self.n as f64
    }

    /// The closed real interval every class size must lie in.
    pub fn balance_window(&self) -> (f64, f64) {
        let n = self.n as f64;
        let k = self.k as f64;
        (n / (self.beta * k), self.beta * n / k)
    }
}

/// Integer class sizes allowed by the window, if any.
fn admissible_counts(lo: f64, hi: f64) -> Option<(usize, usize)> {
    let lo_int = lo.ceil() as usize;
    let hi_int = hi.floor() as usize;
    if lo_int > hi_int {
        None
    } else {
        Some((lo_int, hi_int))
    }
}

/// Witness that a labeling is balanced: its class sizes, all inside the
/// window.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceCertificate {
    pub class_counts: Vec<usize>,
}

impl BalanceCertificate {
    pub fn certify(sigma: &Labeling, params: &SbmParams) -> Result<Self> {
        assert_eq!(sigma.n(), params.n(), "labeling length must equal n");
        let counts = sigma.class_counts(params.k());
        let (lo, hi) = params.balance_window();
        let ok = counts.iter().all(|&c| {
            let c = c as f64;
            c >= lo && c <= hi
        });
        if ok {
            Ok(BalanceCertificate {
                class_counts: counts,
            })
        } else {
            Err(Error::BalanceViolation {
                n: params.n(),
                k: params.k(),
                beta: params.beta(),
            })
        }
    }
}

/// True iff every class count lies in the closed interval
/// `[n/(beta K), beta n/K]`.
pub fn is_balanced(sigma: &Labeling, params: &SbmParams) -> bool {
    BalanceCertificate::certify(sigma, params).is_ok()
}

/// Exhaustive enumeration of the balanced labeling set, lexicographic order,
/// with the default candidate cap.
pub fn enumerate_balanced(params: &SbmParams) -> Result<Vec<Labeling>> {
    enumerate_balanced_capped(params, ENUMERATION_CAP_DEFAULT)
}

/// Enumeration with an explicit cap on `K^n` candidate evaluations.
pub fn enumerate_balanced_capped(params: &SbmParams, cap: f64) -> Result<Vec<Labeling>> {
    let n = params.n();
    let k = params.k();
    let candidates = (n as f64) * (k as f64).ln();
    if candidates > cap.ln() {
        return Err(Error::EnumerationTooLarge {
            candidates: candidates.exp(),
            cap,
        });
    }
    let (lo, hi) = params.balance_window();
    let (lo_int, hi_int) = match admissible_counts(lo, hi) {
        Some(bounds) => bounds,
        None => return Ok(Vec::new()),
    };
    let mut out = Vec::new();
    let mut labels = vec![0u16; n];
    let mut counts = vec![0usize; k];
    extend(&mut labels, 0, &mut counts, lo_int, hi_int, &mut out);
    Ok(out)
}

fn extend(
    labels: &mut Vec<u16>,
    pos: usize,
    counts: &mut Vec<usize>,
    lo: usize,
    hi: usize,
    out: &mut Vec<Labeling>,
) {
    let n = labels.len();
    if pos == n {
        if counts.iter().all(|&c| c >= lo) {
            out.push(Labeling {
                labels: labels.clone(),
            });
        }
        return;
    }
    // Prune: even assigning every remaining vertex optimally cannot repair a
    // deficit larger than the remaining slots.
    let remaining = n - pos;
    let deficit: usize = counts.iter().map(|&c| lo.saturating_sub(c)).sum();
    if deficit > remaining {
        return;
    }
    for label in 0..counts.len() {
        if counts[label] == hi {
            continue;
        }
        counts[label] += 1;
        labels[pos] = label as u16;
        extend(labels, pos + 1, counts, lo, hi, out);
        counts[label] -= 1;
    }
}

/// A deterministic, maximally balanced labeling: class sizes as equal as the
/// window allows, assigned in contiguous blocks.
pub fn canonical_balanced(params: &SbmParams) -> Result<Labeling> {
    let n = params.n();
    let k = params.k();
    let (lo, hi) = params.balance_window();
    let (lo_int, hi_int) = admissible_counts(lo, hi).ok_or(Error::EmptyBalanceWindow { lo, hi })?;

    // Most-equal split first; fall back to a window-feasible composition.
    let base = n / k;
    let rem = n % k;
    let equal: Vec<usize> = (0..k).map(|c| base + usize::from(c < rem)).collect();
    let counts = if equal.iter().all(|&c| c >= lo_int && c <= hi_int) {
        equal
    } else {
        feasible_composition(n, k, lo_int, hi_int).ok_or(Error::EmptySigma)?
    };
    let mut labels = Vec::with_capacity(n);
    for (class, &count) in counts.iter().enumerate() {
        labels.extend(std::iter::repeat_n(class as u16, count));
    }
    Ok(Labeling { labels })
}

/// A deterministic balanced labeling with classes interleaved round-robin
/// instead of in blocks; class sizes match [`canonical_balanced`]. Used
/// where a fixed truth must not coincide with the lexicographic extreme of
/// the balanced set.
pub fn round_robin_balanced(params: &SbmParams) -> Result<Labeling> {
    let block = canonical_balanced(params)?;
    let k = params.k();
    let mut quotas = block.class_counts(k);
    let mut labels = Vec::with_capacity(params.n());
    for cursor in 0..params.n() {
        let mut class = cursor % k;
        while quotas[class] == 0 {
            class = (class + 1) % k;
        }
        quotas[class] -= 1;
        labels.push(class as u16);
    }
    Ok(Labeling { labels })
}

/// Lexicographically first composition of `n` into `k` parts within
/// `[lo, hi]`, or None when the set is empty.
fn feasible_composition(n: usize, k: usize, lo: usize, hi: usize) -> Option<Vec<usize>> {
    let mut counts = Vec::with_capacity(k);
    let mut left = n;
    for slot in 0..k {
        let slots_after = k - slot - 1;
        // Choose the largest count that keeps the remainder feasible.
        let mut chosen = None;
        for c in (lo..=hi.min(left)).rev() {
            let rest = left - c;
            if rest >= slots_after * lo && rest <= slots_after * hi {
                chosen = Some(c);
                break;
            }
        }
        counts.push(chosen?);
        left -= counts[slot];
    }
    (left == 0).then_some(counts)
}

/// Exact orbit distance `min over label permutations of Hamming distance`.
pub fn orbit_distance(truth: &Labeling, estimate: &Labeling, k: usize) -> usize {
    assert_eq!(truth.n(), estimate.n(), "labelings must have equal length");
    let n = truth.n();
    let mut confusion = vec![vec![0i64; k]; k];
    for i in 0..n {
        confusion[truth.label(i) as usize][estimate.label(i) as usize] += 1;
    }
    let max_matches = if k <= FACTORIAL_ALIGNMENT_MAX_K {
        max_matches_factorial(&confusion, k)
    } else {
        max_matches_assignment(&confusion, k)
    };
    n - max_matches as usize
}

/// Permutation-invariant mis-match ratio in `[0, 1]`.
pub fn mismatch_ratio(truth: &Labeling, estimate: &Labeling, k: usize) -> f64 {
    orbit_distance(truth, estimate, k) as f64 / truth.n() as f64
}

fn max_matches_factorial(confusion: &[Vec<i64>], k: usize) -> i64 {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0i64;
    fn rec(perm: &mut Vec<usize>, depth: usize, confusion: &[Vec<i64>], best: &mut i64) {
        if depth == perm.len() {
            let score: i64 = perm
                .iter()
                .enumerate()
                .map(|(est, &truth)| confusion[truth][est])
                .sum();
            *best = (*best).max(score);
            return;
        }
        for i in depth..perm.len() {
            perm.swap(depth, i);
            rec(perm, depth + 1, confusion, best);
            perm.swap(depth, i);
        }
    }
    rec(&mut perm, 0, confusion, &mut best);
    best
}

/// Assignment-solver route used for large K; exposed to tests so the two
/// routes can be compared on the same inputs.
pub(crate) fn max_matches_assignment(confusion: &[Vec<i64>], k: usize) -> i64 {
    let peak = confusion
        .iter()
        .flat_map(|row| row.iter().copied())
        .max()
        .unwrap_or(0);
    let cost: Vec<Vec<i64>> = (0..k)
        .map(|est| (0..k).map(|truth| peak - confusion[truth][est]).collect())
        .collect();
    let assign = min_cost_assignment(&cost);
    assign
        .iter()
        .enumerate()
        .map(|(est, &truth)| confusion[truth][est])
        .sum()
}
