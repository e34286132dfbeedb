//! Small statistical helpers shared by the audit and experiment harnesses.

/// z for two-sided 99% intervals.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Normal-approximation interval for a sample mean.
pub fn mean_ci(values: &[f64], z: f64) -> (f64, f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n.max(1.0);
    let half = z * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

/// Pool-adjacent-violators fit of a non-increasing sequence (least squares).
pub fn isotonic_non_increasing(values: &[f64]) -> Vec<f64> {
    // Fit a non-decreasing sequence to the negated values.
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let fitted = isotonic_non_decreasing(&negated);
    fitted.into_iter().map(|v| -v).collect()
}

fn isotonic_non_decreasing(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new(); // (mean, weight)
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let last = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            if prev.0 <= last.0 {
                break;
            }
            let weight = prev.1 + last.1;
            let mean = (prev.0 * prev.1 as f64 + last.0 * last.1 as f64) / weight as f64;
            blocks.truncate(blocks.len() - 2);
            blocks.push((mean, weight));
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (mean, weight) in blocks {
        out.extend(std::iter::repeat_n(mean, weight));
    }
    out
}
