//! Sample moments, batch-means standard errors and percentile bootstrap.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::stream;
use crate::scalar::compensated_sum;

pub const BATCHES: usize = 32;

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    compensated_sum(x.iter().copied()) / x.len() as f64
}

/// Unbiased sample variance; NaN for fewer than two values.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return f64::NAN;
    }
    let m = mean(x);
    compensated_sum(x.iter().map(|v| (v - m) * (v - m))) / (x.len() - 1) as f64
}

/// Split `0..len` into `b` contiguous chunks of near-equal size.
fn chunks(len: usize, b: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    (0..b).map(move |i| (i * len / b)..((i + 1) * len / b))
}

/// Batch-means standard error of the mean of `x`, with up to 32 batches.
pub fn batch_means_se(x: &[f64]) -> f64 {
    batch_statistic_se(x, 1, mean)
}

/// Standard error of `stat(x)` from the spread of `stat` over up to 32
/// contiguous batches of at least `min_batch` values each.
pub fn batch_statistic_se(x: &[f64], min_batch: usize, stat: impl Fn(&[f64]) -> f64) -> f64 {
    let b = BATCHES.min(x.len() / min_batch.max(1));
    if b < 2 {
        return f64::NAN;
    }
    let values: Vec<f64> = chunks(x.len(), b).map(|r| stat(&x[r])).collect();
    (variance(&values) / b as f64).sqrt()
}

/// Standard error of a statistic of several aligned columns, by batches of rows.
pub fn batch_rows_se(columns: &[&[f64]], min_batch: usize, stat: impl Fn(&[&[f64]]) -> f64) -> f64 {
    let len = columns.first().map_or(0, |c| c.len());
    let b = BATCHES.min(len / min_batch.max(1));
    if b < 2 {
        return f64::NAN;
    }
    let values: Vec<f64> = chunks(len, b)
        .map(|r| {
            let cols: Vec<&[f64]> = columns.iter().map(|c| &c[r.clone()]).collect();
            stat(&cols)
        })
        .collect();
    (variance(&values) / b as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub estimate: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Nonparametric bootstrap of `stat` with percentile 95% interval.
pub fn bootstrap(
    x: &[f64],
    reps: usize,
    seed: u64,
    stat: impl Fn(&[f64]) -> f64 + Sync,
) -> BootstrapSummary {
    let estimate = stat(x);
    if x.is_empty() || reps < 2 {
        return BootstrapSummary {
            estimate,
            stderr: f64::NAN,
            ci_lo: f64::NAN,
            ci_hi: f64::NAN,
        };
    }
    let mut values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[0x424f_4f54, i as u64]);
            let resample: Vec<f64> = (0..x.len()).map(|_| x[rng.random_range(0..x.len())]).collect();
            stat(&resample)
        })
        .collect();
    let stderr = variance(&values).sqrt();
    values.sort_by(f64::total_cmp);
    let q = |p: f64| values[((p * (reps - 1) as f64).round() as usize).min(reps - 1)];
    BootstrapSummary {
        estimate,
        stderr,
        ci_lo: q(0.025),
        ci_hi: q(0.975),
    }
}
