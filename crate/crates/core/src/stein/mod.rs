//! Chatterjee's statistic `T`, the normal-approximation bound built from it,
//! and distances to the standard normal law.
//!
//! For independent blocks `X = (X_1, …, X_n)`, an independent copy `X'` and
//! `A ⊆ [n]`, `X^A` takes block `i` from `X'` when `i ∈ A`. With
//! `Δ_j f(X) = f(X) − f(X^{j})`,
//! `T = ½ Σ_{A ⊊ [n]} Σ_{j ∉ A} Δ_j f(X) Δ_j f(X^A) / (C(n, |A|) (n − |A|))`
//! satisfies `E T = Var f(X)`.

pub mod decomposition;
pub mod distance;
pub mod models;
pub mod stats;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, stream};

pub use decomposition::{variance_decomposition_check, VarianceDecomposition};
pub use distance::{
    dkw_slack, kolmogorov_distance, normal_cdf, normal_pdf, normal_quantile, standardize, wasserstein_distance,
    DistanceReport,
};
pub use models::{LatticeMstModel, PoissonBlockModel};
pub use stats::{batch_means_se, bootstrap, mean, variance, BootstrapSummary};

/// Largest block count for which `T` is computed by full enumeration.
pub const EXACT_LIMIT: usize = 12;

/// `f(X^A)` for fixed `(X, X')`.
pub trait ResamplingModel: Sync {
    fn n_blocks(&self) -> usize;
    /// `resampled[i]` is true when block `i` comes from `X'`.
    fn evaluate(&self, resampled: &[bool]) -> f64;
}

/// A functional of independent random blocks.
pub trait BlockModel: Sync {
    type Block: Clone + Send + Sync;
    fn n_blocks(&self) -> usize;
    /// Block `j` of the draw identified by `seed`.
    fn draw_block(&self, j: usize, seed: u64) -> Self::Block;
    fn value(&self, blocks: &[Self::Block]) -> f64;

    fn draw(&self, seed: u64) -> Vec<Self::Block> {
        (0..self.n_blocks()).map(|j| self.draw_block(j, seed)).collect()
    }
}

/// A block model with its base draw `X` and fresh draw `X'` fixed.
pub struct Resampled<'a, M: BlockModel> {
    model: &'a M,
    base: Vec<M::Block>,
    fresh: Vec<M::Block>,
}

impl<'a, M: BlockModel> Resampled<'a, M> {
    pub fn new(model: &'a M, base_seed: u64, fresh_seed: u64) -> Self {
        Self {
            model,
            base: model.draw(base_seed),
            fresh: model.draw(fresh_seed),
        }
    }

    pub fn base(&self) -> &[M::Block] {
        &self.base
    }
}

impl<M: BlockModel> ResamplingModel for Resampled<'_, M> {
    fn n_blocks(&self) -> usize {
        self.model.n_blocks()
    }

    fn evaluate(&self, resampled: &[bool]) -> f64 {
        let blocks: Vec<M::Block> = self
            .base
            .iter()
            .zip(&self.fresh)
            .zip(resampled)
            .map(|((x, y), &r)| if r { y.clone() } else { x.clone() })
            .collect();
        self.model.value(&blocks)
    }
}

fn singleton(n: usize, j: usize) -> Vec<bool> {
    let mut s = vec![false; n];
    s[j] = true;
    s
}

/// Independent single-draw estimates `(n/2) Δ_J f(X) Δ_J f(X^A)` with `m`
/// uniform on `0..n`, `A` a uniform `m`-subset and `J` uniform off `A`.
/// Each has mean `T`.
pub fn sample_t<M: ResamplingModel + ?Sized>(model: &M, inner_reps: usize, seed: u64) -> Result<Vec<f64>> {
    let n = model.n_blocks();
    if n == 0 {
        return invalid("resampling model has no blocks");
    }
    if inner_reps == 0 {
        return invalid("inner_reps must be at least 1");
    }
    let f0 = model.evaluate(&vec![false; n]);
    Ok((0..inner_reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[0x5453_414d, i as u64]);
            let m = rng.random_range(0..n);
            let mut picked = sample_indices(&mut rng, n, m + 1).into_vec();
            let last = rng.random_range(0..=m);
            picked.swap(last, m);
            let (a, j) = (&picked[..m], picked[m]);
            let mut mask = vec![false; n];
            for &i in a {
                mask[i] = true;
            }
            let fa = model.evaluate(&mask);
            mask[j] = true;
            let faj = model.evaluate(&mask);
            let dj = f0 - model.evaluate(&singleton(n, j));
            0.5 * n as f64 * dj * (fa - faj)
        })
        .collect())
}

/// `T` by summing over all `2^n` resampling sets.
pub fn exact_t<M: ResamplingModel + ?Sized>(model: &M) -> Result<f64> {
    let n = model.n_blocks();
    if n == 0 {
        return invalid("resampling model has no blocks");
    }
    if n > 20 {
        return invalid(format!("exact T with {n} blocks is too large"));
    }
    let values = all_subsets(model);
    let full = (1usize << n) - 1;
    let binom = binomials(n);
    let dx: Vec<f64> = (0..n).map(|j| values[0] - values[1 << j]).collect();
    let total: f64 = (0..full)
        .into_par_iter()
        .map(|a| {
            let size = a.count_ones() as usize;
            let weight = 1.0 / (binom[size] * (n - size) as f64);
            (0..n)
                .filter(|j| a & (1 << j) == 0)
                .map(|j| dx[j] * (values[a] - values[a | (1 << j)]))
                .sum::<f64>()
                * weight
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(0.5 * total)
}

fn all_subsets<M: ResamplingModel + ?Sized>(model: &M) -> Vec<f64> {
    let n = model.n_blocks();
    (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            let sel: Vec<bool> = (0..n).map(|j| mask & (1 << j) != 0).collect();
            model.evaluate(&sel)
        })
        .collect()
}

fn binomials(n: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; n + 1];
    for k in 1..=n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

/// `Σ_j |Δ_j f(X)|^3`, exactly for small models, otherwise estimated as
/// `n |Δ_J f(X)|^3` averaged over `reps` uniform draws of `J`.
pub fn third_moment_sum<M: ResamplingModel + ?Sized>(model: &M, reps: usize, seed: u64) -> Result<f64> {
    let n = model.n_blocks();
    if n == 0 {
        return invalid("resampling model has no blocks");
    }
    let f0 = model.evaluate(&vec![false; n]);
    let cube = |j: usize| (f0 - model.evaluate(&singleton(n, j))).abs().powi(3);
    if n <= EXACT_LIMIT || reps >= n {
        return Ok((0..n).into_par_iter().map(cube).collect::<Vec<f64>>().iter().sum());
    }
    let mut rng = stream(seed, &[0x4d4f_4d33]);
    let js: Vec<usize> = (0..reps.max(1)).map(|_| rng.random_range(0..n)).collect();
    let vals: Vec<f64> = js.into_par_iter().map(cube).collect();
    Ok(n as f64 * mean(&vals))
}

/// Per-draw quantities behind [`stein_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinDraw {
    pub f: f64,
    pub t: f64,
    pub third: f64,
}

/// `T` for one `(X, X')`: exact up to [`EXACT_LIMIT`] blocks, else the mean
/// of `inner_reps` single-draw estimates.
pub fn t_value<M: ResamplingModel + ?Sized>(model: &M, inner_reps: usize, seed: u64) -> Result<f64> {
    if model.n_blocks() <= EXACT_LIMIT {
        exact_t(model)
    } else {
        Ok(mean(&sample_t(model, inner_reps, seed)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinEstimate {
    pub t_mean: f64,
    /// `Var T`, an upper bound for `Var E(T | W)`.
    pub t_var: f64,
    pub sigma2_hat: f64,
    pub third_moment_sum: f64,
    pub bound_value: f64,
    pub f_mean: f64,
    pub replicates: usize,
    pub inner_reps: usize,
    pub exact_t: bool,
    pub se_t_mean: f64,
    pub se_t_var: f64,
    pub se_sigma2_hat: f64,
    pub se_third_moment_sum: f64,
    pub se_bound_value: f64,
}

/// `√Var(T) / σ² + Σ_j E|Δ_j f|³ / (2σ³)`, over `outer_reps` fresh pairs `(X, X')`.
pub fn stein_bound<M: BlockModel>(model: &M, outer_reps: usize, inner_reps: usize, seed: u64) -> Result<SteinEstimate> {
    if outer_reps < 2 {
        return invalid("stein bound needs at least two outer replicates");
    }
    if inner_reps == 0 {
        return invalid("inner_reps must be at least 1");
    }
    if model.n_blocks() == 0 {
        return invalid("model has no blocks");
    }
    let draws = stein_draws(model, outer_reps, inner_reps, seed)?;
    summarize(&draws, inner_reps, model.n_blocks() <= EXACT_LIMIT)
}

/// One [`SteinDraw`] per outer replicate, in replicate order.
pub fn stein_draws<M: BlockModel>(model: &M, outer_reps: usize, inner_reps: usize, seed: u64) -> Result<Vec<SteinDraw>> {
    (0..outer_reps)
        .into_par_iter()
        .map(|i| {
            let base = derive_seed(seed, &[0x5842_4153, i as u64]);
            let fresh = derive_seed(seed, &[0x5846_5245, i as u64]);
            let inner = derive_seed(seed, &[0x5849_4e4e, i as u64]);
            let r = Resampled::new(model, base, fresh);
            Ok(SteinDraw {
                f: r.evaluate(&vec![false; model.n_blocks()]),
                t: t_value(&r, inner_reps, inner)?,
                third: third_moment_sum(&r, inner_reps, inner)?,
            })
        })
        .collect()
}

fn bound_of(f: &[f64], t: &[f64], third: &[f64]) -> f64 {
    let s2 = variance(f);
    variance(t).sqrt() / s2 + mean(third) / (2.0 * s2.powf(1.5))
}

pub fn summarize(draws: &[SteinDraw], inner_reps: usize, exact: bool) -> Result<SteinEstimate> {
    let f: Vec<f64> = draws.iter().map(|d| d.f).collect();
    let t: Vec<f64> = draws.iter().map(|d| d.t).collect();
    let third: Vec<f64> = draws.iter().map(|d| d.third).collect();
    let sigma2 = variance(&f);
    let scale = mean(&f.iter().map(|x| x.abs()).collect::<Vec<_>>()).max(f64::MIN_POSITIVE);
    if !(sigma2 > 1e-24 * scale * scale) {
        return Err(Error::Degenerate("functional has zero sample variance".into()));
    }
    let sq_dev = |x: &[f64]| {
        let m = mean(x);
        let k = x.len() as f64;
        x.iter().map(|v| (v - m) * (v - m) * k / (k - 1.0)).collect::<Vec<f64>>()
    };
    Ok(SteinEstimate {
        t_mean: mean(&t),
        t_var: variance(&t),
        sigma2_hat: sigma2,
        third_moment_sum: mean(&third),
        bound_value: bound_of(&f, &t, &third),
        f_mean: mean(&f),
        replicates: draws.len(),
        inner_reps,
        exact_t: exact,
        se_t_mean: batch_means_se(&t),
        se_t_var: batch_means_se(&sq_dev(&t)),
        se_sigma2_hat: batch_means_se(&sq_dev(&f)),
        se_third_moment_sum: batch_means_se(&third),
        se_bound_value: stats::batch_rows_se(&[&f, &t, &third], 2, |c| bound_of(c[0], c[1], c[2])),
    })
}
