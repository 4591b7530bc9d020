//! The four experiment families. Every replicate draws from a seed derived
//! from `(master seed, experiment tag, n, replicate)`, and results are
//! collected in replicate order, so the thread count never changes output.

use mstperc::geometry::{sample_poisson, Cube};
use mstperc::mst::{euclidean_mst, mst_weight, LatticeBox, Strategy};
use mstperc::percolation::{estimate_arm_probability, ArmEstimateSpec, ArmRow};
use mstperc::rng::derive_seed;
use mstperc::stein::{
    bootstrap, dkw_slack, kolmogorov_distance, mean, standardize, stein_draws, summarize, variance,
    wasserstein_distance, BlockModel, LatticeMstModel, PoissonBlockModel, SteinDraw, EXACT_LIMIT,
};
use rayon::prelude::*;

use crate::cache::Cache;
use crate::config::{ExperimentConfig, Kind, Model};
use crate::error::{LabError, LabResult};
use crate::output::Row;

const TAG_CLT: u64 = 0x434c_5400;
const TAG_VAR: u64 = 0x5641_5200;
const TAG_STEIN: u64 = 0x5354_4e00;
const TAG_BOOT: u64 = 0x4253_5400;

pub fn run(config: &ExperimentConfig, cache: Option<&Cache>) -> LabResult<Vec<Row>> {
    match config.kind {
        Kind::CltPoisson | Kind::CltLattice => run_clt(config, cache),
        Kind::ArmDecay => run_arm_decay(config),
        Kind::VarianceScaling => run_variance_scaling(config, cache),
        Kind::SteinBound => run_stein_bound(config),
    }
}

fn iid_se(x: &[f64]) -> f64 {
    (variance(x) / x.len() as f64).sqrt()
}

/// `(x_i − x̄)²` scaled so that its mean is the unbiased variance.
fn squared_deviations(x: &[f64]) -> Vec<f64> {
    let m = mean(x);
    let k = x.len() as f64;
    x.iter().map(|v| (v - m) * (v - m) * k / (k - 1.0)).collect()
}

/// MST length `M_n` of one replicate.
fn sample_mst_length(config: &ExperimentConfig, model: Model, n: usize, seed: u64, cache: Option<&Cache>) -> LabResult<f64> {
    match model {
        Model::Poisson => {
            let dom = Cube::centered(config.dimension, n as f64)?;
            let c = match cache {
                Some(cache) => cache.poisson(&dom, config.intensity, seed)?,
                None => sample_poisson(&dom, config.intensity, seed)?,
            };
            Ok(euclidean_mst(&c, Strategy::default_for(config.dimension))?.total_weight())
        }
        Model::Lattice => {
            let b = LatticeBox::<f64>::build(n, config.dimension, config.law.clone(), seed)?;
            Ok(mst_weight(b.vertex_count(), b.graph().edges()))
        }
    }
}

fn sample_lengths(config: &ExperimentConfig, tag: u64, n: usize, cache: Option<&Cache>) -> LabResult<Vec<f64>> {
    let model = config.resolved_model().ok_or_else(|| LabError::Config("no model".into()))?;
    (0..config.replicates)
        .into_par_iter()
        .map(|rep| sample_mst_length(config, model, n, derive_seed(config.seed, &[tag, n as u64, rep as u64]), cache))
        .collect()
}

/// Kolmogorov and Wasserstein distances of the standardized sample to the
/// standard normal, with bootstrap errors and intervals.
fn distance_rows(n: usize, x: &[f64], reps: usize, seed: u64) -> LabResult<Vec<Row>> {
    let z = standardize(x)?;
    let d = kolmogorov_distance(&z)?;
    let w = wasserstein_distance(&z)?;
    let of = |f: fn(&[f64]) -> mstperc::Result<f64>| {
        move |s: &[f64]| standardize(s).and_then(|z| f(&z)).unwrap_or(f64::NAN)
    };
    let bd = bootstrap(x, reps, derive_seed(seed, &[TAG_BOOT, n as u64, 0]), of(kolmogorov_distance));
    let bw = bootstrap(x, reps, derive_seed(seed, &[TAG_BOOT, n as u64, 1]), of(wasserstein_distance));
    Ok(vec![
        Row::new(Some(n), "kolmogorov", d, bd.stderr, x.len()).with_interval(bd.ci_lo, bd.ci_hi),
        Row::new(Some(n), "wasserstein", w, bw.stderr, x.len()).with_interval(bw.ci_lo, bw.ci_hi),
    ])
}

/// Per size: mean and variance of `M_n`, then the distances of
/// `(M_n − mean) / sd` to the standard normal.
pub fn run_clt(config: &ExperimentConfig, cache: Option<&Cache>) -> LabResult<Vec<Row>> {
    let mut rows = Vec::new();
    for n in config.size_grid() {
        let x = sample_lengths(config, TAG_CLT, n, cache)?;
        let r = x.len();
        if r < 2 {
            return Err(LabError::Degenerate("standardizing needs at least two replicates".into()));
        }
        if !(variance(&x) > 0.0) {
            return Err(LabError::Degenerate(format!("M_n has zero sample variance at n={n}")));
        }
        rows.push(Row::new(Some(n), "mean", mean(&x), iid_se(&x), r));
        rows.push(Row::new(Some(n), "variance", variance(&x), iid_se(&squared_deviations(&x)), r));
        rows.extend(distance_rows(n, &x, config.bootstrap_reps, config.seed)?);
    }
    Ok(rows)
}

/// Weighted least squares fit of `log p̂ = α − β log n` over the rows with
/// `p̂ > 0`, weighting each by the inverse delta-method variance of `log p̂`.
/// Returns `(β̂, se)`, or `None` with fewer than two usable sizes.
pub fn fit_decay_exponent(rows: &[&ArmRow]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.successes > 0)
        .map(|r| {
            let reps = r.replicates as f64;
            let var = (1.0 - r.phat + 1.0 / reps) / (reps * r.phat);
            ((r.n as f64).ln(), r.phat.ln(), 1.0 / var)
        })
        .collect();
    let distinct = pts.iter().map(|p| p.0.to_bits()).collect::<std::collections::BTreeSet<_>>().len();
    if distinct < 2 {
        return None;
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let xbar = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ybar = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    Some((-sxy / sxx, (1.0 / sxx).sqrt()))
}

/// `p̂` per `(n, param)`, then one `beta_hat` row per parameter. A parameter
/// whose fit is undefined gets a `nan` row.
pub fn run_arm_decay(config: &ExperimentConfig) -> LabResult<Vec<Row>> {
    let template = config.arm.clone().ok_or_else(|| LabError::Config("arm_decay needs an arm template".into()))?;
    let spec = ArmEstimateSpec {
        template,
        sizes: config.size_grid(),
        params: config.params.clone(),
    };
    let arm_rows = estimate_arm_probability(&spec, config.replicates, config.seed)?;
    let mut rows: Vec<Row> = arm_rows
        .iter()
        .map(|a| Row::new(Some(a.n), "phat", a.phat, a.stderr(), a.replicates).with_param(a.param).with_interval(a.ci_lo, a.ci_hi))
        .collect();
    let mut params: Vec<f64> = arm_rows.iter().map(|a| a.param).collect();
    params.sort_by(f64::total_cmp);
    params.dedup();
    for p in params {
        let group: Vec<&ArmRow> = arm_rows.iter().filter(|a| a.param == p).collect();
        let row = match fit_decay_exponent(&group) {
            Some((beta, se)) => Row::new(None, "beta_hat", beta, se, config.replicates),
            None => Row::new(None, "beta_hat", f64::NAN, f64::NAN, config.replicates),
        };
        rows.push(row.with_param(p));
    }
    Ok(rows)
}

/// Number of vertices of `B(n)` on the lattice, or its volume for points.
fn normalizer(model: Model, d: usize, n: usize) -> f64 {
    match model {
        Model::Lattice => ((2 * n + 1) as f64).powi(d as i32),
        Model::Poisson => ((2 * n) as f64).powi(d as i32),
    }
}

/// `Var M_n` and `Var M_n / |V_n|` per size.
pub fn run_variance_scaling(config: &ExperimentConfig, cache: Option<&Cache>) -> LabResult<Vec<Row>> {
    if config.replicates < 2 {
        return Err(LabError::Degenerate("variance needs at least two replicates".into()));
    }
    let model = config.resolved_model().ok_or_else(|| LabError::Config("variance_scaling needs a model".into()))?;
    let mut rows = Vec::new();
    for n in config.size_grid() {
        let x = sample_lengths(config, TAG_VAR, n, cache)?;
        let v = variance(&x);
        let se = iid_se(&squared_deviations(&x));
        let norm = normalizer(model, config.dimension, n);
        rows.push(Row::new(Some(n), "variance", v, se, x.len()));
        rows.push(Row::new(Some(n), "normalized_variance", v / norm, se / norm, x.len()));
    }
    Ok(rows)
}

fn stein_rows<M: BlockModel>(model: &M, config: &ExperimentConfig, n: usize) -> LabResult<Vec<Row>> {
    let seed = derive_seed(config.seed, &[TAG_STEIN, n as u64]);
    let draws: Vec<SteinDraw> = stein_draws(model, config.replicates, config.inner_reps, seed)?;
    if draws.len() < 2 {
        return Err(LabError::Degenerate("stein bound needs at least two replicates".into()));
    }
    let exact = model.n_blocks() <= EXACT_LIMIT;
    let e = summarize(&draws, config.inner_reps, exact)?;
    let r = e.replicates;
    let f: Vec<f64> = draws.iter().map(|d| d.f).collect();
    let mut rows = vec![
        Row::new(Some(n), "blocks", model.n_blocks() as f64, 0.0, r),
        Row::new(Some(n), "exact_t", if exact { 1.0 } else { 0.0 }, 0.0, r),
        Row::new(Some(n), "f_mean", e.f_mean, iid_se(&f), r),
        Row::new(Some(n), "sigma2_hat", e.sigma2_hat, e.se_sigma2_hat, r),
        Row::new(Some(n), "t_mean", e.t_mean, e.se_t_mean, r),
        Row::new(Some(n), "t_var", e.t_var, e.se_t_var, r),
        Row::new(Some(n), "third_moment_sum", e.third_moment_sum, e.se_third_moment_sum, r),
        Row::new(Some(n), "bound_value", e.bound_value, e.se_bound_value, r),
    ];
    rows.extend(distance_rows(n, &f, config.bootstrap_reps, config.seed)?);
    rows.push(Row::new(Some(n), "dkw_slack", dkw_slack(r), 0.0, r));
    Ok(rows)
}

/// The Stein bound for the MST length with Poisson cells or lattice edges as
/// blocks, logged next to the empirical distances of the same draws of `f`.
pub fn run_stein_bound(config: &ExperimentConfig) -> LabResult<Vec<Row>> {
    let model = config.resolved_model().ok_or_else(|| LabError::Config("stein_bound needs a model".into()))?;
    let mut rows = Vec::new();
    for n in config.size_grid() {
        let more = match model {
            Model::Lattice => stein_rows(&LatticeMstModel::new(n, config.dimension, config.law.clone())?, config, n)?,
            Model::Poisson => {
                let m = PoissonBlockModel::with_blocks(config.dimension, n as f64, config.blocks_for(n), config.intensity)?;
                stein_rows(&m, config, n)?
            }
        };
        rows.extend(more);
    }
    Ok(rows)
}

/// Value of the first row matching `statistic` at size `n` and parameter `param`.
pub fn find<'a>(rows: &'a [Row], n: Option<usize>, param: Option<f64>, statistic: &str) -> Option<&'a Row> {
    rows.iter().find(|r| r.n == n && r.param == param && r.statistic == statistic)
}
