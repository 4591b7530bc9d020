//! Kolmogorov and 1-Wasserstein distances from an empirical law to `N(0, 1)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stein::stats::{mean, variance};

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ^{-1}(p)` for `p` in `(0, 1)`: rational start, refined by Halley steps.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let e = if x < 0.0 { normal_cdf(x) - p } else { (1.0 - p) - normal_sf(x) };
        let u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// `sup_x |F̂(x) − Φ(x)|`, checked at both one-sided limits of every jump.
pub fn kolmogorov_distance(sample: &[f64]) -> Result<f64> {
    let sorted = sorted_finite(sample)?;
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let phi = normal_cdf(x);
            (phi - i as f64 / n).abs().max(((i + 1) as f64 / n - phi).abs())
        })
        .fold(0.0, f64::max))
}

/// `∫ |F̂(x) − Φ(x)| dx`, integrated exactly piece by piece.
pub fn wasserstein_distance(sample: &[f64]) -> Result<f64> {
    let x = sorted_finite(sample)?;
    let n = x.len();
    let mut total = int_cdf(f64::NEG_INFINITY, x[0]);
    for i in 1..n {
        let (a, b) = (x[i - 1], x[i]);
        if b > a {
            total += int_abs_gap(i as f64 / n as f64, a, b);
        }
    }
    total += int_sf(x[n - 1]);
    Ok(total)
}

fn sorted_finite(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return invalid("distance to normal needs a non-empty sample");
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return invalid("sample contains non-finite values");
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// `∫_x^∞ (1 − Φ)`.
fn int_sf(x: f64) -> f64 {
    normal_pdf(x) - x * normal_sf(x)
}

/// `∫_a^b Φ`, with `a = -∞` allowed.
fn int_cdf(a: f64, b: f64) -> f64 {
    // x Φ(x) + φ(x) is accurate for x <= 0; (b − a) − ∫ (1 − Φ) for x >= 0
    let lower = |x: f64| if x == f64::NEG_INFINITY { 0.0 } else { x * normal_cdf(x) + normal_pdf(x) };
    if b <= 0.0 {
        lower(b) - lower(a)
    } else if a >= 0.0 {
        (b - a) - (int_sf(a) - int_sf(b))
    } else {
        int_cdf(a, 0.0) + int_cdf(0.0, b)
    }
}

/// `∫_a^b |c − Φ|` for a level `c` in `(0, 1)`.
fn int_abs_gap(c: f64, a: f64, b: f64) -> f64 {
    let q = normal_quantile(c).clamp(a, b);
    (c * (q - a) - int_cdf(a, q)) + (int_cdf(q, b) - c * (b - q))
}

/// DKW half-width at 99%: `sup |F̂ − F| > slack` with probability at most 1%,
/// doubled for the two-metric comparison.
pub fn dkw_slack(size: usize) -> f64 {
    2.0 * ((2.0f64 / 0.01).ln() / (2.0 * size as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub kolmogorov: f64,
    pub wasserstein: f64,
    pub sample_size: usize,
}

impl DistanceReport {
    pub fn of(sample: &[f64]) -> Result<Self> {
        Ok(Self {
            kolmogorov: kolmogorov_distance(sample)?,
            wasserstein: wasserstein_distance(sample)?,
            sample_size: sample.len(),
        })
    }

    /// `D ≤ 2√W` up to the sampling slack of both empirical distances.
    pub fn metric_relation_holds(&self) -> bool {
        self.kolmogorov <= 2.0 * self.wasserstein.sqrt() + dkw_slack(self.sample_size)
    }
}

/// `(x − mean) / sd` with the sample mean and unbiased standard deviation.
pub fn standardize(sample: &[f64]) -> Result<Vec<f64>> {
    let sd = variance(sample).sqrt();
    if !(sd > 0.0) {
        return Err(crate::Error::Degenerate("sample has zero variance".into()));
    }
    let m = mean(sample);
    Ok(sample.iter().map(|x| (x - m) / sd).collect())
}
