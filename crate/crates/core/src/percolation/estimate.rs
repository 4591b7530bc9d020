//! Monte Carlo arm probabilities over a grid of box sizes and parameters.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{sample_poisson, Configuration, Cube};
use crate::mst::{LatticeBox, WeightLaw};
use crate::percolation::continuum::{arm_event, ArmQuery, ArmVariant, Shape};
use crate::percolation::lattice::{lattice_two_arm, EdgeRegion, LatticeCube, TwoArmSite};
use crate::report::format_sig;
use crate::rng::derive_seed;

/// The event measured at each box size `n`; the grid parameter is `r` or `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmTemplate {
    /// `B(a)^(dilation) ⇝ B(n)` with `k` arms, Poisson points of the given
    /// intensity in `B(n)`.
    Continuum {
        dim: usize,
        intensity: f64,
        inner_half_width: f64,
        #[serde(default)]
        inner_dilation: f64,
        k: usize,
        variant: ArmVariant,
    },
    /// Two-arm event from the edge `{0, e1}` or from `B(0, 1)` to `∂B(n)`.
    Lattice {
        dim: usize,
        #[serde(default)]
        law: WeightLaw,
        site: LatticeSite,
        #[serde(default = "default_edge_region")]
        region: EdgeRegion,
    },
}

fn default_edge_region() -> EdgeRegion {
    EdgeRegion::Full
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeSite {
    Edge,
    Cube,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmEstimateSpec {
    pub template: ArmTemplate,
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmRow {
    pub n: usize,
    pub param: f64,
    pub replicates: usize,
    pub successes: usize,
    pub phat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl ArmRow {
    pub fn new(n: usize, param: f64, replicates: usize, successes: usize) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, replicates);
        Self {
            n,
            param,
            replicates,
            successes,
            phat: successes as f64 / replicates as f64,
            ci_lo,
            ci_hi,
        }
    }

    /// Binomial standard error of `phat`.
    pub fn stderr(&self) -> f64 {
        (self.phat * (1.0 - self.phat) / self.replicates as f64).sqrt()
    }
}

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score 95% interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// One row per `(n, param)`, sorted. Replicate `i` at size `n` draws its
/// configuration from a seed derived from `(seed, n, i)`, shared by all
/// parameters, so rows at the same `n` are coupled.
pub fn estimate_arm_probability(spec: &ArmEstimateSpec, replicates: usize, seed: u64) -> Result<Vec<ArmRow>> {
    if replicates == 0 {
        return invalid("replicates must be at least 1");
    }
    if spec.sizes.is_empty() || spec.params.is_empty() {
        return invalid("arm estimate needs at least one size and one parameter");
    }
    let mut sizes = spec.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut params = spec.params.clone();
    if params.iter().any(|p| !p.is_finite()) {
        return invalid("arm parameters must be finite");
    }
    params.sort_by(f64::total_cmp);
    params.dedup();
    validate(&spec.template, &params)?;
    let mut rows = Vec::with_capacity(sizes.len() * params.len());
    for &n in &sizes {
        let outcomes: Vec<Vec<bool>> = (0..replicates)
            .into_par_iter()
            .map(|rep| replicate(&spec.template, n, &params, derive_seed(seed, &[0x4152_4d53, n as u64, rep as u64])))
            .collect::<Result<_>>()?;
        for (j, &param) in params.iter().enumerate() {
            let successes = outcomes.iter().filter(|o| o[j]).count();
            rows.push(ArmRow::new(n, param, replicates, successes));
        }
    }
    Ok(rows)
}

fn validate(t: &ArmTemplate, params: &[f64]) -> Result<()> {
    match t {
        ArmTemplate::Continuum {
            dim,
            intensity,
            inner_half_width,
            inner_dilation,
            k,
            ..
        } => {
            if *dim == 0 || *k == 0 {
                return invalid("continuum arm template needs dim >= 1 and k >= 1");
            }
            if !(intensity.is_finite() && *intensity >= 0.0) {
                return invalid("intensity must be finite and non-negative");
            }
            if !(*inner_half_width > 0.0) || !(*inner_dilation >= 0.0) {
                return invalid("inner box needs a positive half width and non-negative dilation");
            }
            if params.iter().any(|&r| r <= 0.0) {
                return invalid("continuum radii must be positive");
            }
        }
        ArmTemplate::Lattice { dim, law, .. } => {
            if *dim < 2 {
                return invalid("lattice template needs dim >= 2");
            }
            law.validate()?;
            if params.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return invalid("lattice levels must lie in [0,1]");
            }
        }
    }
    Ok(())
}

fn replicate(t: &ArmTemplate, n: usize, params: &[f64], seed: u64) -> Result<Vec<bool>> {
    match t {
        ArmTemplate::Continuum {
            dim,
            intensity,
            inner_half_width,
            inner_dilation,
            k,
            variant,
        } => {
            let outer = Cube::centered(*dim, n as f64)?;
            let c: Configuration<f64> = sample_poisson(&outer, *intensity, seed)?;
            let inner_cube = Cube::centered(*dim, *inner_half_width)?;
            let inner = if *inner_dilation > 0.0 {
                Shape::dilated(inner_cube, *inner_dilation)
            } else {
                inner_cube.into()
            };
            params
                .iter()
                .map(|&r| {
                    arm_event(
                        &c,
                        &ArmQuery {
                            inner: inner.clone(),
                            outer: outer.clone(),
                            r,
                            k: *k,
                            variant: *variant,
                            ambient: None,
                        },
                    )
                })
                .collect()
        }
        ArmTemplate::Lattice { dim, law, site, region } => {
            let b = LatticeBox::<f64>::build(n, *dim, law.clone(), seed)?;
            let origin = vec![0i64; *dim];
            let site = match site {
                LatticeSite::Edge => {
                    let mut y = origin.clone();
                    y[0] = 1;
                    TwoArmSite::Edge {
                        x: origin,
                        y,
                        region: *region,
                    }
                }
                LatticeSite::Cube => TwoArmSite::Cube { x: origin },
            };
            let outer = LatticeCube::centered(*dim, n as i64)?;
            params.iter().map(|&p| lattice_two_arm(&b, &site, &outer, p, None)).collect()
        }
    }
}

pub const ARM_CSV_HEADER: &str = "n,param,replicates,successes,phat,ci_lo,ci_hi";

pub fn write_arm_csv<W: Write>(rows: &[ArmRow], mut w: W) -> Result<()> {
    writeln!(w, "{ARM_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.n,
            format_sig(r.param),
            r.replicates,
            r.successes,
            format_sig(r.phat),
            format_sig(r.ci_lo),
            format_sig(r.ci_hi)
        )?;
    }
    Ok(())
}
