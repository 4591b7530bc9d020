//! `Var f(X) ≥ Σ_i Var E(f(X) | X_{A_i})` for disjoint block groups `A_i`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::derive_seed;
use crate::stein::stats::{batch_means_se, batch_rows_se, mean, variance};
use crate::stein::BlockModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    pub lhs: f64,
    pub se_lhs: f64,
    pub rhs: f64,
    pub se_rhs: f64,
    /// `Var E(f | X_{A_i})` for each group.
    pub group_terms: Vec<f64>,
    pub group_se: Vec<f64>,
}

/// Nested Monte Carlo: each conditional variance is the spread of inner means
/// across outer draws, less the inner-sampling noise `E[s²] / inner_reps`.
pub fn variance_decomposition_check<M: BlockModel>(
    model: &M,
    groups: &[Vec<usize>],
    outer_reps: usize,
    inner_reps: usize,
    seed: u64,
) -> Result<VarianceDecomposition> {
    let n = model.n_blocks();
    let mut seen = vec![false; n];
    for g in groups {
        for &j in g {
            if j >= n {
                return invalid(format!("block {j} out of range"));
            }
            if seen[j] {
                return invalid(format!("block {j} appears in two groups"));
            }
            seen[j] = true;
        }
    }
    if outer_reps < 2 || inner_reps < 2 {
        return invalid("variance decomposition needs at least two outer and two inner replicates");
    }
    let f: Vec<f64> = (0..outer_reps)
        .into_par_iter()
        .map(|o| model.value(&model.draw(derive_seed(seed, &[0x4c48_5300, o as u64]))))
        .collect();
    let m = mean(&f);
    let sq: Vec<f64> = f
        .iter()
        .map(|v| (v - m) * (v - m) * outer_reps as f64 / (outer_reps - 1) as f64)
        .collect();
    let mut group_terms = Vec::with_capacity(groups.len());
    let mut group_se = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        let mut in_group = vec![false; n];
        for &j in g {
            in_group[j] = true;
        }
        let per_outer: Vec<(f64, f64)> = (0..outer_reps)
            .into_par_iter()
            .map(|o| {
                let fixed = derive_seed(seed, &[0x4752_5000, gi as u64, o as u64]);
                let vals: Vec<f64> = (0..inner_reps)
                    .map(|r| {
                        let other = derive_seed(seed, &[0x4752_5001, gi as u64, o as u64, r as u64]);
                        let blocks: Vec<M::Block> = (0..n)
                            .map(|j| model.draw_block(j, if in_group[j] { fixed } else { other }))
                            .collect();
                        model.value(&blocks)
                    })
                    .collect();
                (mean(&vals), variance(&vals))
            })
            .collect();
        let means: Vec<f64> = per_outer.iter().map(|p| p.0).collect();
        let vars: Vec<f64> = per_outer.iter().map(|p| p.1).collect();
        let stat = |c: &[&[f64]]| variance(c[0]) - mean(c[1]) / inner_reps as f64;
        group_terms.push(stat(&[&means, &vars]));
        group_se.push(batch_rows_se(&[&means, &vars], 2, stat));
    }
    Ok(VarianceDecomposition {
        lhs: variance(&f),
        se_lhs: batch_means_se(&sq),
        rhs: group_terms.iter().sum(),
        se_rhs: group_se.iter().map(|s| s * s).sum::<f64>().sqrt(),
        group_terms,
        group_se,
    })
}
