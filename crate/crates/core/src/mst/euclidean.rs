//! Euclidean minimum spanning trees over point configurations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{dist, dist2, Configuration};
use crate::grid::{CellGrid, MAX_GRID_DIM};
use crate::mst::graph::{Edge, WeightedGraph};
use crate::mst::kruskal::{kruskal_from_edges, kruskal_mst};
use crate::mst::tree::SpanningTree;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// All `n(n-1)/2` edges.
    Complete,
    /// k-nearest-neighbor candidate graph, escalated until verified.
    Knn(usize),
}

impl Strategy {
    /// Starting `k` for the candidate graph: 8 in the plane, 14 in space.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            0..=2 => Strategy::Knn(8),
            _ => Strategy::Knn(14),
        }
    }
}

/// Outcome of a kNN construction, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnReport {
    pub final_k: usize,
    pub rounds: usize,
    pub fell_back_to_complete: bool,
}

/// MST of the complete Euclidean graph on `c`.
pub fn euclidean_mst<F: Scalar>(c: &Configuration<F>, strategy: Strategy) -> Result<SpanningTree<F>> {
    euclidean_mst_with_report(c, strategy).map(|(t, _)| t)
}

pub fn euclidean_mst_with_report<F: Scalar>(
    c: &Configuration<F>,
    strategy: Strategy,
) -> Result<(SpanningTree<F>, KnnReport)> {
    let n = c.len();
    let complete = |rounds| {
        (
            kruskal_mst(&WeightedGraph::complete_euclidean(c)),
            KnnReport {
                final_k: n.saturating_sub(1),
                rounds,
                fell_back_to_complete: true,
            },
        )
    };
    let mut k = match strategy {
        Strategy::Complete => return Ok(complete(0)),
        Strategy::Knn(0) => return invalid("knn strategy requires k >= 1"),
        Strategy::Knn(k) => k,
    };
    let mut rounds = 0;
    loop {
        if n <= 2 || k >= n - 1 {
            return Ok(complete(rounds));
        }
        rounds += 1;
        let knn = knn_lists(c, k);
        let edges = candidate_edges(c, &knn);
        let tree = kruskal_from_edges(n, &edges);
        if tree.is_spanning_tree() && verify_against_complete(c, &knn, &tree) {
            return Ok((
                tree,
                KnnReport {
                    final_k: k,
                    rounds,
                    fell_back_to_complete: false,
                },
            ));
        }
        k *= 2;
    }
}

/// The `k` nearest neighbors of every point, each list sorted by id.
/// Ties at the k-th distance are all included, so the lists are a function of
/// the point set alone.
pub fn knn_lists<F: Scalar>(c: &Configuration<F>, k: usize) -> Vec<Vec<u32>> {
    let n = c.len();
    let dim = c.dim();
    let k = k.min(n.saturating_sub(1));
    if k == 0 {
        return vec![Vec::new(); n];
    }
    let mut lists = Vec::with_capacity(n);
    if dim > MAX_GRID_DIM {
        for i in 0..n {
            let mut cand: Vec<(F, u32)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (dist2(c.point(i), c.point(j)), j as u32))
                .collect();
            lists.push(select_k(&mut cand, k));
        }
        return lists;
    }
    let ids: Vec<u32> = (0..n as u32).collect();
    let volume = c.domain().volume();
    let cell = (2.0 * volume / n as f64).powf(1.0 / dim as f64);
    let grid = CellGrid::build(c.coords(), dim, &ids, cell);
    let mut cand: Vec<(F, u32)> = Vec::new();
    for i in 0..n {
        cand.clear();
        let p = c.point(i);
        let mut ring = 0;
        loop {
            let inside = grid.for_each_in_ring(p, ring, |j| {
                if j as usize != i {
                    cand.push((dist2(p, c.point(j as usize)), j));
                }
            });
            if cand.len() >= k {
                let kth = kth_value(&mut cand, k);
                let clear = grid.ring_clearance(ring);
                if kth.to_f64_lossy() < clear * clear {
                    break;
                }
            }
            if !inside {
                break;
            }
            ring += 1;
        }
        lists.push(select_k(&mut cand, k));
    }
    lists
}

fn kth_value<F: Scalar>(cand: &mut [(F, u32)], k: usize) -> F {
    cand.select_nth_unstable_by(k - 1, |a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    cand[k - 1].0
}

fn select_k<F: Scalar>(cand: &mut [(F, u32)], k: usize) -> Vec<u32> {
    if cand.is_empty() {
        return Vec::new();
    }
    let k = k.min(cand.len());
    let kth = kth_value(cand, k);
    let mut out: Vec<u32> = cand.iter().filter(|(d, _)| *d <= kth).map(|&(_, j)| j).collect();
    out.sort_unstable();
    out
}

fn candidate_edges<F: Scalar>(c: &Configuration<F>, knn: &[Vec<u32>]) -> Vec<Edge<F>> {
    let mut keys: Vec<(u32, u32)> = knn
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.iter().map(move |&j| ((i as u32).min(j), (i as u32).max(j))))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(a, b)| Edge::new(a as usize, b as usize, dist(c.point(a as usize), c.point(b as usize))))
        .collect()
}

/// Cycle-property certificate: the candidate MST is the complete-graph MST
/// (under the same tie-breaking) iff no non-candidate pair is at most as long
/// as the heaviest tree edge on the path between its endpoints. Pairs longer
/// than the heaviest tree edge can never violate this, so only those are scanned.
fn verify_against_complete<F: Scalar>(c: &Configuration<F>, knn: &[Vec<u32>], tree: &SpanningTree<F>) -> bool {
    let n = c.len();
    let heaviest = tree.edges().iter().map(|e| e.w).fold(F::zero(), F::max);
    let is_candidate = |a: usize, b: usize| {
        knn[a].binary_search(&(b as u32)).is_ok() || knn[b].binary_search(&(a as u32)).is_ok()
    };
    let kth_dist = |i: usize| {
        knn[i]
            .iter()
            .map(|&j| dist(c.point(i), c.point(j as usize)))
            .fold(F::zero(), F::max)
    };
    let violates = |i: usize, j: usize| -> bool {
        if j <= i || is_candidate(i, j) {
            return false;
        }
        let d = dist(c.point(i), c.point(j));
        d <= heaviest && d <= tree.minimax_value(i, j).unwrap_or(F::infinity())
    };
    if c.dim() > MAX_GRID_DIM {
        return !(0..n).any(|i| (0..n).any(|j| violates(i, j)));
    }
    let ids: Vec<u32> = (0..n as u32).collect();
    let grid = CellGrid::build(c.coords(), c.dim(), &ids, heaviest.to_f64_lossy().max(1e-12));
    for i in 0..n {
        // every non-candidate partner of i is at least this far away
        if kth_dist(i) > heaviest {
            continue;
        }
        let mut bad = false;
        grid.for_each_near(c.point(i), heaviest.to_f64_lossy(), |j| {
            if !bad && violates(i, j as usize) {
                bad = true;
            }
        });
        if bad {
            return false;
        }
    }
    true
}
