//! Incremental MST maintenance and resampling deltas.
//!
//! `insert_vertex_add_delete` grows an MST by one vertex whose admissible
//! edges are restricted to a neighbor list: each edge `{v, p_k}` is added in
//! turn and the heaviest edge of the cycle it closes is dropped. The result is
//! an MST of the complete graph on the base points plus the listed edges.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, sample_poisson, Configuration, Cube, Point};
use crate::mst::{euclidean_mst, kruskal_mst, Edge, SpanningTree, Strategy, WeightedGraph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionStep<F = f64> {
    pub k: usize,
    pub added_edge: (usize, usize, F),
    pub deleted_edge: Option<(usize, usize, F)>,
    /// Heaviest edge on the path from `v` to `p_k` in the tree before step
    /// `k`; for `k = 1` this is `d(v, p_1)`.
    pub y: F,
    /// Tree weight after step `k`.
    pub tree_weight: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionTrace<F = f64> {
    pub initial_weight: F,
    pub steps: Vec<InsertionStep<F>>,
}

impl<F: Scalar> InsertionTrace<F> {
    /// `w_k - w_{k-1}` for each step.
    pub fn increments(&self) -> Vec<F> {
        let mut prev = self.initial_weight;
        self.steps
            .iter()
            .map(|s| {
                let d = s.tree_weight - prev;
                prev = s.tree_weight;
                d
            })
            .collect()
    }
}

/// Order neighbor indices by distance from `v`, ties by index.
pub fn order_by_distance<F: Scalar>(points: &Configuration<F>, v: &[F], neighbors: &[usize]) -> Vec<usize> {
    let mut out = neighbors.to_vec();
    out.sort_by(|&a, &b| {
        dist(v, points.point(a))
            .partial_cmp(&dist(v, points.point(b)))
            .unwrap()
            .then(a.cmp(&b))
    });
    out
}

/// Insert `v` (as vertex `points.len()`) into `base_tree`, an MST of the
/// complete graph on `points`, admitting only the edges `{v, p}` for `p` in
/// `neighbors`. Neighbors are processed nearest first.
pub fn insert_vertex_add_delete<F: Scalar>(
    base_tree: &SpanningTree<F>,
    points: &Configuration<F>,
    v: &Point<F>,
    neighbors: &[usize],
) -> Result<(SpanningTree<F>, InsertionTrace<F>)> {
    let n = points.len();
    if base_tree.vertex_count() != n {
        return invalid("base tree does not match the point set");
    }
    if v.dim() != points.dim() {
        return invalid("inserted point has the wrong dimension");
    }
    let mut seen = vec![false; n];
    for &p in neighbors {
        if p >= n {
            return invalid(format!("neighbor {p} is not in the base point set"));
        }
        if std::mem::replace(&mut seen[p], true) {
            return invalid(format!("neighbor {p} listed twice"));
        }
    }
    let order = order_by_distance(points, &v.coords, neighbors);
    let vid = n;
    let mut tree = DynamicTree::new(n + 1, base_tree.edges());
    let mut trace = InsertionTrace {
        initial_weight: base_tree.total_weight(),
        steps: Vec::with_capacity(order.len()),
    };
    let mut weight = base_tree.total_weight();
    for (idx, &p) in order.iter().enumerate() {
        let w = dist(&v.coords, points.point(p));
        let (y, deleted) = match tree.path_max(vid, p) {
            None => {
                tree.insert(Edge::new(vid, p, w));
                weight = weight + w;
                (w, None)
            }
            Some((slot, heaviest)) => {
                if w < heaviest.w {
                    tree.replace(slot, Edge::new(vid, p, w));
                    weight = weight + w - heaviest.w;
                    (heaviest.w, Some((heaviest.u, heaviest.v, heaviest.w)))
                } else {
                    // the new edge is the heaviest on its cycle
                    (heaviest.w, Some((vid, p, w)))
                }
            }
        };
        trace.steps.push(InsertionStep {
            k: idx + 1,
            added_edge: (vid, p, w),
            deleted_edge: deleted,
            y,
            tree_weight: weight,
        });
    }
    let result = SpanningTree::from_edges(n + 1, tree.into_edges())?;
    Ok((result, trace))
}

/// Edge list with adjacency, supporting path-max search and edge swaps.
struct DynamicTree<F> {
    edges: Vec<Option<Edge<F>>>,
    adj: Vec<Vec<usize>>,
}

impl<F: Scalar> DynamicTree<F> {
    fn new(n: usize, edges: &[Edge<F>]) -> Self {
        let mut t = Self {
            edges: Vec::with_capacity(edges.len() + 1),
            adj: vec![Vec::new(); n],
        };
        for &e in edges {
            t.insert(e);
        }
        t
    }

    fn insert(&mut self, e: Edge<F>) {
        let slot = self.edges.len();
        self.edges.push(Some(e));
        self.adj[e.u].push(slot);
        self.adj[e.v].push(slot);
    }

    fn replace(&mut self, slot: usize, e: Edge<F>) {
        let old = self.edges[slot].take().expect("live edge");
        self.adj[old.u].retain(|&s| s != slot);
        self.adj[old.v].retain(|&s| s != slot);
        self.insert(e);
    }

    /// Slot and value of the heaviest edge on the path `a -> b`.
    fn path_max(&self, a: usize, b: usize) -> Option<(usize, Edge<F>)> {
        let n = self.adj.len();
        let mut via = vec![usize::MAX; n];
        let mut queue = VecDeque::from([a]);
        let mut visited = vec![false; n];
        visited[a] = true;
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &slot in &self.adj[x] {
                let e = self.edges[slot].unwrap();
                let y = e.other(x);
                if !visited[y] {
                    visited[y] = true;
                    via[y] = slot;
                    queue.push_back(y);
                }
            }
        }
        if !visited[b] || a == b {
            return None;
        }
        let mut best: Option<(usize, Edge<F>)> = None;
        let mut x = b;
        while x != a {
            let slot = via[x];
            let e = self.edges[slot].unwrap();
            if best.is_none_or(|(_, h)| e.w > h.w) {
                best = Some((slot, e));
            }
            x = e.other(x);
        }
        best
    }

    fn into_edges(self) -> Vec<Edge<F>> {
        self.edges.into_iter().flatten().collect()
    }
}

/// Effect of deleting edge `edge` from `g`: returns `(delta, y)` with
/// `y` the minimax value between the endpoints in `g - e` and
/// `delta = M(g) - M(g - e) = w(e) - max(w(e), y)`.
pub fn edge_removal_delta<F: Scalar>(g: &WeightedGraph<F>, edge: usize) -> Result<(F, F)> {
    if edge >= g.edges().len() {
        return invalid(format!("edge index {edge} out of range"));
    }
    let e = *g.edge(edge);
    let rest = g.without_edge(edge);
    let tree = kruskal_mst(&rest);
    let y = match tree.minimax_value(e.u, e.v) {
        Ok(y) => y,
        Err(Error::NoPath(..)) => return Err(Error::Bridge(e.u, e.v)),
        Err(other) => return Err(other),
    };
    Ok((e.w - e.w.max(y), y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport<F = f64> {
    pub delta: F,
    pub block_id: usize,
    pub full_weight_before: F,
    pub full_weight_after: F,
}

/// Replace the points of `c` inside `block` by `replacement` (whose points
/// must all lie in `block`).
pub fn swap_block<F: Scalar>(c: &Configuration<F>, block: &Cube<F>, replacement: &Configuration<F>) -> Result<Configuration<F>> {
    if replacement.iter().any(|p| !block.contains(p)) {
        return invalid("replacement points must lie in the block");
    }
    let mut out = c.filter(|p| !block.contains(p));
    for p in replacement.iter() {
        out.push(p)?;
    }
    Ok(out)
}

fn mst_total<F: Scalar>(c: &Configuration<F>) -> Result<F> {
    Ok(euclidean_mst(c, Strategy::default_for(c.dim()))?.total_weight())
}

/// Block resampling delta `M(X) - M(X^j)` with an explicit replacement.
pub fn block_delta_with<F: Scalar>(
    c: &Configuration<F>,
    block: &Cube<F>,
    block_id: usize,
    replacement: &Configuration<F>,
) -> Result<DeltaReport<F>> {
    if !c.domain().contains_cube(block) {
        return invalid("block must lie inside the domain");
    }
    let after = swap_block(c, block, replacement)?;
    let before_w = mst_total(c)?;
    let after_w = mst_total(&after)?;
    Ok(DeltaReport {
        delta: before_w - after_w,
        block_id,
        full_weight_before: before_w,
        full_weight_after: after_w,
    })
}

/// Fresh Poisson points for `block`, the resampled copy `X'_j`.
pub fn resample_block<F: Scalar>(block: &Cube<F>, intensity: f64, resample_seed: u64) -> Result<Configuration<F>> {
    sample_poisson(block, intensity, resample_seed)
}

/// Block resampling delta with the block redrawn as a Poisson process of the
/// given intensity from `resample_seed`.
pub fn block_delta<F: Scalar>(
    c: &Configuration<F>,
    block: &Cube<F>,
    block_id: usize,
    intensity: f64,
    resample_seed: u64,
) -> Result<DeltaReport<F>> {
    let fresh = resample_block(block, intensity, resample_seed)?;
    block_delta_with(c, block, block_id, &fresh)
}

/// The same delta computed with both configurations restricted to the
/// window `B(center, radius)`.
pub fn local_delta_with<F: Scalar>(
    c: &Configuration<F>,
    center: &Point<F>,
    radius: F,
    block: &Cube<F>,
    block_id: usize,
    replacement: &Configuration<F>,
) -> Result<DeltaReport<F>> {
    let window = Cube::new(center.clone(), radius)?;
    if !window.contains_cube(block) {
        return invalid("block must lie inside the local window");
    }
    let after = swap_block(c, block, replacement)?;
    let before_w = mst_total(&c.filter(|p| window.contains(p)))?;
    let after_w = mst_total(&after.filter(|p| window.contains(p)))?;
    Ok(DeltaReport {
        delta: before_w - after_w,
        block_id,
        full_weight_before: before_w,
        full_weight_after: after_w,
    })
}

pub fn local_delta<F: Scalar>(
    c: &Configuration<F>,
    center: &Point<F>,
    radius: F,
    block: &Cube<F>,
    block_id: usize,
    intensity: f64,
    resample_seed: u64,
) -> Result<DeltaReport<F>> {
    let fresh = resample_block(block, intensity, resample_seed)?;
    local_delta_with(c, center, radius, block, block_id, &fresh)
}

/// Full and local deltas sharing one realization of the block's replacement.
pub fn paired_deltas<F: Scalar>(
    c: &Configuration<F>,
    center: &Point<F>,
    radius: F,
    block: &Cube<F>,
    block_id: usize,
    intensity: f64,
    resample_seed: u64,
) -> Result<(DeltaReport<F>, DeltaReport<F>)> {
    let fresh = resample_block(block, intensity, resample_seed)?;
    Ok((
        block_delta_with(c, block, block_id, &fresh)?,
        local_delta_with(c, center, radius, block, block_id, &fresh)?,
    ))
}
