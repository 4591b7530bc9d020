//! Bernoulli bond percolation on lattice boxes, coupled to the edge weights.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mst::{LatticeBox, UnionFind, WeightLaw};
use crate::percolation::{ClusterLabeling, ItemKind};
use crate::scalar::Scalar;

/// `x + [-h, h]^d ∩ Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCube {
    pub center: Vec<i64>,
    pub half_width: i64,
}

impl LatticeCube {
    pub fn new(center: Vec<i64>, half_width: i64) -> Result<Self> {
        if half_width < 0 {
            return invalid("lattice cube half width must be non-negative");
        }
        Ok(Self { center, half_width })
    }

    pub fn centered(dim: usize, half_width: i64) -> Result<Self> {
        Self::new(vec![0; dim], half_width)
    }

    pub fn sup_offset(&self, x: &[i64]) -> i64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c).abs()).max().unwrap_or(0)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.sup_offset(x) <= self.half_width
    }

    /// Vertices of the cube with a neighbor outside it.
    pub fn on_boundary(&self, x: &[i64]) -> bool {
        self.sup_offset(x) == self.half_width
    }

    fn fits_in(&self, n: i64) -> bool {
        self.center.iter().all(|c| c.abs() + self.half_width <= n)
    }
}

/// A subgraph of a lattice box: the edges with both endpoints in `cube` (and
/// in `ambient`), except `removed_edges` and the edges with both endpoints in
/// `removed_box`. Its vertices are those of `cube ∩ ambient`, less the vertices
/// of `removed_box` left without any edge.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LatticeRegion {
    pub cube: Option<LatticeCube>,
    pub ambient: Option<LatticeCube>,
    pub removed_box: Option<LatticeCube>,
    pub removed_edges: Vec<usize>,
}

impl LatticeRegion {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn cube(q: LatticeCube) -> Self {
        Self {
            cube: Some(q),
            ..Self::default()
        }
    }

    pub fn minus_edge(mut self, e: usize) -> Self {
        self.removed_edges.push(e);
        self
    }

    pub fn minus_box(mut self, q: LatticeCube) -> Self {
        self.removed_box = Some(q);
        self
    }

    pub fn in_box(mut self, q: LatticeCube) -> Self {
        self.ambient = Some(q);
        self
    }

    fn admits(&self, x: &[i64]) -> bool {
        self.cube.as_ref().is_none_or(|q| q.contains(x)) && self.ambient.as_ref().is_none_or(|q| q.contains(x))
    }
}

/// The open-edge rule `X_e <= F^{-1}(p)`: edges are open independently with
/// probability `p`, monotonically in `p`.
pub fn cdf_coupling<F: Scalar>(law: &WeightLaw, p: f64) -> impl Fn(F) -> bool {
    let t = F::of(law.quantile(p));
    move |w: F| w <= t
}

/// Open clusters of `region` at level `p`.
pub fn lattice_clusters<F: Scalar>(b: &LatticeBox<F>, p: f64, region: &LatticeRegion) -> Result<ClusterLabeling> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("percolation level must lie in [0,1], got {p}"));
    }
    lattice_clusters_at(b, p, region, cdf_coupling(b.law(), p))
}

/// Clusters under an arbitrary open-edge predicate; `parameter` is recorded only.
pub fn lattice_clusters_at<F: Scalar>(
    b: &LatticeBox<F>,
    parameter: f64,
    region: &LatticeRegion,
    open: impl Fn(F) -> bool,
) -> Result<ClusterLabeling> {
    let d = b.dim();
    for q in [&region.cube, &region.ambient, &region.removed_box].into_iter().flatten() {
        if q.center.len() != d {
            return invalid("lattice region dimension does not match the box");
        }
    }
    if let Some(&e) = region.removed_edges.iter().find(|&&e| e >= b.edge_count()) {
        return invalid(format!("edge {e} is not in the box"));
    }
    let nv = b.vertex_count();
    let coords: Vec<Vec<i64>> = (0..nv).map(|v| b.coords_of(v)).collect();
    let admitted: Vec<bool> = coords.iter().map(|x| region.admits(x)).collect();
    let in_removed = |v: usize| region.removed_box.as_ref().is_some_and(|q| q.contains(&coords[v]));
    let mut has_edge = vec![false; nv];
    let mut links = Vec::new();
    let mut removed = region.removed_edges.clone();
    removed.sort_unstable();
    for (i, e) in b.graph().edges().iter().enumerate() {
        if !admitted[e.u] || !admitted[e.v] || (in_removed(e.u) && in_removed(e.v)) {
            continue;
        }
        if removed.binary_search(&i).is_ok() {
            continue;
        }
        has_edge[e.u] = true;
        has_edge[e.v] = true;
        if open(e.w) {
            links.push((e.u, e.v));
        }
    }
    let items: Vec<usize> = (0..nv)
        .filter(|&v| admitted[v] && (!in_removed(v) || has_edge[v]))
        .collect();
    let mut local = vec![usize::MAX; nv];
    for (i, &v) in items.iter().enumerate() {
        local[v] = i;
    }
    let mut uf = UnionFind::new(items.len());
    for (u, v) in links {
        uf.union(local[u], local[v]);
    }
    Ok(ClusterLabeling::from_union_find(ItemKind::LatticeVertex, parameter, items, &mut uf))
}

/// Vertices of the box on the boundary of `q`.
pub fn boundary_vertices<F: Scalar>(b: &LatticeBox<F>, q: &LatticeCube) -> Vec<usize> {
    (0..b.vertex_count())
        .filter(|&v| {
            let x = b.coords_of(v);
            q.contains(&x) && q.on_boundary(&x)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRegion {
    /// Clusters of `Q` itself.
    Full,
    /// Clusters of `Q − {x, y}`.
    MinusEdge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "site", rename_all = "snake_case")]
pub enum TwoArmSite {
    /// `{x, y} ↔ Q`: the clusters of `x` and `y` differ and both meet `∂Q`.
    Edge { x: Vec<i64>, y: Vec<i64>, region: EdgeRegion },
    /// `B(x, 1) ↔ Q`: two clusters of `Q − B(x, 1)` meet both boundaries.
    Cube { x: Vec<i64> },
}

/// Two-arm event at level `p` inside `outer`, optionally restricted to `ambient`.
pub fn lattice_two_arm<F: Scalar>(
    b: &LatticeBox<F>,
    site: &TwoArmSite,
    outer: &LatticeCube,
    p: f64,
    ambient: Option<&LatticeCube>,
) -> Result<bool> {
    let n = b.n() as i64;
    if outer.center.len() != b.dim() || !outer.fits_in(n) {
        return invalid("outer cube must lie inside the lattice box");
    }
    let mut region = LatticeRegion::cube(outer.clone());
    if let Some(a) = ambient {
        region = region.in_box(a.clone());
    }
    match site {
        TwoArmSite::Edge { x, y, region: mode } => {
            if !outer.contains(x) || !outer.contains(y) {
                return invalid("edge site must lie inside the outer cube");
            }
            let Some(e) = b.edge_between(x, y) else {
                return invalid("edge site endpoints are not lattice neighbors");
            };
            if *mode == EdgeRegion::MinusEdge {
                region = region.minus_edge(e);
            }
            let labels = lattice_clusters(b, p, &region)?;
            let (Some(lx), Some(ly)) = (
                labels.label_of(b.vertex_at(x).unwrap()),
                labels.label_of(b.vertex_at(y).unwrap()),
            ) else {
                return Ok(false);
            };
            if lx == ly {
                return Ok(false);
            }
            let mut hit = [false, false];
            for (&v, &l) in labels.items.iter().zip(&labels.labels) {
                if (l == lx || l == ly) && outer.on_boundary(&b.coords_of(v)) {
                    hit[usize::from(l == ly)] = true;
                }
            }
            Ok(hit[0] && hit[1])
        }
        TwoArmSite::Cube { x } => {
            let inner = LatticeCube::new(x.clone(), 1)?;
            if x.len() != b.dim() || outer.sup_offset(x) + 1 > outer.half_width {
                return invalid("B(x, 1) must lie inside the outer cube");
            }
            let region = region.minus_box(inner.clone());
            let labels = lattice_clusters(b, p, &region)?;
            let mut inner_hit = vec![false; labels.cluster_count];
            let mut outer_hit = vec![false; labels.cluster_count];
            for (&v, &l) in labels.items.iter().zip(&labels.labels) {
                let c = b.coords_of(v);
                if inner.on_boundary(&c) {
                    inner_hit[l] = true;
                }
                if outer.on_boundary(&c) {
                    outer_hit[l] = true;
                }
            }
            Ok(inner_hit.iter().zip(&outer_hit).filter(|(a, b)| **a && **b).count() >= 2)
        }
    }
}
