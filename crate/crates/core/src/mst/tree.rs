use std::io::{BufRead, Write};
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::mst::graph::{read_edge_list, write_edge_list, Edge};
use crate::mst::union_find::UnionFind;
use crate::scalar::{compensated_sum, Scalar};

/// A minimum spanning tree, or a minimum spanning forest when the source
/// graph is disconnected.
#[derive(Debug)]
pub struct SpanningTree<F = f64> {
    vertex_count: usize,
    edges: Vec<Edge<F>>,
    total_weight: F,
    components: usize,
    path_max: OnceLock<PathMaxIndex<F>>,
}

impl<F: Scalar> Clone for SpanningTree<F> {
    fn clone(&self) -> Self {
        Self {
            vertex_count: self.vertex_count,
            edges: self.edges.clone(),
            total_weight: self.total_weight,
            components: self.components,
            path_max: OnceLock::new(),
        }
    }
}

impl<F: Scalar> PartialEq for SpanningTree<F> {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl<F: Scalar> SpanningTree<F> {
    /// Wrap an acyclic edge set. Fails if the edges contain a cycle.
    pub fn from_edges(vertex_count: usize, edges: Vec<Edge<F>>) -> Result<Self> {
        let mut uf = UnionFind::new(vertex_count);
        for e in &edges {
            if e.u >= vertex_count || e.v >= vertex_count || e.u == e.v {
                return invalid(format!("bad tree edge ({}, {})", e.u, e.v));
            }
            if !uf.union(e.u, e.v) {
                return invalid(format!("edge ({}, {}) closes a cycle", e.u, e.v));
            }
        }
        Ok(Self::from_forest_unchecked(vertex_count, edges, uf.components()))
    }

    pub(crate) fn from_forest_unchecked(vertex_count: usize, edges: Vec<Edge<F>>, components: usize) -> Self {
        let total_weight = compensated_sum(edges.iter().map(|e| e.w));
        Self {
            vertex_count,
            edges,
            total_weight,
            components,
            path_max: OnceLock::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge<F>] {
        &self.edges
    }

    pub fn total_weight(&self) -> F {
        self.total_weight
    }

    /// Number of connected components spanned; 1 for a spanning tree.
    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.components <= 1
    }

    /// Sorted endpoint pairs, for edge-set comparisons.
    pub fn edge_keys(&self) -> Vec<(usize, usize)> {
        let mut keys: Vec<_> = self.edges.iter().map(Edge::key).collect();
        keys.sort_unstable();
        keys
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn path_max_index(&self) -> &PathMaxIndex<F> {
        self.path_max
            .get_or_init(|| PathMaxIndex::build(self.vertex_count, &self.edges))
    }

    /// Largest edge weight on the tree path from `u` to `v` (zero when `u == v`).
    pub fn minimax_value(&self, u: usize, v: usize) -> Result<F> {
        if u >= self.vertex_count || v >= self.vertex_count {
            return invalid(format!("vertex out of range: {u}, {v}"));
        }
        self.path_max_index()
            .query(u, v)
            .map(|(w, _)| w)
            .ok_or(Error::NoPath(u, v))
    }

    /// Index into `edges()` of the heaviest edge on the path from `u` to `v`.
    pub fn path_max_edge(&self, u: usize, v: usize) -> Option<usize> {
        self.path_max_index().query(u, v).and_then(|(_, e)| e)
    }

    pub fn write_text<W: Write>(&self, w: W) -> Result<()> {
        write_edge_list(w, "tree", self.vertex_count, &self.edges)
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let (n, edges) = read_edge_list(r, "tree")?;
        Self::from_edges(n, edges)
    }
}

/// Largest degree of any vertex of the tree.
pub fn max_degree<F: Scalar>(t: &SpanningTree<F>) -> usize {
    t.max_degree()
}

/// Max edge weight on the tree path between `u` and `v`.
pub fn minimax_value<F: Scalar>(t: &SpanningTree<F>, u: usize, v: usize) -> Result<F> {
    t.minimax_value(u, v)
}

/// Binary-lifting ancestor tables: `O(n log n)` build, `O(log n)` query.
#[derive(Debug, Clone)]
pub struct PathMaxIndex<F> {
    depth: Vec<u32>,
    root: Vec<u32>,
    // up[j][v]: 2^j-th ancestor; best[j][v]: heaviest edge on that jump
    up: Vec<Vec<u32>>,
    best: Vec<Vec<(F, u32)>>,
}

const NO_EDGE: u32 = u32::MAX;

impl<F: Scalar> PathMaxIndex<F> {
    pub fn build(n: usize, edges: &[Edge<F>]) -> Self {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        let mut depth = vec![u32::MAX; n];
        let mut root = vec![0u32; n];
        let mut parent = vec![0u32; n];
        let mut parent_edge = vec![(F::neg_infinity(), NO_EDGE); n];
        let mut stack = Vec::new();
        for s in 0..n {
            if depth[s] != u32::MAX {
                continue;
            }
            depth[s] = 0;
            parent[s] = s as u32;
            root[s] = s as u32;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, ei) in &adj[x] {
                    if depth[y] == u32::MAX {
                        depth[y] = depth[x] + 1;
                        parent[y] = x as u32;
                        parent_edge[y] = (edges[ei].w, ei as u32);
                        root[y] = s as u32;
                        stack.push(y);
                    }
                }
            }
        }
        let max_depth = depth.iter().copied().max().unwrap_or(0) as usize;
        let levels = (usize::BITS - max_depth.leading_zeros()).max(1) as usize;
        let mut up = vec![parent];
        let mut best = vec![parent_edge];
        for j in 1..levels {
            let (prev_up, prev_best) = (&up[j - 1], &best[j - 1]);
            let mut nu = vec![0u32; n];
            let mut nb = vec![(F::neg_infinity(), NO_EDGE); n];
            for v in 0..n {
                let mid = prev_up[v] as usize;
                nu[v] = prev_up[mid];
                nb[v] = heavier(prev_best[v], prev_best[mid]);
            }
            up.push(nu);
            best.push(nb);
        }
        Self { depth, root, up, best }
    }

    /// `(max weight, edge index)` along the path, or `None` if `u` and `v`
    /// lie in different components. The edge is `None` only when `u == v`.
    pub fn query(&self, u: usize, v: usize) -> Option<(F, Option<usize>)> {
        if self.root[u] != self.root[v] {
            return None;
        }
        let (mut a, mut b) = (u, v);
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut acc = (F::neg_infinity(), NO_EDGE);
        let mut diff = self.depth[a] - self.depth[b];
        let mut j = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                acc = heavier(acc, self.best[j][a]);
                a = self.up[j][a] as usize;
            }
            diff >>= 1;
            j += 1;
        }
        if a != b {
            for j in (0..self.up.len()).rev() {
                if self.up[j][a] != self.up[j][b] {
                    acc = heavier(acc, self.best[j][a]);
                    acc = heavier(acc, self.best[j][b]);
                    a = self.up[j][a] as usize;
                    b = self.up[j][b] as usize;
                }
            }
            acc = heavier(acc, self.best[0][a]);
            acc = heavier(acc, self.best[0][b]);
        }
        if acc.1 == NO_EDGE {
            Some((F::zero(), None))
        } else {
            Some((acc.0, Some(acc.1 as usize)))
        }
    }
}

#[inline]
fn heavier<F: Scalar>(a: (F, u32), b: (F, u32)) -> (F, u32) {
    if b.1 != NO_EDGE && (a.1 == NO_EDGE || b.0 > a.0 || (b.0 == a.0 && b.1 > a.1)) {
        b
    } else {
        a
    }
}
