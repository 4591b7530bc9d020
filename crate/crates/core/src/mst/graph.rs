use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, Configuration};
use crate::mst::union_find::UnionFind;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge<F = f64> {
    pub u: usize,
    pub v: usize,
    pub w: F,
}

impl<F: Scalar> Edge<F> {
    pub fn new(u: usize, v: usize, w: F) -> Self {
        Self { u, v, w }
    }

    /// Endpoints in increasing order.
    pub fn key(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Deterministic total order on edges: weight, then the sorted endpoint pair.
pub fn edge_order<F: Scalar>(a: &Edge<F>, b: &Edge<F>) -> std::cmp::Ordering {
    a.w.partial_cmp(&b.w)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then_with(|| a.key().cmp(&b.key()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<F = f64> {
    vertex_count: usize,
    edges: Vec<Edge<F>>,
}

impl<F: Scalar> WeightedGraph<F> {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = Edge<F>>) -> Result<Self> {
        let mut g = Self::new(vertex_count);
        for e in edges {
            g.add_edge(e.u, e.v, e.w)?;
        }
        Ok(g)
    }

    /// Complete graph on the points with Euclidean edge lengths.
    pub fn complete_euclidean(c: &Configuration<F>) -> Self {
        let n = c.len();
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push(Edge::new(i, j, dist(c.point(i), c.point(j))));
            }
        }
        Self { vertex_count: n, edges }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: F) -> Result<usize> {
        if u == v {
            return invalid(format!("self loop at vertex {u}"));
        }
        if u >= self.vertex_count || v >= self.vertex_count {
            return invalid(format!("edge ({u}, {v}) out of range for {} vertices", self.vertex_count));
        }
        if !w.is_finite() || w < F::zero() {
            return invalid(format!("edge weight must be finite and non-negative, got {w}"));
        }
        self.edges.push(Edge::new(u, v, w));
        Ok(self.edges.len() - 1)
    }

    pub(crate) fn push_unchecked(&mut self, e: Edge<F>) {
        self.edges.push(e);
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge<F>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge<F> {
        &self.edges[i]
    }

    pub fn set_weight(&mut self, i: usize, w: F) -> Result<()> {
        if !w.is_finite() || w < F::zero() {
            return invalid(format!("edge weight must be finite and non-negative, got {w}"));
        }
        self.edges[i].w = w;
        Ok(())
    }

    /// Copy of the graph without edge `i`.
    pub fn without_edge(&self, i: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.remove(i);
        Self {
            vertex_count: self.vertex_count,
            edges,
        }
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count);
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        uf.components()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Adjacency lists of `(neighbor, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        adj
    }

    pub fn write_text<W: Write>(&self, w: W) -> Result<()> {
        write_edge_list(w, "graph", self.vertex_count, &self.edges)
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let (n, edges) = read_edge_list(r, "graph")?;
        Self::from_edges(n, edges)
    }
}

/// Text edge-list format: a header line `<kind> <vertex_count> <edge_count>`
/// followed by one `u v w` row per edge, weights with 17 significant digits.
pub(crate) fn write_edge_list<F: Scalar, W: Write>(mut w: W, kind: &str, n: usize, edges: &[Edge<F>]) -> Result<()> {
    writeln!(w, "{kind} {n} {}", edges.len())?;
    for e in edges {
        writeln!(w, "{} {} {:.16e}", e.u, e.v, e.w.to_f64_lossy())?;
    }
    Ok(())
}

pub(crate) fn read_edge_list<F: Scalar, R: BufRead>(r: R, kind: &str) -> Result<(usize, Vec<Edge<F>>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing header".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != kind {
        return Err(Error::Format(format!("expected header '{kind} <vertices> <edges>', got '{header}'")));
    }
    let parse_usize = |s: &str| s.parse::<usize>().map_err(|e| Error::Format(e.to_string()));
    let n = parse_usize(fields[1])?;
    let m = parse_usize(fields[2])?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Format(format!("bad edge row '{line}'")));
        }
        let w: f64 = f[2].parse().map_err(|_| Error::Format(format!("bad weight '{}'", f[2])))?;
        edges.push(Edge::new(parse_usize(f[0])?, parse_usize(f[1])?, F::of(w)));
    }
    if edges.len() != m {
        return Err(Error::Format(format!("header promised {m} edges, found {}", edges.len())));
    }
    Ok((n, edges))
}
