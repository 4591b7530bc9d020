//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use mstperc::geometry::{Configuration, Cube};
use mstperc::mst::{Edge, LatticeBox, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `n` vertices: a random spanning tree plus `extra`
/// further distinct edges. Weights are integers in `1..=5` when `ties`,
/// otherwise uniform in `(0, 10)`.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, extra: usize, ties: bool) -> WeightedGraph<f64> {
    let weight = |r: &mut ChaCha8Rng| {
        if ties {
            r.random_range(1..=5) as f64
        } else {
            r.random_range(0.0..10.0)
        }
    };
    let mut g = WeightedGraph::new(n);
    let mut present = vec![vec![false; n]; n];
    for v in 1..n {
        let u = r.random_range(0..v);
        let w = weight(r);
        g.add_edge(u, v, w).unwrap();
        present[u][v] = true;
        present[v][u] = true;
    }
    let max_extra = n * (n - 1) / 2 - (n - 1);
    for _ in 0..extra.min(max_extra) {
        loop {
            let (u, v) = (r.random_range(0..n), r.random_range(0..n));
            if u != v && !present[u][v] {
                present[u][v] = true;
                present[v][u] = true;
                let w = weight(r);
                g.add_edge(u, v, w).unwrap();
                break;
            }
        }
    }
    g
}

/// Minimum spanning tree weight by enumerating every `(n-1)`-subset of edges.
pub fn brute_force_mst_weight(g: &WeightedGraph<f64>) -> f64 {
    let n = g.vertex_count();
    let edges = g.edges();
    if n <= 1 {
        return 0.0;
    }
    let k = n - 1;
    let m = edges.len();
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut acyclic = true;
        for &i in &idx {
            let (a, b) = (root(&mut parent, edges[i].u), root(&mut parent, edges[i].v));
            if a == b {
                acyclic = false;
                break;
            }
            parent[a] = b;
        }
        if acyclic {
            best = best.min(idx.iter().map(|&i| edges[i].w).sum());
        }
        // next combination
        let mut j = k;
        loop {
            if j == 0 {
                return best;
            }
            j -= 1;
            if idx[j] < m - k + j {
                idx[j] += 1;
                for t in j + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `min over simple u–v paths of the maximum edge weight`, by exhaustive DFS.
pub fn all_paths_minimax(g: &WeightedGraph<f64>, u: usize, v: usize) -> f64 {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    fn dfs(adj: &[Vec<(usize, f64)>], at: usize, target: usize, seen: &mut [bool], cur: f64, best: &mut f64) {
        if at == target {
            *best = best.min(cur);
            return;
        }
        for &(nb, w) in &adj[at] {
            if !seen[nb] {
                seen[nb] = true;
                dfs(adj, nb, target, seen, cur.max(w), best);
                seen[nb] = false;
            }
        }
    }
    let mut seen = vec![false; n];
    seen[u] = true;
    let mut best = f64::INFINITY;
    dfs(&adj, u, v, &mut seen, f64::NEG_INFINITY, &mut best);
    best
}

/// Canonical partition from a component label per item.
pub fn partition_of(items: &[usize], labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut parts = vec![Vec::new(); k];
    for (&i, &l) in items.iter().zip(labels) {
        parts[l].push(i);
    }
    parts.retain(|p| !p.is_empty());
    for p in &mut parts {
        p.sort_unstable();
    }
    parts.sort();
    parts
}

/// Components of the union of closed disks of radius `r` around the planar
/// points `ids`, by rasterizing at `step` and flood-filling 4-connected pixels.
/// Returns the component of each point's pixel.
pub fn flood_fill_labels(c: &Configuration<f64>, ids: &[usize], r: f64, step: f64) -> Vec<usize> {
    assert_eq!(c.dim(), 2);
    if ids.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &i in ids {
        for k in 0..2 {
            lo[k] = lo[k].min(c.point(i)[k] - r - 2.0 * step);
            hi[k] = hi[k].max(c.point(i)[k] + r + 2.0 * step);
        }
    }
    let w = ((hi[0] - lo[0]) / step).ceil() as usize + 1;
    let h = ((hi[1] - lo[1]) / step).ceil() as usize + 1;
    let mut filled = vec![false; w * h];
    let pix = |x: f64, lo: f64| ((x - lo) / step).round() as i64;
    for &i in ids {
        let p = c.point(i);
        let (cx, cy) = (pix(p[0], lo[0]), pix(p[1], lo[1]));
        let span = (r / step).ceil() as i64 + 1;
        for dx in -span..=span {
            for dy in -span..=span {
                let (x, y) = (cx + dx, cy + dy);
                let (px, py) = (lo[0] + x as f64 * step, lo[1] + y as f64 * step);
                if (px - p[0]).powi(2) + (py - p[1]).powi(2) <= r * r {
                    filled[y as usize * w + x as usize] = true;
                }
            }
        }
    }
    let mut comp = vec![usize::MAX; w * h];
    let mut next = 0;
    let mut queue = VecDeque::new();
    let mut out = Vec::with_capacity(ids.len());
    for &i in ids {
        let p = c.point(i);
        let start = pix(p[1], lo[1]) as usize * w + pix(p[0], lo[0]) as usize;
        assert!(filled[start], "a point's own pixel lies in its disk");
        if comp[start] == usize::MAX {
            comp[start] = next;
            queue.push_back(start);
            while let Some(cell) = queue.pop_front() {
                let (x, y) = (cell % w, cell / w);
                let mut nbrs = Vec::with_capacity(4);
                if x > 0 {
                    nbrs.push(cell - 1);
                }
                if x + 1 < w {
                    nbrs.push(cell + 1);
                }
                if y > 0 {
                    nbrs.push(cell - w);
                }
                if y + 1 < h {
                    nbrs.push(cell + w);
                }
                for nb in nbrs {
                    if filled[nb] && comp[nb] == usize::MAX {
                        comp[nb] = next;
                        queue.push_back(nb);
                    }
                }
            }
            next += 1;
        }
        out.push(comp[start]);
    }
    out
}

/// Components of the "distance at most `2r`" graph among `ids`, by BFS on
/// the full pairwise distance matrix.
pub fn pairwise_components(c: &Configuration<f64>, ids: &[usize], r: f64) -> Vec<usize> {
    let n = ids.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for b in 0..n {
                let d: f64 = c
                    .point(ids[a])
                    .iter()
                    .zip(c.point(ids[b]))
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                if label[b] == usize::MAX && d <= 2.0 * r {
                    label[b] = next;
                    queue.push_back(b);
                }
            }
        }
        next += 1;
    }
    label
}

/// Euclidean distance from `p` to the box, by clamping.
pub fn clamp_distance(p: &[f64], b: &Cube<f64>) -> f64 {
    p.iter()
        .zip(&b.center.coords)
        .map(|(&x, &c)| {
            let y = x.clamp(c - b.half_width, c + b.half_width);
            (x - y) * (x - y)
        })
        .sum::<f64>()
        .sqrt()
}

/// Lattice components of the open edges (weight at most `threshold`) among the
/// vertices accepted by `keep_vertex`, using edges accepted by `keep_edge`, by BFS
/// over lattice coordinates.
pub fn lattice_bfs(
    b: &LatticeBox<f64>,
    threshold: f64,
    keep_vertex: impl Fn(&[i64]) -> bool,
    keep_edge: impl Fn(&[i64], &[i64]) -> bool,
) -> (Vec<usize>, Vec<usize>) {
    let n = b.n() as i64;
    let d = b.dim();
    let items: Vec<usize> = (0..b.vertex_count()).filter(|&v| keep_vertex(&b.coords_of(v))).collect();
    let mut label = vec![usize::MAX; b.vertex_count()];
    let mut next = 0;
    for &s in &items {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let x = b.coords_of(v);
            for axis in 0..d {
                for step in [-1i64, 1] {
                    let mut y = x.clone();
                    y[axis] += step;
                    if y[axis].abs() > n || !keep_vertex(&y) || !keep_edge(&x, &y) {
                        continue;
                    }
                    let e = b.edge_between(&x, &y).unwrap();
                    if b.graph().edge(e).w > threshold {
                        continue;
                    }
                    let u = b.vertex_at(&y).unwrap();
                    if label[u] == usize::MAX {
                        label[u] = next;
                        queue.push_back(u);
                    }
                }
            }
        }
        next += 1;
    }
    let labels = items.iter().map(|&v| label[v]).collect();
    (items, labels)
}

/// Graph with the same vertices and the edges of `g` kept by `keep`.
pub fn subgraph(g: &WeightedGraph<f64>, keep: impl Fn(&Edge<f64>) -> bool) -> WeightedGraph<f64> {
    WeightedGraph::from_edges(g.vertex_count(), g.edges().iter().filter(|e| keep(e)).copied()).unwrap()
}
