//! Nearest-neighbor lattice boxes `[-n, n]^d ∩ Z^d` with i.i.d. edge weights.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mst::graph::{Edge, WeightedGraph};
use crate::rng::{counter_uniform, derive_seed};
use crate::scalar::Scalar;

/// Edge-weight distribution, sampled through its quantile function.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightLaw {
    #[default]
    Uniform01,
    Exponential { rate: f64 },
    /// Value `b` with probability `q`, otherwise `a`.
    TwoPoint { a: f64, b: f64, q: f64 },
    /// Discrete law on `values` (strictly increasing) with the given probabilities.
    UserTable { values: Vec<f64>, probs: Vec<f64> },
}

impl WeightLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightLaw::Uniform01 => Ok(()),
            WeightLaw::Exponential { rate } => {
                if rate.is_finite() && *rate > 0.0 {
                    Ok(())
                } else {
                    invalid(format!("exponential rate must be positive, got {rate}"))
                }
            }
            WeightLaw::TwoPoint { a, b, q } => {
                if !(a.is_finite() && b.is_finite() && *a >= 0.0 && a <= b) {
                    invalid(format!("two-point law needs 0 <= a <= b, got a={a}, b={b}"))
                } else if !(0.0..=1.0).contains(q) {
                    invalid(format!("two-point probability must lie in [0,1], got {q}"))
                } else {
                    Ok(())
                }
            }
            WeightLaw::UserTable { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return invalid("user table needs matching non-empty values and probs");
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return invalid("user table values must be finite and non-negative");
                }
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("user table values must be strictly increasing");
                }
                if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return invalid("user table probabilities must lie in [0,1]");
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return invalid(format!("user table probabilities sum to {total}, not 1"));
                }
                Ok(())
            }
        }
    }

    /// Generalized inverse `inf{x : F(x) >= u}`; `-inf` for `u <= 0`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let u = u.min(1.0);
        match self {
            WeightLaw::Uniform01 => u,
            WeightLaw::Exponential { rate } => -(-u).ln_1p() / rate,
            WeightLaw::TwoPoint { a, b, q } => {
                if u <= 1.0 - q {
                    *a
                } else {
                    *b
                }
            }
            WeightLaw::UserTable { values, probs } => {
                let mut cum = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    cum += p;
                    if u <= cum + 1e-15 {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            WeightLaw::Uniform01 => x.clamp(0.0, 1.0),
            WeightLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            WeightLaw::TwoPoint { a, b, q } => {
                if x >= *b {
                    1.0
                } else if x >= *a {
                    1.0 - q
                } else {
                    0.0
                }
            }
            WeightLaw::UserTable { values, probs } => values
                .iter()
                .zip(probs)
                .filter(|(v, _)| **v <= x)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            WeightLaw::Uniform01 => 0.5,
            WeightLaw::Exponential { rate } => 1.0 / rate,
            WeightLaw::TwoPoint { a, b, q } => (1.0 - q) * a + q * b,
            WeightLaw::UserTable { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    /// True when the law puts all its mass on one value.
    pub fn is_degenerate(&self) -> bool {
        match self {
            WeightLaw::Uniform01 | WeightLaw::Exponential { .. } => false,
            WeightLaw::TwoPoint { a, b, q } => a == b || *q == 0.0 || *q == 1.0,
            WeightLaw::UserTable { probs, .. } => probs.iter().filter(|&&p| p > 0.0).count() <= 1,
        }
    }
}

/// Open-interval uniform for edge `index` under `key`.
#[inline]
fn edge_uniform(key: u64, index: u64) -> f64 {
    counter_uniform(key, index) + 0.5 / (1u64 << 53) as f64
}

/// The box `B(n)` of `Z^d` with nearest-neighbor edges and i.i.d. weights.
#[derive(Debug, Clone)]
pub struct LatticeBox<F = f64> {
    n: i64,
    d: usize,
    law: WeightLaw,
    graph: WeightedGraph<F>,
    // index of the first edge leaving each vertex in the positive direction
    edge_offset: Vec<u32>,
}

impl<F: Scalar> LatticeBox<F> {
    /// Edge `i` receives `law.quantile(U_i)` where `U_i` is the `i`-th value of
    /// a counter-based stream keyed by `(seed, n, d)`.
    pub fn build(n: usize, d: usize, law: WeightLaw, seed: u64) -> Result<Self> {
        let mut b = Self::skeleton(n, d, law)?;
        b.redraw_all(seed);
        Ok(b)
    }

    /// Geometry with all weights zero.
    pub fn skeleton(n: usize, d: usize, law: WeightLaw) -> Result<Self> {
        if n < 1 {
            return invalid("lattice box needs n >= 1");
        }
        if d < 2 {
            return invalid("lattice box needs d >= 2");
        }
        law.validate()?;
        let side = 2 * n + 1;
        let count = (side as f64).powi(d as i32);
        if count > 1.0e8 {
            return invalid(format!("lattice box with {count} vertices is too large"));
        }
        let vertex_count = side.pow(d as u32);
        let mut graph = WeightedGraph::new(vertex_count);
        let mut stride = 1;
        let mut strides = Vec::with_capacity(d);
        for _ in 0..d {
            strides.push(stride);
            stride *= side;
        }
        let mut edge_offset = Vec::with_capacity(vertex_count);
        for v in 0..vertex_count {
            edge_offset.push(graph.edges().len() as u32);
            for &s in &strides {
                if (v / s) % side + 1 < side {
                    graph.push_unchecked(Edge::new(v, v + s, F::zero()));
                }
            }
        }
        Ok(Self {
            n: n as i64,
            d,
            law,
            graph,
            edge_offset,
        })
    }

    fn weight_key(&self, seed: u64) -> u64 {
        derive_seed(seed, &[0x4c41_5454, self.n as u64, self.d as u64])
    }

    /// Redraw every weight from `seed`.
    pub fn redraw_all(&mut self, seed: u64) {
        let key = self.weight_key(seed);
        for i in 0..self.graph.edges().len() {
            let w = self.law.quantile(edge_uniform(key, i as u64));
            self.graph.set_weight(i, F::of(w)).expect("law produces valid weights");
        }
    }

    /// Redraw the weight of edge `i` alone; it takes the value edge `i` would
    /// have under a full draw with `seed`.
    pub fn resample_edge(&mut self, i: usize, seed: u64) {
        let w = self.law.quantile(edge_uniform(self.weight_key(seed), i as u64));
        self.graph.set_weight(i, F::of(w)).expect("law produces valid weights");
    }

    /// The weight edge `i` receives under a full draw with `seed`.
    pub fn edge_weight(&self, i: usize, seed: u64) -> F {
        F::of(self.law.quantile(edge_uniform(self.weight_key(seed), i as u64)))
    }

    /// Draw a full weight vector without touching the box.
    pub fn draw_weights(&self, seed: u64) -> Vec<F> {
        let key = self.weight_key(seed);
        (0..self.edge_count())
            .map(|i| F::of(self.law.quantile(edge_uniform(key, i as u64))))
            .collect()
    }

    pub fn set_weights(&mut self, weights: &[F]) -> Result<()> {
        if weights.len() != self.edge_count() {
            return invalid("weight vector length does not match edge count");
        }
        for (i, &w) in weights.iter().enumerate() {
            self.graph.set_weight(i, w)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn law(&self) -> &WeightLaw {
        &self.law
    }

    pub fn graph(&self) -> &WeightedGraph<F> {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges().len()
    }

    fn side(&self) -> i64 {
        2 * self.n + 1
    }

    /// Lattice coordinates of vertex `v`.
    pub fn coords_of(&self, v: usize) -> Vec<i64> {
        let side = self.side();
        let mut rest = v as i64;
        (0..self.d)
            .map(|_| {
                let c = rest % side - self.n;
                rest /= side;
                c
            })
            .collect()
    }

    pub fn vertex_at(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.d || x.iter().any(|c| c.abs() > self.n) {
            return None;
        }
        let side = self.side();
        Some(x.iter().rev().fold(0i64, |acc, &c| acc * side + (c + self.n)) as usize)
    }

    /// Index of the edge joining lattice points `x` and `y`, if any.
    pub fn edge_between(&self, x: &[i64], y: &[i64]) -> Option<usize> {
        let (a, b) = (self.vertex_at(x)?, self.vertex_at(y)?);
        let (lo, hi) = (a.min(b), a.max(b));
        let diff: i64 = x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum();
        if diff != 1 {
            return None;
        }
        // edges are laid out vertex-major, axis-minor
        let axis = x.iter().zip(y).position(|(p, q)| p != q)?;
        let lo_coords = self.coords_of(lo);
        let idx = self.edge_offset[lo] as usize + (0..axis).filter(|&k| lo_coords[k] < self.n).count();
        let e = self.graph.edge(idx);
        debug_assert_eq!((e.u, e.v), (lo, hi));
        Some(idx)
    }
}
