//! MST length as a functional of independent blocks.

use crate::error::{invalid, Result};
use crate::geometry::{sample_poisson, Configuration, Cube, Point};
use crate::mst::{euclidean_mst, mst_weight, Edge, LatticeBox, Strategy, WeightLaw};
use crate::rng::derive_seed;
use crate::stein::BlockModel;

/// Total MST weight of the lattice box `B(n)`; each edge weight is a block.
#[derive(Debug, Clone)]
pub struct LatticeMstModel {
    skeleton: LatticeBox<f64>,
}

impl LatticeMstModel {
    pub fn new(n: usize, d: usize, law: WeightLaw) -> Result<Self> {
        Ok(Self {
            skeleton: LatticeBox::skeleton(n, d, law)?,
        })
    }

    pub fn lattice(&self) -> &LatticeBox<f64> {
        &self.skeleton
    }
}

impl BlockModel for LatticeMstModel {
    type Block = f64;

    fn n_blocks(&self) -> usize {
        self.skeleton.edge_count()
    }

    fn draw_block(&self, j: usize, seed: u64) -> f64 {
        self.skeleton.edge_weight(j, seed)
    }

    fn value(&self, blocks: &[f64]) -> f64 {
        let edges: Vec<Edge<f64>> = self
            .skeleton
            .graph()
            .edges()
            .iter()
            .zip(blocks)
            .map(|(e, &w)| Edge::new(e.u, e.v, w))
            .collect();
        mst_weight(self.skeleton.vertex_count(), &edges)
    }
}

/// Euclidean MST length of a Poisson process in `B(n)`, split into the
/// `m^d` cubes `2s·j + B(s)` with `m` odd and `n = m·s`.
#[derive(Debug, Clone)]
pub struct PoissonBlockModel {
    dim: usize,
    n: f64,
    per_axis: usize,
    intensity: f64,
    blocks: Vec<Cube<f64>>,
}

impl PoissonBlockModel {
    /// Blocks as close to unit half-width as possible: `m` is the largest
    /// odd integer not above `n`.
    pub fn new(dim: usize, n: f64, intensity: f64) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return invalid(format!("poisson block model needs n >= 1, got {n}"));
        }
        let mut m = n.floor() as usize;
        if m.is_multiple_of(2) {
            m -= 1;
        }
        Self::with_blocks(dim, n, m, intensity)
    }

    pub fn with_blocks(dim: usize, n: f64, per_axis: usize, intensity: f64) -> Result<Self> {
        if dim == 0 || per_axis.is_multiple_of(2) {
            return invalid("poisson block model needs dim >= 1 and an odd block count per axis");
        }
        if !(intensity.is_finite() && intensity >= 0.0) {
            return invalid("intensity must be finite and non-negative");
        }
        if !(n > 0.0) || !n.is_finite() {
            return invalid("box half width must be positive");
        }
        let s = n / per_axis as f64;
        let k = (per_axis / 2) as i64;
        let count = per_axis.pow(dim as u32);
        let blocks = (0..count)
            .map(|j| {
                let mut rest = j;
                let center: Vec<f64> = (0..dim)
                    .map(|_| {
                        let i = (rest % per_axis) as i64 - k;
                        rest /= per_axis;
                        2.0 * s * i as f64
                    })
                    .collect();
                Cube::new(Point::new(center), s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim,
            n,
            per_axis,
            intensity,
            blocks,
        })
    }

    pub fn block_half_width(&self) -> f64 {
        self.n / self.per_axis as f64
    }

    pub fn blocks(&self) -> &[Cube<f64>] {
        &self.blocks
    }
}

impl BlockModel for PoissonBlockModel {
    type Block = Vec<f64>;

    fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn draw_block(&self, j: usize, seed: u64) -> Vec<f64> {
        sample_poisson::<f64>(&self.blocks[j], self.intensity, derive_seed(seed, &[0x504f_4953, j as u64]))
            .expect("block parameters were validated")
            .coords()
            .to_vec()
    }

    fn value(&self, blocks: &[Vec<f64>]) -> f64 {
        let domain = Cube::centered(self.dim, self.n).expect("validated half width");
        let coords: Vec<f64> = blocks.concat();
        let c = Configuration::from_coords(domain, coords).expect("blocks tile the domain");
        euclidean_mst(&c, Strategy::default_for(self.dim))
            .expect("default strategy is valid")
            .total_weight()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mst::kruskal_mst;

    #[test]
    fn lattice_blocks_are_edge_weights() {
        let m = LatticeMstModel::new(1, 2, WeightLaw::Uniform01).unwrap();
        assert_eq!(m.n_blocks(), 12);
        let x = m.draw(7);
        let b = LatticeBox::<f64>::build(1, 2, WeightLaw::Uniform01, 7).unwrap();
        let want = kruskal_mst(b.graph()).total_weight();
        assert_eq!(m.value(&x), want);
    }

    #[test]
    fn poisson_blocks_tile_the_box() {
        let m = PoissonBlockModel::new(2, 4.0, 1.0).unwrap();
        assert_eq!(m.n_blocks(), 9);
        assert!((m.block_half_width() - 4.0 / 3.0).abs() < 1e-15);
        let total: f64 = m.blocks().iter().map(|c| c.volume()).sum();
        assert!((total - 64.0).abs() < 1e-9);
        let x = m.draw(3);
        assert!(m.value(&x) > 0.0);
        assert!(PoissonBlockModel::with_blocks(2, 4.0, 2, 1.0).is_err());
    }
}
