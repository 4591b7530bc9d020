//! Weighted graphs, minimum spanning trees and minimax path queries.

pub mod euclidean;
pub mod graph;
pub mod kruskal;
pub mod lattice;
pub mod tree;
pub mod union_find;

pub use euclidean::{euclidean_mst, knn_lists, KnnReport, Strategy};
pub use graph::{Edge, WeightedGraph};
pub use kruskal::{kruskal_mst, mst_weight};
pub use lattice::{LatticeBox, WeightLaw};
pub use tree::{max_degree, minimax_value, PathMaxIndex, SpanningTree};
pub use union_find::UnionFind;

/// Build a lattice box; see [`LatticeBox::build`].
pub fn build_lattice_box<F: crate::Scalar>(
    n: usize,
    d: usize,
    weight_law: WeightLaw,
    seed: u64,
) -> crate::Result<LatticeBox<F>> {
    LatticeBox::build(n, d, weight_law, seed)
}
