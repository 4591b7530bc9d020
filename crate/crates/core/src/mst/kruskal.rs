use crate::mst::graph::{edge_order, Edge, WeightedGraph};
use crate::mst::tree::SpanningTree;
use crate::mst::union_find::UnionFind;
use crate::scalar::Scalar;

/// Minimum spanning forest by Kruskal's algorithm. Ties are broken by the
/// sorted endpoint pair, so the output is a deterministic function of the graph.
pub fn kruskal_mst<F: Scalar>(g: &WeightedGraph<F>) -> SpanningTree<F> {
    kruskal_from_edges(g.vertex_count(), g.edges())
}

pub(crate) fn kruskal_from_edges<F: Scalar>(n: usize, edges: &[Edge<F>]) -> SpanningTree<F> {
    let mut order: Vec<u32> = (0..edges.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| edge_order(&edges[a as usize], &edges[b as usize]));
    let mut uf = UnionFind::new(n);
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    for i in order {
        let e = edges[i as usize];
        if uf.union(e.u, e.v) {
            chosen.push(e);
            if chosen.len() + 1 == n {
                break;
            }
        }
    }
    SpanningTree::from_forest_unchecked(n, chosen, uf.components())
}

/// Total MST weight only; skips building the edge list.
pub fn mst_weight<F: Scalar>(n: usize, edges: &[Edge<F>]) -> F {
    kruskal_from_edges(n, edges).total_weight()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = WeightedGraph::from_edges(
            3,
            [Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0), Edge::new(0, 2, 3.0)],
        )
        .unwrap();
        let t = kruskal_mst(&g);
        assert_eq!(t.total_weight(), 3.0);
        assert_eq!(t.edge_keys(), vec![(0, 1), (1, 2)]);
        assert!(t.is_spanning_tree());
    }

    #[test]
    fn trivial_graphs() {
        assert_eq!(kruskal_mst(&WeightedGraph::<f64>::new(1)).total_weight(), 0.0);
        let empty = kruskal_mst(&WeightedGraph::<f64>::new(0));
        assert_eq!(empty.total_weight(), 0.0);
        assert!(empty.edges().is_empty());
    }

    #[test]
    fn disconnected_graph_gives_flagged_forest() {
        let g = WeightedGraph::from_edges(4, [Edge::new(0, 1, 1.0), Edge::new(2, 3, 4.0)]).unwrap();
        let t = kruskal_mst(&g);
        assert!(!t.is_spanning_tree());
        assert_eq!(t.component_count(), 2);
        assert_eq!(t.total_weight(), 5.0);
    }

    #[test]
    fn ties_break_by_endpoints() {
        let g = WeightedGraph::from_edges(
            3,
            [Edge::new(2, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(1, 0, 1.0)],
        )
        .unwrap();
        assert_eq!(kruskal_mst(&g).edge_keys(), vec![(0, 1), (0, 2)]);
    }
}
