//! Continuum r-clusters and lattice p-clusters, arm events, trifurcation
//! boxes and walls.

pub mod continuum;
pub mod estimate;
pub mod lattice;
pub mod wall;

use serde::{Deserialize, Serialize};

pub use continuum::{arm_event, continuum_clusters, is_trifurcation_box, ArmQuery, ArmVariant, Region, Shape};
pub use estimate::{
    estimate_arm_probability, wilson_interval, write_arm_csv, ArmEstimateSpec, ArmRow, ArmTemplate, LatticeSite,
    ARM_CSV_HEADER,
};
pub use lattice::{
    boundary_vertices, cdf_coupling, lattice_clusters, lattice_clusters_at, lattice_two_arm, EdgeRegion, LatticeCube,
    LatticeRegion, TwoArmSite,
};
pub use wall::{has_wall, WallStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    ContinuumPoint,
    LatticeVertex,
}

/// A partition of the items of a region into clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabeling {
    pub kind: ItemKind,
    /// Radius `r` (continuum) or level `p` (lattice).
    pub parameter: f64,
    /// Ids of the items that belong to the region, ascending.
    pub items: Vec<usize>,
    /// Cluster id of `items[i]`, numbered `0..cluster_count` by first appearance.
    pub labels: Vec<usize>,
    pub cluster_count: usize,
}

impl ClusterLabeling {
    pub(crate) fn from_union_find(
        kind: ItemKind,
        parameter: f64,
        items: Vec<usize>,
        uf: &mut crate::mst::UnionFind,
    ) -> Self {
        let labels = uf.labels();
        let cluster_count = uf.components();
        Self {
            kind,
            parameter,
            items,
            labels,
            cluster_count,
        }
    }

    /// Cluster of item `id`, if it lies in the region.
    pub fn label_of(&self, id: usize) -> Option<usize> {
        self.items.binary_search(&id).ok().map(|i| self.labels[i])
    }

    /// Item ids grouped by cluster.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (&id, &l) in self.items.iter().zip(&self.labels) {
            out[l].push(id);
        }
        out
    }

    /// Canonical form: the set of clusters, each sorted, sorted by first item.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        let mut c = self.clusters();
        c.sort();
        c
    }
}
