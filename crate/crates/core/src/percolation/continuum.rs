//! Clusters of `(P ∩ A)^(r)`, arm events and trifurcation boxes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{dist, Configuration, Cube, DistanceSet, Point};
use crate::grid::{CellGrid, MAX_GRID_DIM};
use crate::mst::UnionFind;
use crate::percolation::{ClusterLabeling, ItemKind};
use crate::scalar::Scalar;

/// Closed sets used as inner sets and excisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape<F = f64> {
    Cube { cube: Cube<F> },
    /// `cube^(radius)`.
    DilatedCube { cube: Cube<F>, radius: F },
    /// Closed Euclidean ball.
    Ball { center: Point<F>, radius: F },
    Union { parts: Vec<Shape<F>> },
}

impl<F: Scalar> Shape<F> {
    pub fn dilated(cube: Cube<F>, radius: F) -> Self {
        Shape::DilatedCube { cube, radius }
    }

    pub fn ball(center: Point<F>, radius: F) -> Self {
        Shape::Ball { center, radius }
    }

    pub fn contains(&self, p: &[F]) -> bool {
        self.distance(p) <= F::zero()
    }

    /// A cube containing the shape.
    pub fn bounding_cube(&self) -> Option<Cube<F>> {
        match self {
            Shape::Cube { cube } => Some(cube.clone()),
            Shape::DilatedCube { cube, radius } => Some(Cube {
                center: cube.center.clone(),
                half_width: cube.half_width + *radius,
            }),
            Shape::Ball { center, radius } => Some(Cube {
                center: center.clone(),
                half_width: *radius,
            }),
            Shape::Union { parts } => {
                let cubes: Vec<Cube<F>> = parts.iter().filter_map(|s| s.bounding_cube()).collect();
                let first = cubes.first()?;
                let d = first.dim();
                let mut lo = vec![F::infinity(); d];
                let mut hi = vec![F::neg_infinity(); d];
                for c in &cubes {
                    let (a, b) = c.bounds();
                    for k in 0..d {
                        lo[k] = lo[k].min(a[k]);
                        hi[k] = hi[k].max(b[k]);
                    }
                }
                let two = F::one() + F::one();
                let center: Vec<F> = lo.iter().zip(&hi).map(|(&a, &b)| (a + b) / two).collect();
                let half = lo.iter().zip(&hi).fold(F::zero(), |m, (&a, &b)| m.max((b - a) / two));
                Some(Cube {
                    center: Point::new(center),
                    half_width: half,
                })
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Shape::Cube { cube } if cube.dim() == dim => Ok(()),
            Shape::DilatedCube { cube, radius } if cube.dim() == dim && *radius >= F::zero() => Ok(()),
            Shape::Ball { center, radius } if center.dim() == dim && *radius >= F::zero() => Ok(()),
            Shape::Union { parts } => parts.iter().try_for_each(|s| s.validate(dim)),
            _ => invalid(format!("shape does not fit dimension {dim}")),
        }
    }
}

impl<F: Scalar> DistanceSet<F> for Shape<F> {
    fn distance(&self, p: &[F]) -> F {
        match self {
            Shape::Cube { cube } => cube.distance(p),
            Shape::DilatedCube { cube, radius } => (cube.distance(p) - *radius).max(F::zero()),
            Shape::Ball { center, radius } => (dist(&center.coords, p) - *radius).max(F::zero()),
            Shape::Union { parts } => parts.iter().map(|s| s.distance(p)).fold(F::infinity(), F::min),
        }
    }
}

impl<F: Scalar> From<Cube<F>> for Shape<F> {
    fn from(cube: Cube<F>) -> Self {
        Shape::Cube { cube }
    }
}

/// `(∩ within) ∖ (∪ excluded)`; with no cube constraint, all of space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Region<F = f64> {
    pub within: Vec<Cube<F>>,
    pub excluded: Vec<Shape<F>>,
}

impl<F: Scalar> Region<F> {
    pub fn all() -> Self {
        Self {
            within: Vec::new(),
            excluded: Vec::new(),
        }
    }

    pub fn cube(c: Cube<F>) -> Self {
        Self::all().within(c)
    }

    pub fn within(mut self, c: Cube<F>) -> Self {
        self.within.push(c);
        self
    }

    pub fn minus(mut self, s: impl Into<Shape<F>>) -> Self {
        self.excluded.push(s.into());
        self
    }

    pub fn contains(&self, p: &[F]) -> bool {
        self.within.iter().all(|c| c.contains(p)) && !self.excluded.iter().any(|s| s.contains(p))
    }
}

/// Label the r-clusters of the points of `c` inside `region`: two points share
/// a cluster iff a chain of points at mutual distance at most `2r` joins them.
pub fn continuum_clusters<F: Scalar>(c: &Configuration<F>, region: &Region<F>, r: F) -> Result<ClusterLabeling> {
    if !(r > F::zero()) || !r.is_finite() {
        return invalid(format!("cluster radius must be positive, got {r}"));
    }
    for cube in &region.within {
        if cube.dim() != c.dim() {
            return invalid("region dimension does not match configuration");
        }
    }
    for s in &region.excluded {
        s.validate(c.dim())?;
    }
    let items: Vec<usize> = (0..c.len()).filter(|&i| region.contains(c.point(i))).collect();
    let mut uf = UnionFind::new(items.len());
    let reach = r + r;
    let linked = |a: usize, b: usize| dist(c.point(items[a]), c.point(items[b])) <= reach;
    if c.dim() > MAX_GRID_DIM {
        for a in 0..items.len() {
            for b in a + 1..items.len() {
                if linked(a, b) {
                    uf.union(a, b);
                }
            }
        }
    } else if !items.is_empty() {
        let local: Vec<u32> = (0..items.len() as u32).collect();
        let sub: Vec<F> = items.iter().flat_map(|&i| c.point(i).iter().copied()).collect();
        let grid = CellGrid::build(&sub, c.dim(), &local, reach.to_f64_lossy());
        let d = c.dim();
        for a in 0..items.len() {
            grid.for_each_near(&sub[a * d..(a + 1) * d], reach.to_f64_lossy(), |b| {
                let b = b as usize;
                if b > a && linked(a, b) {
                    uf.union(a, b);
                }
            });
        }
    }
    Ok(ClusterLabeling::from_union_find(
        ItemKind::ContinuumPoint,
        r.to_f64_lossy(),
        items,
        &mut uf,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmVariant {
    /// `K1 ↔ K2`: clusters meet `K1^(r)`.
    Touch,
    /// `K1 → K2`: clusters meet `K1^(2r)`.
    Reach,
}

/// At least `k` disjoint r-clusters of `P ∩ (K2 ∖ K1)`, restricted to
/// `ambient` when given, each meeting the inner set's dilation and `(K2)_(2r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmQuery<F = f64> {
    pub inner: Shape<F>,
    pub outer: Cube<F>,
    pub r: F,
    pub k: usize,
    pub variant: ArmVariant,
    pub ambient: Option<Cube<F>>,
}

impl<F: Scalar> ArmQuery<F> {
    fn region(&self) -> Region<F> {
        let mut region = Region::cube(self.outer.clone()).minus(self.inner.clone());
        if let Some(a) = &self.ambient {
            region = region.within(a.clone());
        }
        region
    }

    /// Number of clusters that qualify as arms.
    pub fn count_arms(&self, c: &Configuration<F>) -> Result<usize> {
        if self.k == 0 {
            return invalid("arm count k must be at least 1");
        }
        if self.outer.dim() != c.dim() {
            return invalid("arm query dimension does not match configuration");
        }
        let labels = continuum_clusters(c, &self.region(), self.r)?;
        let two = F::one() + F::one();
        let near = match self.variant {
            ArmVariant::Touch => self.r,
            ArmVariant::Reach => two * self.r,
        };
        let shell = two * self.r;
        let mut inner_hit = vec![false; labels.cluster_count];
        let mut outer_hit = vec![false; labels.cluster_count];
        for (&id, &l) in labels.items.iter().zip(&labels.labels) {
            let p = c.point(id);
            if !inner_hit[l] && self.inner.distance(p) <= near {
                inner_hit[l] = true;
            }
            if !outer_hit[l] && self.outer.half_width - self.outer.sup_offset(p) <= shell {
                outer_hit[l] = true;
            }
        }
        Ok(inner_hit.iter().zip(&outer_hit).filter(|(a, b)| **a && **b).count())
    }
}

pub fn arm_event<F: Scalar>(c: &Configuration<F>, q: &ArmQuery<F>) -> Result<bool> {
    Ok(q.count_arms(c)? >= q.k)
}

/// `M` is a trifurcation box for `K`: some r-cluster of `P ∩ M` meets `K`, and
/// removing `K` splits it into at least three r-clusters that each reach `M_(2r)`.
pub fn is_trifurcation_box<F: Scalar>(c: &Configuration<F>, k: &Shape<F>, m: &Cube<F>, r: F) -> Result<bool> {
    k.validate(c.dim())?;
    match k.bounding_cube() {
        Some(b) if m.contains_cube(&b) => {}
        _ => return invalid("trifurcation test needs K inside M"),
    }
    let whole = continuum_clusters(c, &Region::cube(m.clone()), r)?;
    let rest = continuum_clusters(c, &Region::cube(m.clone()).minus(k.clone()), r)?;
    let two = F::one() + F::one();
    let mut reaches_shell = vec![false; rest.cluster_count];
    let mut parent = vec![usize::MAX; rest.cluster_count];
    for (&id, &l) in rest.items.iter().zip(&rest.labels) {
        if m.half_width - m.sup_offset(c.point(id)) <= two * r {
            reaches_shell[l] = true;
        }
        parent[l] = whole.label_of(id).expect("sub-region points are region points");
    }
    let mut meets_k = vec![false; whole.cluster_count];
    for (&id, &l) in whole.items.iter().zip(&whole.labels) {
        if k.contains(c.point(id)) {
            meets_k[l] = true;
        }
    }
    let mut arms = vec![0usize; whole.cluster_count];
    for (l, &p) in parent.iter().enumerate() {
        if reaches_shell[l] {
            arms[p] += 1;
        }
    }
    Ok((0..whole.cluster_count).any(|l| meets_k[l] && arms[l] >= 3))
}
