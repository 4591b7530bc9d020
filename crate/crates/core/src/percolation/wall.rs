//! K-walls around `B(x, a)`.
//!
//! A configuration `W` contains a K-wall around `B(x, a)` at scale `b` when for
//! every `p1 ∈ ∂B(x, a)` and `p2 ∈ K ∩ ∂B(x, b)` some point of `W ∩ K` lies in
//! `S(p1, 3δ/4) ∩ S(p2, 3δ/4) ∩ (B(x, b) ∖ B(x, a))`, with `δ = |p1 − p2|`.
//! Both boundaries are replaced by grids of covering radius at most `0.8·mesh`;
//! the test then has a margin of `2·mesh` on the lens radius in each direction.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{Configuration, Cube, Point};
use crate::grid::{CellGrid, MAX_GRID_DIM};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallStatus {
    Wall,
    NoWall,
    Inconclusive,
}

impl WallStatus {
    /// Conservative reading: inconclusive counts as no wall.
    pub fn is_wall(self) -> bool {
        self == WallStatus::Wall
    }
}

pub fn has_wall<F: Scalar>(
    c: &Configuration<F>,
    x: &Point<F>,
    a: F,
    b: F,
    k: &Cube<F>,
    mesh: F,
) -> Result<WallStatus> {
    let d = c.dim();
    if x.dim() != d || k.dim() != d {
        return invalid("wall geometry dimension does not match configuration");
    }
    if !(a > F::zero() && b > a && b.is_finite()) {
        return invalid(format!("wall needs 0 < a < b, got a={a}, b={b}"));
    }
    if !(mesh > F::zero()) || !mesh.is_finite() {
        return invalid("wall mesh must be positive");
    }
    let inner = Cube {
        center: x.clone(),
        half_width: a,
    };
    if !k.contains_cube(&inner) {
        return invalid("B(x, a) must lie inside K");
    }
    let xf: Vec<f64> = x.coords.iter().map(|v| v.to_f64_lossy()).collect();
    let kc: Vec<f64> = k.center.coords.iter().map(|v| v.to_f64_lossy()).collect();
    let kh = k.half_width.to_f64_lossy();
    let (a, b, mesh) = (a.to_f64_lossy(), b.to_f64_lossy(), mesh.to_f64_lossy());
    let spacing = if d > 1 {
        mesh.min(1.6 * mesh / ((d - 1) as f64).sqrt())
    } else {
        mesh
    };
    let inner_pts = face_grid(&xf, a, None, spacing);
    let outer_pts = face_grid(&xf, b, Some((&kc, kh)), spacing);
    if outer_pts.is_empty() {
        return invalid("K does not meet the boundary of B(x, b)");
    }

    let in_annulus = |p: &[f64]| {
        let s = p.iter().zip(&xf).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        s > a && s <= b && p.iter().zip(&kc).all(|(u, v)| (u - v).abs() <= kh)
    };
    let cand: Vec<f64> = c
        .iter()
        .map(|p| p.iter().map(|v| v.to_f64_lossy()).collect::<Vec<f64>>())
        .filter(|p| in_annulus(p))
        .flatten()
        .collect();
    let m = cand.len() / d;
    let lens = Lens::new(&cand, d, m, mesh);
    let mut status = WallStatus::Wall;
    let mut cache = None;
    for p1 in &inner_pts {
        for p2 in &outer_pts {
            let delta = dist(p1, p2);
            if lens.hit(p1, p2, 0.75 * delta - 2.0 * mesh, &mut cache) {
                continue;
            }
            if !lens.hit(p1, p2, 0.75 * delta + 2.0 * mesh, &mut cache) {
                return Ok(WallStatus::NoWall);
            }
            status = WallStatus::Inconclusive;
        }
    }
    Ok(status)
}

fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

struct Lens<'a> {
    pts: &'a [f64],
    d: usize,
    grid: Option<CellGrid>,
}

impl<'a> Lens<'a> {
    fn new(pts: &'a [f64], d: usize, m: usize, mesh: f64) -> Self {
        let grid = (d <= MAX_GRID_DIM && m > 0).then(|| {
            let ids: Vec<u32> = (0..m as u32).collect();
            CellGrid::build(pts, d, &ids, 4.0 * mesh)
        });
        Self { pts, d, grid }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.pts[i * self.d..(i + 1) * self.d]
    }

    fn inside(&self, i: usize, p1: &[f64], p2: &[f64], r: f64) -> bool {
        let z = self.point(i);
        dist(z, p1) <= r && dist(z, p2) <= r
    }

    /// Some point within `r` of both `p1` and `p2`.
    fn hit(&self, p1: &[f64], p2: &[f64], r: f64, cache: &mut Option<usize>) -> bool {
        if r < 0.0 {
            return false;
        }
        if let Some(i) = *cache {
            if self.inside(i, p1, p2, r) {
                return true;
            }
        }
        let delta = dist(p1, p2);
        if r < delta / 2.0 {
            return false;
        }
        let mid: Vec<f64> = p1.iter().zip(p2).map(|(u, v)| 0.5 * (u + v)).collect();
        let reach = (r * r - 0.25 * delta * delta).max(0.0).sqrt();
        let mut found = None;
        match &self.grid {
            Some(g) => g.for_each_near(&mid, reach, |i| {
                if found.is_none() && self.inside(i as usize, p1, p2, r) {
                    found = Some(i as usize);
                }
            }),
            None => found = (0..self.pts.len() / self.d).find(|&i| self.inside(i, p1, p2, r)),
        }
        if found.is_some() {
            *cache = found;
        }
        found.is_some()
    }
}

/// Grid points on the faces of `center + [-h, h]^d`, clipped to `clip`, with
/// spacing at most `step` along every face axis.
fn face_grid(center: &[f64], h: f64, clip: Option<(&[f64], f64)>, step: f64) -> Vec<Vec<f64>> {
    let d = center.len();
    let mut out = Vec::new();
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            let fixed = center[axis] + sign * h;
            if let Some((kc, kh)) = clip {
                if (fixed - kc[axis]).abs() > kh {
                    continue;
                }
            }
            let mut ranges = Vec::with_capacity(d);
            let mut empty = false;
            for j in 0..d {
                if j == axis {
                    ranges.push((fixed, fixed, 0usize));
                    continue;
                }
                let (mut lo, mut hi) = (center[j] - h, center[j] + h);
                if let Some((kc, kh)) = clip {
                    lo = lo.max(kc[j] - kh);
                    hi = hi.min(kc[j] + kh);
                }
                if lo > hi {
                    empty = true;
                    break;
                }
                ranges.push((lo, hi, ((hi - lo) / step).ceil() as usize));
            }
            if empty {
                continue;
            }
            let mut idx = vec![0usize; d];
            loop {
                out.push(
                    ranges
                        .iter()
                        .zip(&idx)
                        .map(|(&(lo, hi, m), &i)| if m == 0 { lo } else { lo + (hi - lo) * i as f64 / m as f64 })
                        .collect(),
                );
                let mut j = 0;
                while j < d {
                    if idx[j] < ranges[j].2 {
                        idx[j] += 1;
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_config(half: f64, step: f64) -> Configuration<f64> {
        let m = (2.0 * half / step) as i64;
        let mut pts = Vec::new();
        for i in 0..=m {
            for j in 0..=m {
                pts.push(Point::from_f64(&[-half + i as f64 * step, -half + j as f64 * step]));
            }
        }
        Configuration::new(Cube::centered(2, half).unwrap(), &pts).unwrap()
    }

    #[test]
    fn face_grid_covers_boundary() {
        let pts = face_grid(&[0.0, 0.0], 1.0, None, 0.25);
        assert_eq!(pts.len(), 4 * 9);
        assert!(pts.iter().all(|p| (p[0].abs().max(p[1].abs()) - 1.0).abs() < 1e-12));
        let clipped = face_grid(&[0.0, 0.0], 3.0, Some((&[2.0, 0.0], 2.0)), 0.5);
        assert!(clipped.iter().all(|p| p[0] >= 0.0 && p[1].abs() <= 2.0 + 1e-12));
        assert!(!clipped.is_empty());
    }

    #[test]
    fn dense_grid_is_a_wall() {
        let c = grid_config(5.0, 0.1);
        let k = Cube::centered(2, 5.0).unwrap();
        let w = has_wall(&c, &Point::origin(2), 1.0, 4.0, &k, 0.1).unwrap();
        assert_eq!(w, WallStatus::Wall);
    }

    #[test]
    fn empty_annulus_is_not() {
        let c = grid_config(5.0, 0.1).filter(|p| p[0].abs().max(p[1].abs()) <= 1.0);
        let k = Cube::centered(2, 5.0).unwrap();
        let w = has_wall(&c, &Point::origin(2), 1.0, 4.0, &k, 0.1).unwrap();
        assert_eq!(w, WallStatus::NoWall);
    }

    #[test]
    fn preconditions() {
        let c = grid_config(2.0, 0.5);
        let k = Cube::centered(2, 2.0).unwrap();
        let o = Point::origin(2);
        assert!(has_wall(&c, &o, 1.0, 0.5, &k, 0.1).is_err());
        assert!(has_wall(&c, &o, 1.0, 1.5, &k, 0.0).is_err());
        assert!(has_wall(&c, &o, 3.0, 4.0, &k, 0.1).is_err());
        assert!(has_wall(&c, &o, 1.0, 3.0, &k, 0.1).is_err());
    }
}
