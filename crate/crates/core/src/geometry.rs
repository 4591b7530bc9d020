//! Points, axis-aligned cubes, point configurations and Poisson sampling.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::scalar::Scalar;

/// Largest number of points a sampler will allocate.
pub const MAX_POINTS: f64 = 2_147_483_648.0; // 2^31

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point<F = f64> {
    pub coords: Vec<F>,
}

impl<F: Scalar> Point<F> {
    pub fn new(coords: Vec<F>) -> Self {
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![F::zero(); dim],
        }
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Self {
            coords: coords.iter().map(|&x| F::of(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.coords
    }
}

#[inline]
pub fn dist2<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

#[inline]
pub fn dist<F: Scalar>(a: &[F], b: &[F]) -> F {
    dist2(a, b).sqrt()
}

/// Closed L-infinity ball `center + [-half_width, half_width]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube<F = f64> {
    pub center: Point<F>,
    pub half_width: F,
}

impl<F: Scalar> Cube<F> {
    pub fn new(center: Point<F>, half_width: F) -> Result<Self> {
        if !(half_width > F::zero()) || !half_width.is_finite() {
            return invalid(format!("cube half width must be positive, got {half_width}"));
        }
        if center.coords.is_empty() || center.coords.iter().any(|c| !c.is_finite()) {
            return invalid("cube center must be a finite point of dimension >= 1");
        }
        Ok(Self { center, half_width })
    }

    /// `B(r) = [-r, r]^d`.
    pub fn centered(dim: usize, half_width: F) -> Result<Self> {
        Self::new(Point::origin(dim), half_width)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width.to_f64_lossy()).powi(self.dim() as i32)
    }

    /// L-infinity distance from the center.
    pub fn sup_offset(&self, p: &[F]) -> F {
        p.iter()
            .zip(&self.center.coords)
            .fold(F::zero(), |acc, (&x, &c)| acc.max((x - c).abs()))
    }

    pub fn contains(&self, p: &[F]) -> bool {
        self.sup_offset(p) <= self.half_width
    }

    pub fn contains_cube(&self, other: &Cube<F>) -> bool {
        self.sup_offset(&other.center.coords) + other.half_width <= self.half_width
    }

    /// Euclidean distance from `p` to the cube as a closed set.
    pub fn distance(&self, p: &[F]) -> F {
        p.iter()
            .zip(&self.center.coords)
            .fold(F::zero(), |acc, (&x, &c)| {
                let excess = ((x - c).abs() - self.half_width).max(F::zero());
                acc + excess * excess
            })
            .sqrt()
    }

    /// Euclidean distance from `p` to the boundary of the cube.
    pub fn distance_to_boundary(&self, p: &[F]) -> F {
        if self.contains(p) {
            self.half_width - self.sup_offset(p)
        } else {
            self.distance(p)
        }
    }

    /// Lower and upper corner along each axis.
    pub fn bounds(&self) -> (Vec<F>, Vec<F>) {
        let lo = self.center.coords.iter().map(|&c| c - self.half_width).collect();
        let hi = self.center.coords.iter().map(|&c| c + self.half_width).collect();
        (lo, hi)
    }

    pub fn intersects(&self, other: &Cube<F>) -> bool {
        self.center
            .coords
            .iter()
            .zip(&other.center.coords)
            .all(|(&a, &b)| (a - b).abs() <= self.half_width + other.half_width)
    }
}

/// A set whose Euclidean distance function can be evaluated.
pub trait DistanceSet<F: Scalar> {
    fn distance(&self, p: &[F]) -> F;
}

impl<F: Scalar> DistanceSet<F> for Cube<F> {
    fn distance(&self, p: &[F]) -> F {
        Cube::distance(self, p)
    }
}

impl<F: Scalar> DistanceSet<F> for Point<F> {
    fn distance(&self, p: &[F]) -> F {
        dist(&self.coords, p)
    }
}

impl<F: Scalar> DistanceSet<F> for Configuration<F> {
    fn distance(&self, p: &[F]) -> F {
        self.iter()
            .map(|q| dist(q, p))
            .fold(F::infinity(), F::min)
    }
}

/// Euclidean distance from `p` to the cube `b`; zero iff `b` contains `p`.
pub fn dist_to_box<F: Scalar>(p: &Point<F>, b: &Cube<F>) -> F {
    b.distance(&p.coords)
}

/// `p` lies in the closed dilation `A^(r) = {x : d(x, A) <= r}`.
pub fn in_dilation<F: Scalar, A: DistanceSet<F> + ?Sized>(p: &Point<F>, set: &A, r: F) -> bool {
    set.distance(&p.coords) <= r
}

/// `p` lies in the inner shell `A_(r) = {x in A : d(x, boundary A) <= r}`.
pub fn in_inner_shell<F: Scalar>(p: &Point<F>, cube: &Cube<F>, r: F) -> bool {
    cube.contains(&p.coords) && cube.half_width - cube.sup_offset(&p.coords) <= r
}

/// A finite point set inside a cubic domain. Coordinates are stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration<F = f64> {
    dim: usize,
    coords: Vec<F>,
    domain: Cube<F>,
}

impl<F: Scalar> Configuration<F> {
    pub fn empty(domain: Cube<F>) -> Self {
        Self {
            dim: domain.dim(),
            coords: Vec::new(),
            domain,
        }
    }

    /// Build from explicit points; rejects points outside the domain and
    /// exact duplicates.
    pub fn new(domain: Cube<F>, points: &[Point<F>]) -> Result<Self> {
        let dim = domain.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return invalid(format!("point of dimension {} in a {dim}-dimensional domain", p.dim()));
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return invalid("non-finite coordinate");
            }
            if !domain.contains(&p.coords) {
                return invalid(format!("point {:?} lies outside the domain", p.coords));
            }
            coords.extend_from_slice(&p.coords);
        }
        let c = Self { dim, coords, domain };
        if !c.duplicate_indices().is_empty() {
            return invalid("configuration contains duplicate points");
        }
        Ok(c)
    }

    pub fn from_coords(domain: Cube<F>, coords: Vec<F>) -> Result<Self> {
        let dim = domain.dim();
        if !coords.len().is_multiple_of(dim) {
            return invalid("coordinate buffer is not a multiple of the dimension");
        }
        let points: Vec<Point<F>> = coords.chunks(dim).map(|c| Point::new(c.to_vec())).collect();
        Self::new(domain, &points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn domain(&self) -> &Cube<F> {
        &self.domain
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[F] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_point(&self, i: usize) -> Point<F> {
        Point::new(self.point(i).to_vec())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[F]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Points satisfying `keep`, with the same domain.
    pub fn filter(&self, mut keep: impl FnMut(&[F]) -> bool) -> Self {
        let coords = self
            .iter()
            .filter(|p| keep(p))
            .flat_map(|p| p.iter().copied())
            .collect();
        Self {
            dim: self.dim,
            coords,
            domain: self.domain.clone(),
        }
    }

    /// Points inside `sub`, re-homed to the domain `sub`.
    pub fn restrict_to(&self, sub: &Cube<F>) -> Self {
        let mut c = self.filter(|p| sub.contains(p));
        c.domain = sub.clone();
        c
    }

    /// Concatenate points (domains must agree; duplicates are not checked).
    pub fn union(&self, other: &Configuration<F>) -> Self {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self {
            dim: self.dim,
            coords,
            domain: self.domain.clone(),
        }
    }

    pub fn push(&mut self, p: &[F]) -> Result<()> {
        if p.len() != self.dim || !self.domain.contains(p) {
            return invalid("point outside the domain");
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Indices `j` whose point equals some earlier point `i < j`.
    fn duplicate_indices(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut dups: Vec<usize> = order
            .windows(2)
            .filter(|w| self.point(w[0]) == self.point(w[1]))
            .map(|w| w[1])
            .collect();
        dups.sort_unstable();
        dups.dedup();
        dups
    }

    /// Binary encoding: magic, dimension, count, domain, then coordinates
    /// row-major, all little-endian with coordinates widened to f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for c in &self.domain.center.coords {
            w.write_all(&c.to_f64_lossy().to_le_bytes())?;
        }
        w.write_all(&self.domain.half_width.to_f64_lossy().to_le_bytes())?;
        for c in &self.coords {
            w.write_all(&c.to_f64_lossy().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad configuration magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        if dim == 0 || count as f64 > MAX_POINTS {
            return Err(Error::Format("bad configuration header".into()));
        }
        let mut read_f64 = |r: &mut R| -> Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let center: Vec<f64> = (0..dim).map(|_| read_f64(&mut r)).collect::<Result<_>>()?;
        let hw = read_f64(&mut r)?;
        let domain = Cube::new(Point::from_f64(&center), F::of(hw))?;
        let coords: Vec<F> = (0..count * dim)
            .map(|_| read_f64(&mut r).map(F::of))
            .collect::<Result<_>>()?;
        Self::from_coords(domain, coords)
    }
}

const MAGIC: &[u8; 8] = b"MSTCFG01";

/// Homogeneous Poisson process of the given intensity in `domain`.
///
/// The point count is Poisson(intensity * volume) and positions are i.i.d.
/// uniform. Output is a pure function of `(domain, intensity, seed)`.
pub fn sample_poisson<F: Scalar>(domain: &Cube<F>, intensity: f64, seed: u64) -> Result<Configuration<F>> {
    if !intensity.is_finite() || intensity < 0.0 {
        return invalid(format!("intensity must be finite and non-negative, got {intensity}"));
    }
    let mean = intensity * domain.volume();
    if !mean.is_finite() || mean > MAX_POINTS {
        return invalid(format!("expected point count {mean} exceeds 2^31"));
    }
    let mut rng = rng::stream(seed, &[0x504f_4953]);
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let dim = domain.dim();
    let center: Vec<f64> = domain.center.coords.iter().map(|c| c.to_f64_lossy()).collect();
    let hw = domain.half_width.to_f64_lossy();
    let draw = |rng: &mut rng::StreamRng, out: &mut [F]| {
        for (o, &c) in out.iter_mut().zip(&center) {
            let u: f64 = rng.random();
            // clamp guards the f32 cast against rounding past the face
            *o = F::of(c + hw * (2.0 * u - 1.0))
                .max(F::of(c) - domain.half_width)
                .min(F::of(c) + domain.half_width);
        }
    };
    let mut coords = vec![F::zero(); count * dim];
    for chunk in coords.chunks_exact_mut(dim) {
        draw(&mut rng, chunk);
    }
    let mut config = Configuration {
        dim,
        coords,
        domain: domain.clone(),
    };
    loop {
        let dups = config.duplicate_indices();
        if dups.is_empty() {
            break;
        }
        for j in dups {
            draw(&mut rng, &mut config.coords[j * dim..(j + 1) * dim]);
        }
    }
    Ok(config)
}
