//! Uniform cell grid over a subset of configuration points, for d <= 3.

use crate::scalar::Scalar;

pub const MAX_GRID_DIM: usize = 3;

/// Compressed cell lists: `items[start[c]..start[c + 1]]` are the ids in cell `c`.
#[derive(Debug, Clone)]
pub struct CellGrid {
    dim: usize,
    origin: [f64; MAX_GRID_DIM],
    cell: f64,
    shape: [i64; MAX_GRID_DIM],
    start: Vec<u32>,
    items: Vec<u32>,
}

impl CellGrid {
    /// Index the points `ids` of the row-major buffer `coords`. The effective
    /// cell size is at least `cell_size`, enlarged when needed to keep the
    /// number of cells proportional to the number of points.
    pub fn build<F: Scalar>(coords: &[F], dim: usize, ids: &[u32], cell_size: f64) -> Self {
        assert!((1..=MAX_GRID_DIM).contains(&dim), "cell grid supports 1 <= d <= 3");
        let mut lo = [0.0; MAX_GRID_DIM];
        let mut hi = [0.0; MAX_GRID_DIM];
        if let Some(&first) = ids.first() {
            for k in 0..dim {
                let x = coords[first as usize * dim + k].to_f64_lossy();
                lo[k] = x;
                hi[k] = x;
            }
        }
        for &i in ids {
            for k in 0..dim {
                let x = coords[i as usize * dim + k].to_f64_lossy();
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let max_cells = (4 * ids.len()).max(64) as f64;
        let volume: f64 = (0..dim).map(|k| (hi[k] - lo[k]).max(1e-12)).product();
        let mut cell = cell_size.max(1e-12);
        let min_cell = (volume / max_cells).powf(1.0 / dim as f64);
        if cell < min_cell {
            cell = min_cell;
        }
        let mut shape = [1i64; MAX_GRID_DIM];
        for k in 0..dim {
            shape[k] = (((hi[k] - lo[k]) / cell).floor() as i64 + 1).max(1);
        }
        let n_cells: usize = shape[..dim].iter().product::<i64>() as usize;
        let mut grid = Self {
            dim,
            origin: lo,
            cell,
            shape,
            start: vec![0; n_cells + 1],
            items: vec![0; ids.len()],
        };
        let keys: Vec<usize> = ids
            .iter()
            .map(|&i| grid.flat(&grid.cell_of(&coords[i as usize * dim..(i as usize + 1) * dim])))
            .collect();
        for &k in &keys {
            grid.start[k + 1] += 1;
        }
        for c in 0..n_cells {
            grid.start[c + 1] += grid.start[c];
        }
        let mut fill = grid.start.clone();
        for (&id, &k) in ids.iter().zip(&keys) {
            grid.items[fill[k] as usize] = id;
            fill[k] += 1;
        }
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn cell_of<F: Scalar>(&self, p: &[F]) -> [i64; MAX_GRID_DIM] {
        let mut c = [0i64; MAX_GRID_DIM];
        for k in 0..self.dim {
            let raw = ((p[k].to_f64_lossy() - self.origin[k]) / self.cell).floor();
            c[k] = (raw as i64).clamp(0, self.shape[k] - 1);
        }
        c
    }

    fn flat(&self, c: &[i64; MAX_GRID_DIM]) -> usize {
        let mut idx = 0i64;
        for k in (0..self.dim).rev() {
            idx = idx * self.shape[k] + c[k];
        }
        idx as usize
    }

    fn cell_items(&self, c: &[i64; MAX_GRID_DIM]) -> &[u32] {
        let f = self.flat(c);
        &self.items[self.start[f] as usize..self.start[f + 1] as usize]
    }

    fn for_each_cell_in(&self, lo: [i64; MAX_GRID_DIM], hi: [i64; MAX_GRID_DIM], mut f: impl FnMut(&[i64; MAX_GRID_DIM])) {
        let mut c = lo;
        for k in self.dim..MAX_GRID_DIM {
            c[k] = 0;
        }
        if (0..self.dim).any(|k| lo[k] > hi[k]) {
            return;
        }
        loop {
            f(&c);
            let mut k = 0;
            loop {
                if k == self.dim {
                    return;
                }
                if c[k] < hi[k] {
                    c[k] += 1;
                    break;
                }
                c[k] = lo[k];
                k += 1;
            }
        }
    }

    /// Visit every id whose cell meets the L-infinity ball of radius `radius`
    /// around `p`. Superset of the ids within Euclidean distance `radius`.
    pub fn for_each_near<F: Scalar>(&self, p: &[F], radius: f64, mut f: impl FnMut(u32)) {
        let mut lo = [0i64; MAX_GRID_DIM];
        let mut hi = [0i64; MAX_GRID_DIM];
        for k in 0..self.dim {
            let x = p[k].to_f64_lossy() - self.origin[k];
            let a = ((x - radius) / self.cell).floor();
            let b = ((x + radius) / self.cell).floor();
            if b < 0.0 || a > (self.shape[k] - 1) as f64 {
                return;
            }
            lo[k] = (a.max(0.0) as i64).min(self.shape[k] - 1);
            hi[k] = (b as i64).clamp(0, self.shape[k] - 1);
        }
        self.for_each_cell_in(lo, hi, |c| {
            for &id in self.cell_items(c) {
                f(id);
            }
        });
    }

    /// Visit the ids in cells at Chebyshev cell-distance exactly `ring` from
    /// the cell of `p`. Returns false once the ring lies entirely outside the grid.
    pub fn for_each_in_ring<F: Scalar>(&self, p: &[F], ring: i64, mut f: impl FnMut(u32)) -> bool {
        let center = self.cell_of(p);
        let mut lo = [0i64; MAX_GRID_DIM];
        let mut hi = [0i64; MAX_GRID_DIM];
        let mut any = false;
        for k in 0..self.dim {
            lo[k] = (center[k] - ring).max(0);
            hi[k] = (center[k] + ring).min(self.shape[k] - 1);
            if center[k] - ring >= 0 || center[k] + ring < self.shape[k] {
                any = true;
            }
        }
        if !any {
            return false;
        }
        self.for_each_cell_in(lo, hi, |c| {
            let cheb = (0..self.dim).map(|k| (c[k] - center[k]).abs()).max().unwrap_or(0);
            if cheb == ring {
                for &id in self.cell_items(c) {
                    f(id);
                }
            }
        });
        true
    }

    /// Every point not yet visited after rings `0..=ring` is at Euclidean
    /// distance at least this from `p`.
    pub fn ring_clearance(&self, ring: i64) -> f64 {
        ring as f64 * self.cell
    }
}
