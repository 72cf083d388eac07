//! Exact max-norm nearest-neighbour search over a uniform grid of buckets.
//!
//! Cells are searched in Chebyshev rings around the query cell. After ring `k` every
//! unvisited point lies outside the block of cells within distance `k`, so the
//! distance from the (clamped) query to that block's boundary bounds all remaining
//! candidates from below. The search stops once the bound exceeds the best distance.

use crate::geometry::max_norm_dist;

const TARGET_PER_CELL: f64 = 2.0;

#[derive(Debug, Clone)]
pub(crate) struct GridIndex {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cell: Vec<f64>,
    shape: Vec<usize>,
    /// CSR layout: points of cell `c` are `order[start[c]..start[c + 1]]`, ascending.
    start: Vec<usize>,
    order: Vec<u32>,
}

impl GridIndex {
    pub(crate) fn build(dim: usize, xs: &[f64]) -> Self {
        let m = xs.len() / dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in xs.chunks_exact(dim) {
            for i in 0..dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let per_dim = ((m as f64 / TARGET_PER_CELL).powf(1.0 / dim as f64).ceil() as usize).max(1);
        let shape: Vec<usize> = (0..dim)
            .map(|i| if hi[i] > lo[i] { per_dim } else { 1 })
            .collect();
        let cell: Vec<f64> = (0..dim)
            .map(|i| {
                if hi[i] > lo[i] {
                    (hi[i] - lo[i]) / shape[i] as f64
                } else {
                    1.0
                }
            })
            .collect();

        let mut grid = Self {
            dim,
            lo,
            hi,
            cell,
            shape,
            start: Vec::new(),
            order: Vec::new(),
        };
        let ncells: usize = grid.shape.iter().product();
        let cells: Vec<usize> = xs
            .chunks_exact(dim)
            .map(|p| grid.flat(&grid.cell_of(p)))
            .collect();
        let mut start = vec![0usize; ncells + 1];
        for &c in &cells {
            start[c + 1] += 1;
        }
        for c in 0..ncells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; m];
        for (j, &c) in cells.iter().enumerate() {
            order[fill[c]] = j as u32;
            fill[c] += 1;
        }
        grid.start = start;
        grid.order = order;
        grid
    }

    fn cell_of(&self, p: &[f64]) -> Vec<usize> {
        (0..self.dim)
            .map(|i| {
                let c = ((p[i] - self.lo[i]) / self.cell[i]).floor();
                if c <= 0.0 {
                    0
                } else {
                    (c as usize).min(self.shape[i] - 1)
                }
            })
            .collect()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (i, s)| acc * s + i)
    }

    /// Returns `(index, distance)` of the nearest point; ties go to the lowest index.
    pub(crate) fn nearest(&self, xs: &[f64], q: &[f64]) -> (usize, f64) {
        let dim = self.dim;
        let clamped: Vec<f64> = (0..dim)
            .map(|i| q[i].clamp(self.lo[i], self.hi[i]))
            .collect();
        let home: Vec<i64> = self
            .cell_of(&clamped)
            .into_iter()
            .map(|c| c as i64)
            .collect();
        let max_ring = *self.shape.iter().max().unwrap() as i64;

        let mut best = (usize::MAX, f64::INFINITY);
        let consider = |j: usize, best: &mut (usize, f64)| {
            let d = max_norm_dist(q, &xs[j * dim..(j + 1) * dim]);
            if d < best.1 || (d == best.1 && j < best.0) {
                *best = (j, d);
            }
        };

        for k in 0..=max_ring {
            // Visit every in-range cell at Chebyshev distance exactly k from home.
            let a: Vec<i64> = (0..dim).map(|i| (home[i] - k).max(0)).collect();
            let b: Vec<i64> = (0..dim)
                .map(|i| (home[i] + k).min(self.shape[i] as i64 - 1))
                .collect();
            let mut idx = a.clone();
            loop {
                let ring = (0..dim)
                    .map(|i| (idx[i] - home[i]).abs())
                    .max()
                    .unwrap_or(0);
                if ring == k {
                    let u: Vec<usize> = idx.iter().map(|&v| v as usize).collect();
                    let c = self.flat(&u);
                    for &j in &self.order[self.start[c]..self.start[c + 1]] {
                        consider(j as usize, &mut best);
                    }
                }
                if !advance(&mut idx, &a, &b) {
                    break;
                }
            }

            // Lower bound on anything outside the block of radius k.
            let mut bound = f64::INFINITY;
            for i in 0..dim {
                if home[i] - k > 0 {
                    let edge = self.lo[i] + (home[i] - k) as f64 * self.cell[i];
                    bound = bound.min(clamped[i] - edge);
                }
                if home[i] + k < self.shape[i] as i64 - 1 {
                    let edge = self.lo[i] + (home[i] + k + 1) as f64 * self.cell[i];
                    bound = bound.min(edge - clamped[i]);
                }
            }
            if bound.is_infinite() {
                break;
            }
            // Slack absorbs rounding in the cell assignment.
            if best.0 != usize::MAX
                && bound - 1e-9 * self.cell.iter().cloned().fold(0.0, f64::max) > best.1
            {
                break;
            }
        }
        best
    }
}

fn advance(idx: &mut [i64], a: &[i64], b: &[i64]) -> bool {
    for d in (0..idx.len()).rev() {
        if idx[d] < b[d] {
            idx[d] += 1;
            return true;
        }
        idx[d] = a[d];
    }
    false
}

/// Linear scan with the same tie-break; the reference for [`GridIndex::nearest`].
pub(crate) fn nearest_linear(dim: usize, xs: &[f64], q: &[f64]) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (j, p) in xs.chunks_exact(dim).enumerate() {
        let d = max_norm_dist(q, p);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}
