use std::ops::ControlFlow;

use super::{BoxList, CoverageSource, Cube, Rect};

const MAX_CELLS_PER_DIM: usize = 1024;
const MAX_CELLS_TOTAL: usize = 1 << 22;

/// Uniform-grid bucket index over a fixed list of cubes.
///
/// Every cube is registered in all buckets it touches, so a probe only has to scan
/// the buckets under it. Used for point location and coverage queries against a
/// plain [`BoxList`] (the verifier never touches the synthesis tree).
#[derive(Debug, Clone)]
pub struct BoxIndex {
    rects: Vec<Rect>,
    lo: Vec<f64>,
    cell: Vec<f64>,
    shape: Vec<usize>,
    buckets: Vec<Vec<u32>>,
    dim: usize,
}

impl BoxIndex {
    pub fn new(list: &BoxList) -> Self {
        let rects: Vec<Rect> = list.iter().map(Cube::to_rect).collect();
        let Some(bounds) = list.bounding_rect() else {
            return Self {
                rects,
                lo: vec![],
                cell: vec![],
                shape: vec![],
                buckets: vec![],
                dim: 0,
            };
        };
        let dim = bounds.dim();
        let min_side = list
            .iter()
            .map(|b| 2.0 * b.radius)
            .filter(|s| *s > 0.0)
            .fold(f64::INFINITY, f64::min);
        let per_dim_cap =
            ((MAX_CELLS_TOTAL as f64).powf(1.0 / dim as f64) as usize).clamp(1, MAX_CELLS_PER_DIM);
        let shape: Vec<usize> = (0..dim)
            .map(|i| {
                let w = bounds.hi[i] - bounds.lo[i];
                if w <= 0.0 || !min_side.is_finite() {
                    1
                } else {
                    ((w / min_side).ceil() as usize).clamp(1, per_dim_cap)
                }
            })
            .collect();
        let cell: Vec<f64> = (0..dim)
            .map(|i| ((bounds.hi[i] - bounds.lo[i]) / shape[i] as f64).max(f64::MIN_POSITIVE))
            .collect();
        let mut index = Self {
            rects: Vec::new(),
            lo: bounds.lo.clone(),
            cell,
            shape: shape.clone(),
            buckets: vec![Vec::new(); shape.iter().product()],
            dim,
        };
        for (k, r) in rects.iter().enumerate() {
            let (a, b) = index.cell_range(r);
            index.for_each_cell(&a, &b, |bucket| bucket.push(k as u32));
        }
        index.rects = rects;
        index
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    fn coord_cell(&self, i: usize, v: f64) -> usize {
        let c = ((v - self.lo[i]) / self.cell[i]).floor();
        if c < 0.0 {
            0
        } else {
            (c as usize).min(self.shape[i] - 1)
        }
    }

    fn cell_range(&self, r: &Rect) -> (Vec<usize>, Vec<usize>) {
        let a = (0..self.dim)
            .map(|i| self.coord_cell(i, r.lo[i] - super::TOL))
            .collect();
        let b = (0..self.dim)
            .map(|i| self.coord_cell(i, r.hi[i] + super::TOL))
            .collect();
        (a, b)
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (i, s)| acc * s + i)
    }

    fn for_each_cell(&mut self, a: &[usize], b: &[usize], mut f: impl FnMut(&mut Vec<u32>)) {
        let mut idx = a.to_vec();
        loop {
            let k = self.flat(&idx);
            f(&mut self.buckets[k]);
            if !advance(&mut idx, a, b) {
                break;
            }
        }
    }

    /// `true` iff some indexed cube contains `y` (closed).
    pub fn contains_point(&self, y: &[f64]) -> bool {
        if self.rects.is_empty() {
            return false;
        }
        let idx: Vec<usize> = (0..self.dim).map(|i| self.coord_cell(i, y[i])).collect();
        self.buckets[self.flat(&idx)]
            .iter()
            .any(|&k| self.rects[k as usize].contains_point(y))
    }
}

fn advance(idx: &mut [usize], a: &[usize], b: &[usize]) -> bool {
    for d in (0..idx.len()).rev() {
        if idx[d] < b[d] {
            idx[d] += 1;
            return true;
        }
        idx[d] = a[d];
    }
    false
}

impl CoverageSource for BoxIndex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn visit_overlapping(&self, probe: &Rect, visit: &mut dyn FnMut(&Rect) -> ControlFlow<()>) {
        if self.rects.is_empty() {
            return;
        }
        let bounds = Rect {
            lo: self.lo.clone(),
            hi: (0..self.dim)
                .map(|i| self.lo[i] + self.cell[i] * self.shape[i] as f64)
                .collect(),
        };
        if !bounds.intersects(probe) {
            return;
        }
        let (a, b) = self.cell_range(probe);
        let single = a == b;
        let mut seen = if single {
            Vec::new()
        } else {
            vec![false; self.rects.len()]
        };
        let mut idx = a.clone();
        loop {
            for &k in &self.buckets[self.flat(&idx)] {
                let k = k as usize;
                if !single {
                    if seen[k] {
                        continue;
                    }
                    seen[k] = true;
                }
                let r = &self.rects[k];
                if r.intersects(probe) && visit(r).is_break() {
                    return;
                }
            }
            if !advance(&mut idx, &a, &b) {
                break;
            }
        }
    }
}
