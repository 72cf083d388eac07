//! The state constraint set `X`, kept as a finite list of interior-disjoint root cubes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoxList, Cube, Rect, TOL};

/// Largest number of subdivisions of the shortest side tried when looking for a
/// common cube side.
const MAX_SIDE_SPLITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("domain has no boxes")]
    Empty,
    #[error("cannot parse domain {0:?}: expected \"lo1,lo2,...:hi1,hi2,...\"")]
    Syntax(String),
    #[error("domain bounds have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("domain is degenerate or inverted in coordinate {0}")]
    Degenerate(usize),
    #[error("domain sides {0:?} are not integer multiples of a common cube side")]
    NotCubeTiling(Vec<f64>),
    #[error("domain boxes {0} and {1} overlap")]
    Overlap(usize, usize),
}

/// Axis-aligned state constraint set written as a union of equal cubes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    roots: BoxList,
}

impl Domain {
    /// Tiles the rectangle `[lo, hi]` with equal cubes.
    ///
    /// The cube side is the shortest rectangle side divided by the smallest
    /// `k ≤ 64` for which every side is an integer multiple; otherwise the rectangle
    /// is rejected.
    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self, DomainError> {
        if lo.len() != hi.len() {
            return Err(DomainError::DimensionMismatch(lo.len(), hi.len()));
        }
        if lo.is_empty() {
            return Err(DomainError::Empty);
        }
        let sides: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| h - l).collect();
        if let Some(i) = sides.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(DomainError::Degenerate(i));
        }
        let shortest = sides.iter().cloned().fold(f64::INFINITY, f64::min);
        let (side, counts) = (1..=MAX_SIDE_SPLITS)
            .find_map(|k| {
                let side = shortest / k as f64;
                let counts: Option<Vec<usize>> = sides
                    .iter()
                    .map(|s| {
                        let q = s / side;
                        ((q - q.round()).abs() <= 1e-9 * q.max(1.0)).then(|| q.round() as usize)
                    })
                    .collect();
                counts.map(|c| (side, c))
            })
            .ok_or_else(|| DomainError::NotCubeTiling(sides.clone()))?;

        let radius = side / 2.0;
        let n = lo.len();
        let mut roots = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let center = (0..n)
                .map(|i| lo[i] + side * idx[i] as f64 + radius)
                .collect();
            roots.push(Cube { center, radius });
            let mut d = n;
            loop {
                if d == 0 {
                    return Ok(Self {
                        roots: BoxList::new(roots),
                    });
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < counts[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Uses the given cubes as roots after checking their interiors are disjoint.
    pub fn from_cubes(roots: BoxList) -> Result<Self, DomainError> {
        if roots.is_empty() {
            return Err(DomainError::Empty);
        }
        let n = roots.boxes[0].dim();
        for (i, a) in roots.iter().enumerate() {
            if a.dim() != n {
                return Err(DomainError::DimensionMismatch(n, a.dim()));
            }
            for (j, b) in roots.iter().enumerate().skip(i + 1) {
                let overlap =
                    (0..n).all(|d| (a.center[d] - b.center[d]).abs() < a.radius + b.radius - TOL);
                if overlap {
                    return Err(DomainError::Overlap(i, j));
                }
            }
        }
        Ok(Self { roots })
    }

    pub fn cube(center: Vec<f64>, radius: f64) -> Result<Self, DomainError> {
        let c = Cube::new(center, radius).map_err(|_| DomainError::Degenerate(0))?;
        Self::from_cubes(BoxList::new(vec![c]))
    }

    pub fn roots(&self) -> &BoxList {
        &self.roots
    }

    pub fn dim(&self) -> usize {
        self.roots.boxes[0].dim()
    }

    pub fn volume(&self) -> f64 {
        self.roots.volume()
    }

    pub fn min_root_radius(&self) -> f64 {
        self.roots
            .iter()
            .map(|c| c.radius)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_point(&self, y: &[f64]) -> bool {
        y.len() == self.dim() && self.roots.contains_point(y)
    }

    pub fn bounds(&self) -> Rect {
        self.roots.bounding_rect().expect("domain is nonempty")
    }
}

impl FromStr for Domain {
    type Err = DomainError;

    /// Parses `"lo1,lo2,...:hi1,hi2,..."`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || DomainError::Syntax(s.to_string());
        let (lo, hi) = s.split_once(':').ok_or_else(syntax)?;
        let parse = |part: &str| -> Result<Vec<f64>, DomainError> {
            part.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| syntax()))
                .collect()
        };
        Self::from_bounds(&parse(lo)?, &parse(hi)?)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.bounds();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}:{}", join(&b.lo), join(&b.hi))
    }
}
