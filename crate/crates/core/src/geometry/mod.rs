//! Axis-aligned box algebra in the max norm.
//!
//! A [`Cube`] is the closed max-norm ball `{y : ‖c − y‖∞ ≤ r}`. Intersections and
//! subtraction fragments are general hyperrectangles ([`Rect`]). All comparisons use
//! the absolute coordinate tolerance [`TOL`], and every set is closed: touching
//! boundaries count as intersection and as containment.

mod coverage;
mod index;

pub use coverage::{
    classify_coverage, coverage_witness, CoverageClass, CoverageSource, CoverageWitness,
};
pub use index::BoxIndex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance applied to coordinate comparisons.
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid radius {0}: must be finite and nonnegative")]
    InvalidRadius(f64),
    #[error("invalid Lipschitz bound {0}: must be positive")]
    InvalidLipschitz(f64),
    #[error("invalid bounds: lower corner exceeds upper corner in coordinate {0}")]
    InvertedBounds(usize),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), GeometryError> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, found })
    }
}

/// Max-norm distance between two points of equal dimension.
pub fn max_norm_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Closed max-norm ball: an axis-aligned hypercube given by center and half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `true` iff `max_i |center_i − y_i| ≤ radius`.
    pub fn contains_point(&self, y: &[f64]) -> Result<bool, GeometryError> {
        check_dim(self.dim(), y.len())?;
        Ok(self.contains_point_unchecked(y))
    }

    pub(crate) fn contains_point_unchecked(&self, y: &[f64]) -> bool {
        max_norm_dist(&self.center, y) <= self.radius + TOL
    }

    /// `(2r)^n`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.radius).powi(self.dim() as i32)
    }

    pub fn to_rect(&self) -> Rect {
        Rect {
            lo: self.center.iter().map(|c| c - self.radius).collect(),
            hi: self.center.iter().map(|c| c + self.radius).collect(),
        }
    }

    /// The `2^n` half-radius subcubes tiling `self`, centered at `c + (r/2)·v` for
    /// every sign vector `v ∈ {−1, 1}^n`. Bit `n−1−i` of the child index selects the
    /// sign of coordinate `i` (clear means negative).
    pub fn split(&self) -> Vec<Cube> {
        let n = self.dim();
        let half = self.radius / 2.0;
        (0..1usize << n)
            .map(|k| Cube {
                center: (0..n)
                    .map(|i| {
                        let sign = if (k >> (n - 1 - i)) & 1 == 1 {
                            1.0
                        } else {
                            -1.0
                        };
                        self.center[i] + half * sign
                    })
                    .collect(),
                radius: half,
            })
            .collect()
    }

    /// Coordinatewise intersection of two cubes, `None` when they are disjoint.
    pub fn intersect(&self, other: &Cube) -> Result<Option<Rect>, GeometryError> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.to_rect().intersect_unchecked(&other.to_rect()))
    }
}

/// Over-approximation of the one-step image of `B_r(x)`: the cube of radius `L·r`
/// about the observed successor `x⁺`.
pub fn successor_box(x_plus: &[f64], r: f64, lipschitz: f64) -> Result<Cube, GeometryError> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(GeometryError::InvalidLipschitz(lipschitz));
    }
    Cube::new(x_plus.to_vec(), lipschitz * r)
}

/// Closed axis-aligned hyperrectangle `[lo_1, hi_1] × … × [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        check_dim(lo.len(), hi.len())?;
        if let Some(i) = lo.iter().zip(&hi).position(|(l, h)| l > h) {
            return Err(GeometryError::InvertedBounds(i));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l).max(0.0))
            .product()
    }

    pub fn contains_point(&self, y: &[f64]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(y)
            .all(|((l, h), v)| *v >= l - TOL && *v <= h + TOL)
    }

    /// Closed intersection test: touching faces count.
    pub fn intersects(&self, other: &Rect) -> bool {
        (0..self.dim()).all(|i| self.lo[i].max(other.lo[i]) <= self.hi[i].min(other.hi[i]) + TOL)
    }

    /// `true` iff `other ⊆ self` up to tolerance.
    pub fn contains_rect(&self, other: &Rect) -> bool {
        (0..self.dim()).all(|i| other.lo[i] >= self.lo[i] - TOL && other.hi[i] <= self.hi[i] + TOL)
    }

    /// `true` when subtracting `cover` from `self` removes a nonnegligible part of
    /// `self`: positive overlap in every non-flat coordinate, and containment in
    /// every coordinate where `self` is flat.
    pub(crate) fn overlaps_substantively(&self, cover: &Rect) -> bool {
        (0..self.dim()).all(|i| {
            if self.hi[i] - self.lo[i] <= TOL {
                cover.lo[i] - TOL <= self.lo[i] && self.hi[i] <= cover.hi[i] + TOL
            } else {
                self.hi[i].min(cover.hi[i]) - self.lo[i].max(cover.lo[i]) > TOL
            }
        })
    }

    pub fn intersect(&self, other: &Rect) -> Result<Option<Rect>, GeometryError> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.intersect_unchecked(other))
    }

    pub(crate) fn intersect_unchecked(&self, other: &Rect) -> Option<Rect> {
        if !self.intersects(other) {
            return None;
        }
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&other.hi)
            .zip(&lo)
            .map(|((a, b), l)| a.min(*b).max(*l))
            .collect();
        Some(Rect { lo, hi })
    }

    /// `self \ cover` as at most `2n` interior-disjoint fragments, by sweeping the
    /// coordinates and peeling off the slabs below and above the cover.
    pub fn subtract(&self, cover: &Rect) -> Result<Vec<Rect>, GeometryError> {
        check_dim(self.dim(), cover.dim())?;
        Ok(self.subtract_unchecked(cover))
    }

    pub(crate) fn subtract_unchecked(&self, cover: &Rect) -> Vec<Rect> {
        if !self.intersects(cover) {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for d in 0..self.dim() {
            if rest.lo[d] < cover.lo[d] - TOL {
                let mut below = rest.clone();
                below.hi[d] = cover.lo[d].min(rest.hi[d]);
                rest.lo[d] = cover.lo[d];
                out.push(below);
            }
            if rest.hi[d] > cover.hi[d] + TOL {
                let mut above = rest.clone();
                above.lo[d] = cover.hi[d].max(rest.lo[d]);
                rest.hi[d] = cover.hi[d];
                out.push(above);
            }
        }
        out
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }
}

/// Ordered union of cubes. Empty represents the empty set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxList {
    pub boxes: Vec<Cube>,
}

impl BoxList {
    pub fn new(boxes: Vec<Cube>) -> Self {
        Self { boxes }
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cube> {
        self.boxes.iter()
    }

    /// Sum of member volumes; equals the union volume when interiors are disjoint.
    pub fn volume(&self) -> f64 {
        self.boxes.iter().fold(0.0, |acc, b| acc + b.volume())
    }

    pub fn contains_point(&self, y: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains_point_unchecked(y))
    }

    /// Smallest rectangle enclosing every member, `None` for the empty list.
    pub fn bounding_rect(&self) -> Option<Rect> {
        let first = self.boxes.first()?.to_rect();
        Some(self.boxes.iter().skip(1).fold(first, |mut acc, b| {
            let r = b.to_rect();
            for i in 0..acc.dim() {
                acc.lo[i] = acc.lo[i].min(r.lo[i]);
                acc.hi[i] = acc.hi[i].max(r.hi[i]);
            }
            acc
        }))
    }
}

impl FromIterator<Cube> for BoxList {
    fn from_iter<I: IntoIterator<Item = Cube>>(iter: I) -> Self {
        Self {
            boxes: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a BoxList {
    type Item = &'a Cube;
    type IntoIter = std::slice::Iter<'a, Cube>;
    fn into_iter(self) -> Self::IntoIter {
        self.boxes.iter()
    }
}
