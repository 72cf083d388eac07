//! Pre-collected state/successor pairs `D = {x_j, x_j⁺}` and their max-norm index.

mod generate;
mod io;
mod nn;
mod system;

pub use generate::{gen_dyadic_grid, gen_uniform};
pub use io::{load_dataset, read_dataset, write_dataset};
pub use system::{
    SystemMap, SystemOracle, LINEAR2D_LIPSCHITZ, LINEAR2D_MATRIX, NONLINEAR2D_LIPSCHITZ,
};

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::domain::Domain;
use crate::geometry::GeometryError;
use nn::GridIndex;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed row: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Dimension {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("dataset is empty")]
    Empty,
    #[error("unknown system {0:?}")]
    UnknownSystem(String),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One observed transition `x → x⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    pub x: Vec<f64>,
    pub x_plus: Vec<f64>,
}

impl SamplePair {
    pub fn new(x: Vec<f64>, x_plus: Vec<f64>) -> Self {
        Self { x, x_plus }
    }
}

/// Result of a nearest-neighbour query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Immutable sample set with an exact max-norm nearest-neighbour index over the
/// states. Row order is the dataset index order.
#[derive(Debug, Clone)]
pub struct Dataset {
    dim: usize,
    xs: Vec<f64>,
    xps: Vec<f64>,
    index: GridIndex,
    metadata: BTreeMap<String, String>,
}

impl Dataset {
    pub fn from_pairs(pairs: Vec<SamplePair>) -> Result<Self, DatasetError> {
        let dim = pairs.first().ok_or(DatasetError::Empty)?.x.len();
        if dim == 0 {
            return Err(DatasetError::Empty);
        }
        let mut xs = Vec::with_capacity(pairs.len() * dim);
        let mut xps = Vec::with_capacity(pairs.len() * dim);
        for (j, p) in pairs.iter().enumerate() {
            if p.x.len() != dim || p.x_plus.len() != dim {
                return Err(DatasetError::Dimension {
                    line: j as u64 + 1,
                    expected: 2 * dim,
                    found: p.x.len() + p.x_plus.len(),
                });
            }
            xs.extend_from_slice(&p.x);
            xps.extend_from_slice(&p.x_plus);
        }
        Ok(Self::from_flat(dim, xs, xps))
    }

    pub(crate) fn from_flat(dim: usize, xs: Vec<f64>, xps: Vec<f64>) -> Self {
        let index = GridIndex::build(dim, &xs);
        Self {
            dim,
            xs,
            xps,
            index,
            metadata: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self, j: usize) -> &[f64] {
        &self.xs[j * self.dim..(j + 1) * self.dim]
    }

    pub fn x_plus(&self, j: usize) -> &[f64] {
        &self.xps[j * self.dim..(j + 1) * self.dim]
    }

    pub fn pair(&self, j: usize) -> SamplePair {
        SamplePair::new(self.x(j).to_vec(), self.x_plus(j).to_vec())
    }

    pub fn pairs(&self) -> impl Iterator<Item = SamplePair> + '_ {
        (0..self.len()).map(|j| self.pair(j))
    }

    /// Free-form `key=value` metadata carried in CSV comment lines.
    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    /// Exact max-norm nearest state; ties resolve to the lowest index.
    pub fn nearest(&self, q: &[f64]) -> Result<Neighbor, DatasetError> {
        if q.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: q.len(),
            }
            .into());
        }
        let (index, distance) = self.index.nearest(&self.xs, q);
        Ok(Neighbor { index, distance })
    }

    /// Brute-force scan, kept as the reference for [`Dataset::nearest`].
    pub fn nearest_linear(&self, q: &[f64]) -> Result<Neighbor, DatasetError> {
        if q.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: q.len(),
            }
            .into());
        }
        let (index, distance) = nn::nearest_linear(self.dim, &self.xs, q);
        Ok(Neighbor { index, distance })
    }

    /// Drops pairs whose state lies outside `domain`; returns the kept dataset and the
    /// original indices of the dropped rows.
    pub fn retain_in_domain(&self, domain: &Domain) -> Result<(Dataset, Vec<usize>), DatasetError> {
        let mut rejected = Vec::new();
        let mut xs = Vec::new();
        let mut xps = Vec::new();
        for j in 0..self.len() {
            if domain.contains_point(self.x(j)) {
                xs.extend_from_slice(self.x(j));
                xps.extend_from_slice(self.x_plus(j));
            } else {
                rejected.push(j);
            }
        }
        if xs.is_empty() {
            return Err(DatasetError::Empty);
        }
        let mut kept = if rejected.is_empty() {
            self.clone()
        } else {
            Self::from_flat(self.dim, xs, xps)
        };
        kept.metadata = self.metadata.clone();
        Ok((kept, rejected))
    }

    /// SHA-256 over the dimension and the little-endian bytes of every coordinate.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        for v in self.xs.iter().chain(&self.xps) {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}
