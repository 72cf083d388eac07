//! Sample-complexity formulas and Minkowski-function tools for polytopic C-sets.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{check_dim, GeometryError};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("confidence delta must lie in (0, 1], got {0}")]
    InvalidDelta(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("resolution {tau}^{n} is not smaller than the domain volume {vol}")]
    ResolutionTooCoarse { tau: f64, n: usize, vol: f64 },
    #[error("polytope rows do not bound a compact set: {0}")]
    Unbounded(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn positive(name: &'static str, value: f64) -> Result<f64, BoundsError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(BoundsError::NonPositive { name, value })
    }
}

/// Lower bound on the number of max-norm balls of radius `epsilon` needed to cover
/// a set of volume `vol`: `(1/ε)^n · vol / 2^n`.
pub fn covering_lower_bound(vol: f64, n: usize, epsilon: f64) -> Result<f64, BoundsError> {
    positive("volume", vol)?;
    positive("epsilon", epsilon)?;
    if n == 0 {
        return Err(BoundsError::ZeroDimension);
    }
    Ok((1.0 / epsilon).powi(n as i32) * vol / 2f64.powi(n as i32))
}

/// Grid size `(1/τ)^n · vol` sufficient for a deterministic run at resolution `tau`.
pub fn deterministic_sample_bound(vol: f64, n: usize, tau: f64) -> Result<f64, BoundsError> {
    positive("volume", vol)?;
    positive("tau", tau)?;
    if n == 0 {
        return Err(BoundsError::ZeroDimension);
    }
    Ok((1.0 / tau).powi(n as i32) * vol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQuery {
    pub delta: f64,
    pub vol: f64,
    pub n: usize,
    pub tau: f64,
}

impl BoundQuery {
    pub fn new(delta: f64, vol: f64, n: usize, tau: f64) -> Result<Self, BoundsError> {
        let q = Self { delta, vol, n, tau };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(BoundsError::InvalidDelta(self.delta));
        }
        positive("volume", self.vol)?;
        positive("tau", self.tau)?;
        if self.n == 0 {
            return Err(BoundsError::ZeroDimension);
        }
        if self.mass() >= 1.0 {
            return Err(BoundsError::ResolutionTooCoarse {
                tau: self.tau,
                n: self.n,
                vol: self.vol,
            });
        }
        Ok(())
    }

    /// Probability that one uniform draw lands in a fixed cube of side `tau`.
    fn mass(&self) -> f64 {
        self.tau.powi(self.n as i32) / self.vol
    }

    fn numerator(&self, resolution_term: f64) -> f64 {
        (1.0 / self.delta).ln() + self.vol.ln() + resolution_term
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    /// `[log(1/δ) + log vol + n·log ε] / log(1 − ε^n/vol)`, as typeset for the ε-net
    /// sampling bound.
    EpsilonNetVerbatim,
    /// `[log(1/δ) + log vol + n·log(1/τ)] / log(1 − τ^n/vol)`, as typeset. The
    /// numerator is positive and the denominator negative, so this is negative.
    SampleCountVerbatim,
    /// `⌈[log(1/δ) + log vol + n·log(1/τ)] / (−log(1 − τ^n/vol))⌉`, the union-bound
    /// sample count.
    Canonical,
}

impl BoundForm {
    pub const ALL: [BoundForm; 3] = [
        BoundForm::EpsilonNetVerbatim,
        BoundForm::SampleCountVerbatim,
        BoundForm::Canonical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundForm::EpsilonNetVerbatim => "epsilon_net_verbatim",
            BoundForm::SampleCountVerbatim => "sample_count_verbatim",
            BoundForm::Canonical => "canonical",
        }
    }
}

/// Canonical form without the final ceiling.
pub fn canonical_bound_raw(q: &BoundQuery) -> Result<f64, BoundsError> {
    q.validate()?;
    let n = q.n as f64;
    Ok(q.numerator(n * (1.0 / q.tau).ln()) / -(-q.mass()).ln_1p())
}

pub fn uniform_sample_bound(q: &BoundQuery, form: BoundForm) -> Result<f64, BoundsError> {
    q.validate()?;
    let n = q.n as f64;
    let log1m = (-q.mass()).ln_1p();
    Ok(match form {
        BoundForm::EpsilonNetVerbatim => q.numerator(n * q.tau.ln()) / log1m,
        BoundForm::SampleCountVerbatim => q.numerator(n * (1.0 / q.tau).ln()) / log1m,
        BoundForm::Canonical => canonical_bound_raw(q)?.ceil(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub query: BoundQuery,
    pub covering: f64,
    pub deterministic: f64,
    pub epsilon_net_verbatim: f64,
    pub sample_count_verbatim: f64,
    pub canonical: f64,
    pub warnings: Vec<String>,
}

/// Evaluates every form for one query and flags verbatim values that are not
/// positive.
pub fn bounds_report(q: &BoundQuery) -> Result<BoundsReport, BoundsError> {
    q.validate()?;
    let eps_net = uniform_sample_bound(q, BoundForm::EpsilonNetVerbatim)?;
    let sample_count = uniform_sample_bound(q, BoundForm::SampleCountVerbatim)?;
    let canonical = uniform_sample_bound(q, BoundForm::Canonical)?;
    let mut warnings = Vec::new();
    for (form, v) in [
        (BoundForm::EpsilonNetVerbatim, eps_net),
        (BoundForm::SampleCountVerbatim, sample_count),
    ] {
        if v.is_nan() || v <= 0.0 {
            warnings.push(format!(
                "{} evaluates to {v}, which is not a valid sample count; the canonical value is {canonical}",
                form.name()
            ));
        }
    }
    for w in &warnings {
        log::warn!("event=bound_sign_anomaly detail={w:?}");
    }
    Ok(BoundsReport {
        query: *q,
        covering: covering_lower_bound(q.vol, q.n, q.tau)?,
        deterministic: deterministic_sample_bound(q.vol, q.n, q.tau)?,
        epsilon_net_verbatim: eps_net,
        sample_count_verbatim: sample_count,
        canonical,
        warnings,
    })
}

/// Compact polytope `{x : h_i·x ≤ 1}` containing the origin in its interior.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeCSet {
    rows: Vec<Vec<f64>>,
}

impl PolytopeCSet {
    /// Checks that the rows positively span the space, i.e. that the polytope is
    /// bounded.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, BoundsError> {
        let n = rows
            .first()
            .map(Vec::len)
            .ok_or(BoundsError::ZeroDimension)?;
        if n == 0 {
            return Err(BoundsError::ZeroDimension);
        }
        for r in &rows {
            check_dim(n, r.len())?;
            if r.iter().any(|v| !v.is_finite()) {
                return Err(BoundsError::Unbounded("non-finite coefficient".into()));
            }
        }
        if rank(&rows, n) < n {
            return Err(BoundsError::Unbounded("rows do not span the space".into()));
        }
        if let Some(d) = recession_direction(&rows, n) {
            return Err(BoundsError::Unbounded(format!("unbounded along {d:?}")));
        }
        Ok(Self { rows })
    }

    /// Unit ball of the max norm: rows `±e_i`.
    pub fn unit_max_ball(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut r = vec![0.0; n];
                r[i] = s;
                rows.push(r);
            }
        }
        Self { rows }
    }

    /// Unit ball of the 1-norm: one row per sign pattern.
    pub fn unit_l1_ball(n: usize) -> Self {
        let rows = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// The set scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v / c).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Minkowski function `max(0, max_i h_i·x)`.
    pub fn psi(&self, x: &[f64]) -> Result<f64, BoundsError> {
        check_dim(self.dim(), x.len())?;
        Ok(self.rows.iter().map(|h| dot(h, x)).fold(0.0, f64::max))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, BoundsError> {
        Ok(self.psi(x)? <= 1.0)
    }

    /// `max ψ(u)` over the unit max-norm ball, i.e. the largest row 1-norm.
    pub fn u_bar(&self) -> f64 {
        self.rows
            .iter()
            .map(|h| h.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Bound on ψ over the successor box of any max-norm ball of radius `r` inside the
    /// set, for a map that is `lambda`-contractive on it with Lipschitz bound `l`.
    pub fn successor_psi_bound(&self, lambda: f64, l: f64, r: f64) -> f64 {
        lambda + l * r * self.u_bar()
    }

    /// Largest ball radius whose successor bound stays at or below `rho`.
    pub fn max_radius_for(&self, lambda: f64, l: f64, rho: f64) -> f64 {
        (rho - lambda) / (l * self.u_bar())
    }

    /// Levels `rho` for which balls of radius `r` covering `rho·S` certify invariance,
    /// as `[λ + L·ū·r, 1 − r·ū]`, or `None` when that interval is empty.
    pub fn invariance_window(&self, lambda: f64, l: f64, r: f64) -> Option<(f64, f64)> {
        let u = self.u_bar();
        let lo = lambda + l * u * r;
        let hi = 1.0 - r * u;
        (lo <= hi).then_some((lo, hi))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const PIVOT_TOL: f64 = 1e-10;

/// Row echelon form in place; returns the pivot columns.
fn eliminate(m: &mut [Vec<f64>], n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m.len() {
            break;
        }
        let (best, val) = (row..m.len())
            .map(|i| (i, m[i][col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= PIVOT_TOL {
            continue;
        }
        m.swap(row, best);
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row {
                let f = r[col] / pivot_row[col];
                for (v, p) in r[col..n].iter_mut().zip(&pivot_row[col..n]) {
                    *v -= f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

fn rank(rows: &[Vec<f64>], n: usize) -> usize {
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(1.0);
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v / scale).collect())
        .collect();
    eliminate(&mut m, n).len()
}

/// One-dimensional null space of an `(n−1) × n` matrix of full row rank.
fn null_direction(sub: &[&Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = sub.iter().map(|r| r.to_vec()).collect();
    let pivots = eliminate(&mut m, n);
    if pivots.len() != n - 1 {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut d = vec![0.0; n];
    d[free] = 1.0;
    for (row, &p) in pivots.iter().enumerate() {
        d[p] = -m[row][free] / m[row][p];
    }
    let norm = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Some(d.into_iter().map(|v| v / norm).collect())
}

/// A nonzero `d` with `h_i·d ≤ 0` for every row, if one exists. With full-rank rows
/// the cone `{d : Hd ≤ 0}` is pointed, so it is nontrivial exactly when it has an
/// extreme ray, and every extreme ray is cut out by `n − 1` independent rows.
fn recession_direction(rows: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let feasible = |d: &[f64]| {
        rows.iter()
            .all(|h| dot(h, d) <= PIVOT_TOL * (1.0 + h.iter().map(|v| v.abs()).sum::<f64>()))
    };
    let mut subset: Vec<usize> = (0..n - 1).collect();
    loop {
        let candidate = if n == 1 {
            Some(vec![1.0])
        } else {
            null_direction(&subset.iter().map(|&i| &rows[i]).collect::<Vec<_>>(), n)
        };
        if let Some(d) = candidate {
            let neg: Vec<f64> = d.iter().map(|v| -v).collect();
            if feasible(&d) {
                return Some(d);
            }
            if feasible(&neg) {
                return Some(neg);
            }
        }
        if !next_combination(&mut subset, rows.len()) {
            return None;
        }
    }
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
