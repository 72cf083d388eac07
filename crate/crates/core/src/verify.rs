//! Independent checks of synthesized sets.
//!
//! [`check_fixpoint`] is the deterministic certificate: it reads only a result
//! document and re-derives every successor box. [`monte_carlo_invariance`] simulates
//! the true map and can only falsify. [`raster_coverage`] is a brute-force reference
//! for the exact coverage classifier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::SystemOracle;
use crate::document::{DocumentError, ResultDocument};
use crate::geometry::{
    coverage_witness, max_norm_dist, successor_box, BoxIndex, BoxList, CoverageClass, Cube,
    GeometryError, Rect, TOL,
};
use crate::tree::Label;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(
        "result was synthesized with L = {stored} but verification was asked for L = {requested}"
    )]
    LipschitzMismatch { stored: f64, requested: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the set is empty")]
    EmptySet,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Document(#[from] DocumentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactCoverage,
    Raster,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Leaf (or ball, or Monte Carlo sample) index.
    pub leaf_id: Option<usize>,
    pub reason: String,
    pub uncovered: Option<Rect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub method: Method,
    pub passed: bool,
    pub checked_leaves: usize,
    pub first_failure: Option<Failure>,
}

impl Certificate {
    fn from_failures(
        method: Method,
        checked: usize,
        failures: impl IntoIterator<Item = Option<Failure>>,
    ) -> Self {
        let first_failure = failures.into_iter().flatten().next();
        Self {
            method,
            passed: first_failure.is_none(),
            checked_leaves: checked,
            first_failure,
        }
    }
}

fn lipschitz_matches(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Re-derives the invariance certificate from a result document.
///
/// For every included leaf of the stored tree the sample ball must contain the
/// target cube, and the successor box about `x⁺` with radius `L·r` must be covered
/// by the stored set. The stored set must also equal the union of included leaves.
pub fn check_fixpoint(doc: &ResultDocument, lipschitz: f64) -> Result<Certificate, VerifyError> {
    if !lipschitz_matches(doc.config.lipschitz, lipschitz) {
        return Err(VerifyError::LipschitzMismatch {
            stored: doc.config.lipschitz,
            requested: lipschitz,
        });
    }
    let tree = doc.tree()?;
    let active = tree.leaves_active();
    if tree.candidate_set() != doc.pi_set {
        return Ok(Certificate::from_failures(
            Method::ExactCoverage,
            0,
            [Some(Failure {
                leaf_id: None,
                reason: "stored set differs from the included leaves of the stored tree".into(),
                uncovered: None,
            })],
        ));
    }
    if doc.pi_set.is_empty() {
        return Ok(Certificate::from_failures(Method::ExactCoverage, 0, []));
    }
    let index = BoxIndex::new(&doc.pi_set);
    let failures = active
        .par_iter()
        .map(|&id| -> Result<Option<Failure>, VerifyError> {
            let node = &tree.nodes()[id];
            debug_assert_eq!(node.label, Label::Included);
            let reach = max_norm_dist(&node.target_center, &node.sample.x) + node.target_radius;
            if reach > node.sample_radius + TOL {
                return Ok(Some(Failure {
                    leaf_id: Some(id),
                    reason: format!(
                        "sample ball of radius {} does not contain the target cube (needs {reach})",
                        node.sample_radius
                    ),
                    uncovered: None,
                }));
            }
            let succ = successor_box(&node.sample.x_plus, node.sample_radius, lipschitz)?;
            let w = coverage_witness(&succ.to_rect(), &index)?;
            Ok((w.class != CoverageClass::FullyCovered).then(|| Failure {
                leaf_id: Some(id),
                reason: format!("successor box is {:?}", w.class),
                uncovered: w.uncovered,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Certificate::from_failures(
        Method::ExactCoverage,
        active.len(),
        failures,
    ))
}

/// Checks `∪ B⁺ ⊆ ∪ B` for balls `B_r(x)` with known successors `x⁺`, the plain
/// union-of-balls certificate behind [`check_fixpoint`].
pub fn check_ball_cover(
    balls: &[Cube],
    successors: &[Vec<f64>],
    lipschitz: f64,
) -> Result<Certificate, VerifyError> {
    if balls.len() != successors.len() {
        return Err(VerifyError::InvalidParameter(format!(
            "{} balls but {} successors",
            balls.len(),
            successors.len()
        )));
    }
    let union = BoxList::new(balls.to_vec());
    let index = BoxIndex::new(&union);
    let mut failures = Vec::with_capacity(balls.len());
    for (i, (b, xp)) in balls.iter().zip(successors).enumerate() {
        let w = coverage_witness(&successor_box(xp, b.radius, lipschitz)?.to_rect(), &index)?;
        failures.push((w.class != CoverageClass::FullyCovered).then(|| Failure {
            leaf_id: Some(i),
            reason: format!("successor box is {:?}", w.class),
            uncovered: w.uncovered,
        }));
    }
    Ok(Certificate::from_failures(
        Method::ExactCoverage,
        balls.len(),
        failures,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RasterCoverage {
    pub covered_fraction: f64,
    pub verdict: CoverageClass,
}

/// Fraction of a regular grid of cell centers inside `query` that lies in `union`.
///
/// The pitch is the largest value not above `cell` that divides the side evenly.
pub fn raster_coverage(
    query: &Cube,
    union: &BoxList,
    cell: f64,
) -> Result<RasterCoverage, VerifyError> {
    if !(cell > 0.0 && cell <= query.radius) {
        return Err(VerifyError::InvalidParameter(format!(
            "cell {cell} must be positive and at most the query radius {}",
            query.radius
        )));
    }
    let n = query.dim();
    let per_dim = (2.0 * query.radius / cell).ceil() as usize;
    let total = per_dim
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 28)
        .ok_or_else(|| {
            VerifyError::InvalidParameter(format!("raster with {per_dim}^{n} cells is too large"))
        })?;
    let pitch = 2.0 * query.radius / per_dim as f64;
    let index = BoxIndex::new(union);
    let covered = (0..total)
        .into_par_iter()
        .filter(|&k| {
            let mut rest = k;
            let p: Vec<f64> = query
                .center
                .iter()
                .map(|c| {
                    let i = rest % per_dim;
                    rest /= per_dim;
                    c - query.radius + (i as f64 + 0.5) * pitch
                })
                .collect();
            index.contains_point(&p)
        })
        .count();
    let covered_fraction = covered as f64 / total as f64;
    let verdict = match covered {
        0 => CoverageClass::Disjoint,
        c if c == total => CoverageClass::FullyCovered,
        _ => CoverageClass::Partial,
    };
    Ok(RasterCoverage {
        covered_fraction,
        verdict,
    })
}

/// Draws `samples` uniform points from `pi_set`, iterates the true map `horizon`
/// steps and fails on the first trajectory that leaves the set. This can refute
/// invariance but never prove it.
pub fn monte_carlo_invariance(
    pi_set: &BoxList,
    oracle: &SystemOracle,
    samples: usize,
    horizon: usize,
    seed: u64,
) -> Result<Certificate, VerifyError> {
    let bounds = pi_set.bounding_rect().ok_or(VerifyError::EmptySet)?;
    if oracle.dim() != bounds.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: bounds.dim(),
            found: oracle.dim(),
        }
        .into());
    }
    let index = BoxIndex::new(pi_set);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = samples.saturating_mul(100_000).max(1_000_000);
    let mut starts = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    while starts.len() < samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(VerifyError::InvalidParameter(
                "rejection sampling failed: the set fills too little of its bounding box".into(),
            ));
        }
        let p: Vec<f64> = bounds
            .lo
            .iter()
            .zip(&bounds.hi)
            .map(|(l, h)| l + (h - l) * rng.random::<f64>())
            .collect();
        if index.contains_point(&p) {
            starts.push(p);
        }
    }
    let failures: Vec<Option<Failure>> = starts
        .par_iter()
        .enumerate()
        .map(|(j, x0)| {
            let mut x = x0.clone();
            for k in 1..=horizon {
                x = oracle.eval(&x);
                if !index.contains_point(&x) {
                    return Some(Failure {
                        leaf_id: Some(j),
                        reason: format!("trajectory from {x0:?} left the set at step {k} at {x:?}"),
                        uncovered: None,
                    });
                }
            }
            None
        })
        .collect();
    Ok(Certificate::from_failures(
        Method::MonteCarlo,
        samples,
        failures,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::gen_dyadic_grid;
    use crate::document::RunManifest;
    use crate::synthesis::{synthesize, LeafCounts, SynthConfig, Termination};
    use crate::tree::{NodeRecord, PartitionTree};

    fn cube(c: &[f64], r: f64) -> Cube {
        Cube::new(c.to_vec(), r).unwrap()
    }

    fn linear_doc(tau: f64) -> ResultDocument {
        let sys = SystemOracle::linear2d();
        let d = gen_dyadic_grid(&sys, &sys.domain, tau).unwrap();
        let cfg = SynthConfig::new(sys.lipschitz, tau);
        let r = synthesize(PartitionTree::new(&sys.domain, &d).unwrap(), &d, &cfg).unwrap();
        ResultDocument::new(&r, &cfg, RunManifest::default())
    }

    fn hand_built(center: &[f64], r: f64, x_plus: Vec<f64>, lipschitz: f64) -> ResultDocument {
        let rec = NodeRecord {
            parent: None,
            target_radius: r,
            target_center: center.to_vec(),
            sample_radius: r,
            sample_index: 0,
            x: center.to_vec(),
            x_plus,
            label: Label::Included,
        };
        ResultDocument {
            manifest: RunManifest::default(),
            config: SynthConfig::new(lipschitz, r),
            tree: crate::document::TreeTable {
                dim: center.len(),
                nodes: vec![rec],
            },
            pi_set: BoxList::new(vec![cube(center, r)]),
            volume: (2.0 * r).powi(center.len() as i32),
            sweeps: 0,
            terminated_by: Termination::Fixpoint,
            leaf_counts: LeafCounts {
                included: 1,
                excluded: 0,
                unknown: 0,
            },
            certificate: None,
        }
    }

    #[test]
    fn fixpoint_result_passes() {
        let doc = linear_doc(0.01);
        let c = check_fixpoint(&doc, doc.config.lipschitz).unwrap();
        assert!(c.passed, "{c:?}");
        assert_eq!(c.checked_leaves, doc.leaf_counts.included);
    }

    #[test]
    fn escaping_hand_built_set_fails() {
        let sys = SystemOracle::linear2d();
        let xp = sys.eval(&[0.9, 0.9]);
        assert!((xp[0] - 0.55917).abs() < 1e-12 && (xp[1] + 0.29295).abs() < 1e-12);
        let doc = hand_built(&[0.9, 0.9], 0.05, xp, sys.lipschitz);
        let c = check_fixpoint(&doc, sys.lipschitz).unwrap();
        assert!(!c.passed);
        let f = c.first_failure.unwrap();
        assert_eq!(f.leaf_id, Some(0));
        assert!(f.reason.contains("Disjoint"));
        let mc = monte_carlo_invariance(&doc.pi_set, &sys, 1000, 5, 1).unwrap();
        assert!(!mc.passed);
    }

    #[test]
    fn empty_set_passes() {
        let mut doc = hand_built(&[0.0, 0.0], 0.1, vec![5.0, 5.0], 1.0);
        doc.tree.nodes[0].label = Label::Excluded;
        doc.pi_set = BoxList::default();
        let c = check_fixpoint(&doc, 1.0).unwrap();
        assert!(c.passed);
        assert_eq!(c.checked_leaves, 0);
    }

    #[test]
    fn lipschitz_mismatch_is_an_error() {
        let doc = linear_doc(0.05);
        assert!(matches!(
            check_fixpoint(&doc, 0.9),
            Err(VerifyError::LipschitzMismatch { .. })
        ));
    }

    #[test]
    fn shrunken_radius_is_caught() {
        let mut doc = linear_doc(0.01);
        let id = doc
            .tree
            .nodes
            .iter()
            .enumerate()
            .rev()
            .find(|(i, n)| {
                n.label == Label::Included && !doc.tree.nodes.iter().any(|m| m.parent == Some(*i))
            })
            .map(|(i, _)| i)
            .unwrap();
        doc.tree.nodes[id].sample_radius *= 0.5;
        let c = check_fixpoint(&doc, doc.config.lipschitz).unwrap();
        assert!(!c.passed);
        assert_eq!(c.first_failure.unwrap().leaf_id, Some(id));
    }

    #[test]
    fn tampered_pi_set_is_caught() {
        let mut doc = linear_doc(0.05);
        doc.pi_set.boxes.push(cube(&[5.0, 5.0], 1.0));
        assert!(!check_fixpoint(&doc, doc.config.lipschitz).unwrap().passed);
    }

    #[test]
    fn raster_examples() {
        let outer = BoxList::new(vec![cube(&[0.0, 0.0], 0.5)]);
        let r = raster_coverage(&cube(&[0.0, 0.0], 0.1), &outer, 0.01).unwrap();
        assert_eq!(
            (r.covered_fraction, r.verdict),
            (1.0, CoverageClass::FullyCovered)
        );
        let r = raster_coverage(&cube(&[10.0, 10.0], 0.1), &outer, 0.01).unwrap();
        assert_eq!(
            (r.covered_fraction, r.verdict),
            (0.0, CoverageClass::Disjoint)
        );
        let half = BoxList::new(vec![cube(&[0.5, 0.5], 0.5)]);
        let r = raster_coverage(&cube(&[0.0, 0.0], 0.5), &half, 0.01).unwrap();
        assert_eq!(r.verdict, CoverageClass::Partial);
        assert!((r.covered_fraction - 0.25).abs() <= 2.0 * 0.01 / 1.0);
        assert!(raster_coverage(&cube(&[0.0, 0.0], 0.1), &outer, 0.2).is_err());
        assert!(raster_coverage(&cube(&[0.0, 0.0], 0.1), &outer, 0.0).is_err());
    }

    #[test]
    fn monte_carlo_cases() {
        let sys = SystemOracle::linear2d();
        let doc = linear_doc(0.01);
        assert!(
            monte_carlo_invariance(&doc.pi_set, &sys, 10_000, 50, 3)
                .unwrap()
                .passed
        );
        let bad = BoxList::new(vec![cube(&[0.9, 0.9], 0.05)]);
        assert!(monte_carlo_invariance(&bad, &sys, 10, 0, 3).unwrap().passed);
        assert!(matches!(
            monte_carlo_invariance(&BoxList::default(), &sys, 10, 5, 3),
            Err(VerifyError::EmptySet)
        ));
    }

    #[test]
    fn ball_cover_under_contraction() {
        let balls = vec![cube(&[-0.5, 0.0], 0.5), cube(&[0.5, 0.0], 0.5)];
        let succ: Vec<Vec<f64>> = balls
            .iter()
            .map(|b| b.center.iter().map(|v| 0.5 * v).collect())
            .collect();
        assert!(check_ball_cover(&balls, &succ, 0.5).unwrap().passed);
        assert!(!check_ball_cover(&balls, &succ, 5.0).unwrap().passed);
        assert!(check_ball_cover(&balls, &succ[..1], 0.5).is_err());
    }
}
