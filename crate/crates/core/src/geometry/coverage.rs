use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{check_dim, BoxList, Cube, GeometryError, Rect};

/// Three-way relation between a query box and a union of cover boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageClass {
    /// `query \ union = ∅`.
    FullyCovered,
    /// `query ∩ union = ∅`.
    Disjoint,
    Partial,
}

/// A union of closed boxes that can enumerate the members near a probe rectangle.
///
/// Implementations may report boxes that do not actually touch the probe; callers
/// filter. Returning `ControlFlow::Break` from the visitor stops the enumeration.
pub trait CoverageSource {
    fn dim(&self) -> usize;

    fn visit_overlapping(&self, probe: &Rect, visit: &mut dyn FnMut(&Rect) -> ControlFlow<()>);
}

impl CoverageSource for [Cube] {
    fn dim(&self) -> usize {
        self.first().map_or(0, Cube::dim)
    }

    fn visit_overlapping(&self, probe: &Rect, visit: &mut dyn FnMut(&Rect) -> ControlFlow<()>) {
        for b in self {
            let r = b.to_rect();
            if r.intersects(probe) && visit(&r).is_break() {
                return;
            }
        }
    }
}

impl CoverageSource for BoxList {
    fn dim(&self) -> usize {
        self.boxes.as_slice().dim()
    }

    fn visit_overlapping(&self, probe: &Rect, visit: &mut dyn FnMut(&Rect) -> ControlFlow<()>) {
        self.boxes.as_slice().visit_overlapping(probe, visit)
    }
}

/// Classification together with one uncovered fragment when the verdict is not
/// [`CoverageClass::FullyCovered`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageWitness {
    pub class: CoverageClass,
    pub uncovered: Option<Rect>,
}

/// Exact coverage classification of `query` against `union`.
pub fn classify_coverage<S: CoverageSource + ?Sized>(
    query: &Cube,
    union: &S,
) -> Result<CoverageClass, GeometryError> {
    coverage_witness(&query.to_rect(), union).map(|w| w.class)
}

/// Like [`classify_coverage`] for a general rectangle, also returning an uncovered
/// fragment on failure.
///
/// Fragments are kept on a work list; each is cut by one cover box that overlaps it
/// substantively until either every fragment is consumed or one fragment meets no
/// such box.
pub fn coverage_witness<S: CoverageSource + ?Sized>(
    query: &Rect,
    union: &S,
) -> Result<CoverageWitness, GeometryError> {
    let dim = union.dim();
    if dim != 0 {
        check_dim(dim, query.dim())?;
    }

    let mut touched = false;
    union.visit_overlapping(query, &mut |r| {
        if r.intersects(query) {
            touched = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if !touched {
        return Ok(CoverageWitness {
            class: CoverageClass::Disjoint,
            uncovered: Some(query.clone()),
        });
    }

    let mut work = vec![query.clone()];
    while let Some(frag) = work.pop() {
        let mut cutter = None;
        union.visit_overlapping(&frag, &mut |r| {
            if frag.overlaps_substantively(r) {
                cutter = Some(r.clone());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        match cutter {
            Some(c) => work.extend(frag.subtract_unchecked(&c)),
            None => {
                return Ok(CoverageWitness {
                    class: CoverageClass::Partial,
                    uncovered: Some(frag),
                })
            }
        }
    }
    Ok(CoverageWitness {
        class: CoverageClass::FullyCovered,
        uncovered: None,
    })
}
