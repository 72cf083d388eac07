//! Fixpoint refinement of the candidate set.
//!
//! Each sweep visits every active leaf, builds its successor box from the stored
//! sample and classifies it against the current candidate set:
//!
//! * fully covered: the leaf stays,
//! * disjoint: the leaf is excluded,
//! * partial: the leaf is divided when its children would still have target radius
//!   at least `tau`, otherwise it is marked unknown.
//!
//! Sweeps repeat until one makes no change. At that point every active leaf's
//! successor box lies in the union of active target cubes, which certifies the union
//! as positively invariant.

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::geometry::{
    classify_coverage, successor_box, BoxList, CoverageClass, CoverageSource, GeometryError,
};
use crate::tree::{Label, NodeId, PartitionTree, TreeError, TreeNode};

pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    /// Changes are visible to every later classification in the same sweep, and
    /// children created by a division are classified right after their parent.
    #[default]
    Sequential,
    /// All leaves are classified against the sweep-start candidate set; changes are
    /// applied together at the end of the sweep.
    Batch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub lipschitz: f64,
    pub tau: f64,
    pub max_sweeps: usize,
    #[serde(default)]
    pub update_mode: UpdateMode,
}

impl SynthConfig {
    pub fn new(lipschitz: f64, tau: f64) -> Self {
        Self {
            lipschitz,
            tau,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            update_mode: UpdateMode::Sequential,
        }
    }

    pub fn with_mode(mut self, mode: UpdateMode) -> Self {
        self.update_mode = mode;
        self
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn validate(&self, tree: &PartitionTree) -> Result<(), SynthError> {
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return Err(SynthError::InvalidConfig(format!(
                "Lipschitz bound must be positive, got {}",
                self.lipschitz
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SynthError::InvalidConfig(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.max_sweeps == 0 {
            return Err(SynthError::InvalidConfig(
                "max_sweeps must be at least 1".into(),
            ));
        }
        let smallest_root = tree
            .roots()
            .iter()
            .map(|&r| tree.nodes()[r].target_radius)
            .fold(f64::INFINITY, f64::min);
        if self.tau > smallest_root {
            return Err(SynthError::InvalidConfig(format!(
                "tau {} exceeds the smallest root radius {smallest_root}",
                self.tau
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Fixpoint,
    Safeguard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LeafCounts {
    pub included: usize,
    pub excluded: usize,
    pub unknown: usize,
}

impl LeafCounts {
    pub fn of(tree: &PartitionTree) -> Self {
        let mut c = Self::default();
        for id in tree.leaves() {
            match tree.nodes()[id].label {
                Label::Included => c.included += 1,
                Label::Excluded => c.excluded += 1,
                Label::Unknown => c.unknown += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepStats {
    pub changed: bool,
    pub divisions: usize,
    pub exclusions: usize,
    pub unknowns: usize,
}

#[derive(Debug, Clone)]
pub struct SynthResult {
    pub tree: PartitionTree,
    pub pi_set: BoxList,
    pub volume: f64,
    pub sweeps: usize,
    pub leaf_counts: LeafCounts,
    pub terminated_by: Termination,
}

/// Classifies the successor box of `leaf` against `candidate`.
pub fn classify_leaf<S: CoverageSource + ?Sized>(
    leaf: &TreeNode,
    candidate: &S,
    lipschitz: f64,
) -> Result<CoverageClass, GeometryError> {
    let succ = successor_box(&leaf.sample.x_plus, leaf.sample_radius, lipschitz)?;
    classify_coverage(&succ, candidate)
}

enum Action {
    Keep,
    Exclude,
    Divide,
    MarkUnknown,
}

fn action_for(class: CoverageClass, target_radius: f64, tau: f64) -> Action {
    match class {
        CoverageClass::FullyCovered => Action::Keep,
        CoverageClass::Disjoint => Action::Exclude,
        CoverageClass::Partial if target_radius / 2.0 >= tau => Action::Divide,
        CoverageClass::Partial => Action::MarkUnknown,
    }
}

fn apply(
    tree: &mut PartitionTree,
    id: NodeId,
    action: Action,
    data: &Dataset,
    stats: &mut SweepStats,
) -> Result<Vec<NodeId>, SynthError> {
    Ok(match action {
        Action::Keep => Vec::new(),
        Action::Exclude => {
            tree.set_label(id, Label::Excluded)?;
            stats.exclusions += 1;
            Vec::new()
        }
        Action::MarkUnknown => {
            tree.set_label(id, Label::Unknown)?;
            stats.unknowns += 1;
            Vec::new()
        }
        Action::Divide => {
            stats.divisions += 1;
            tree.divide_node(id, data)?
        }
    })
}

/// One pass over the active leaves.
pub fn sweep(
    tree: &mut PartitionTree,
    data: &Dataset,
    config: &SynthConfig,
) -> Result<SweepStats, SynthError> {
    let mut stats = SweepStats::default();
    match config.update_mode {
        UpdateMode::Sequential => {
            let mut stack: Vec<NodeId> = tree.roots().iter().rev().copied().collect();
            while let Some(id) = stack.pop() {
                let node = &tree.nodes()[id];
                if !node.is_leaf() {
                    stack.extend(node.children.iter().rev());
                    continue;
                }
                if node.label != Label::Included {
                    continue;
                }
                let class = classify_leaf(node, &*tree, config.lipschitz)?;
                let action = action_for(class, node.target_radius, config.tau);
                let kids = apply(tree, id, action, data, &mut stats)?;
                stack.extend(kids.into_iter().rev());
            }
        }
        UpdateMode::Batch => {
            let active = tree.leaves_active();
            let snapshot = &*tree;
            let classes = active
                .par_iter()
                .map(|&id| classify_leaf(&snapshot.nodes()[id], snapshot, config.lipschitz))
                .collect::<Result<Vec<_>, _>>()?;
            for (id, class) in active.into_iter().zip(classes) {
                let action = action_for(class, tree.nodes()[id].target_radius, config.tau);
                apply(tree, id, action, data, &mut stats)?;
            }
        }
    }
    stats.changed = stats.divisions + stats.exclusions + stats.unknowns > 0;
    Ok(stats)
}

/// Sweeps until a sweep changes nothing or `config.max_sweeps` is reached.
pub fn synthesize(
    mut tree: PartitionTree,
    data: &Dataset,
    config: &SynthConfig,
) -> Result<SynthResult, SynthError> {
    config.validate(&tree)?;
    let mut sweeps = 0;
    let mut terminated_by = Termination::Safeguard;
    while sweeps < config.max_sweeps {
        sweeps += 1;
        tree.set_sweep(sweeps);
        let stats = sweep(&mut tree, data, config)?;
        info!(
            "event=sweep sweep={} active={} volume={} divisions={} exclusions={} unknowns={}",
            sweeps,
            tree.active_leaf_count(),
            tree.candidate_volume(),
            stats.divisions,
            stats.exclusions,
            stats.unknowns
        );
        if !stats.changed {
            terminated_by = Termination::Fixpoint;
            break;
        }
    }
    if terminated_by == Termination::Safeguard {
        debug!("event=safeguard max_sweeps={}", config.max_sweeps);
    }
    let pi_set = tree.candidate_set();
    Ok(SynthResult {
        volume: pi_set.volume(),
        pi_set,
        sweeps,
        leaf_counts: LeafCounts::of(&tree),
        terminated_by,
        tree,
    })
}
