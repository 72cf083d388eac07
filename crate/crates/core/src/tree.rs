//! Dyadic partition tree over the state constraint set.
//!
//! Every node owns a target cube `B_r̂(x̂)` of the partition and the dataset sample
//! nearest to its target center. The sample ball `B_r(x)` with
//! `r = r̂ + ‖x̂ − x‖∞` contains the target cube, so the successor box built from
//! `(x⁺, r)` over-approximates the image of the whole partition cell.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, DatasetError, SamplePair};
use crate::domain::Domain;
use crate::geometry::{BoxList, CoverageSource, Cube, Rect};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("node {0} does not exist")]
    NoSuchNode(usize),
    #[error("node {0} is not a leaf")]
    NotALeaf(usize),
    #[error("node {node}: label {from:?} cannot change to {to:?}")]
    IllegalTransition { node: usize, from: Label, to: Label },
    #[error("domain dimension {domain} does not match dataset dimension {data}")]
    DimensionMismatch { domain: usize, data: usize },
    #[error("malformed node table: {0}")]
    Malformed(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Membership of a leaf's target cube in the candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Included,
    /// The successor box left the candidate set entirely.
    Excluded,
    /// Resolution limit reached while the successor box was only partly covered.
    Unknown,
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Included => 1,
            Label::Excluded => 0,
            Label::Unknown => -1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Label::Included),
            0 => Ok(Label::Excluded),
            -1 => Ok(Label::Unknown),
            other => Err(format!("invalid label {other}")),
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub parent: Option<NodeId>,
    pub target_radius: f64,
    pub target_center: Vec<f64>,
    pub sample_radius: f64,
    pub sample_index: usize,
    pub sample: SamplePair,
    pub label: Label,
    pub children: Vec<NodeId>,
    active_leaves: usize,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_active(&self) -> bool {
        self.is_leaf() && self.label == Label::Included
    }

    pub fn target_box(&self) -> Cube {
        Cube {
            center: self.target_center.clone(),
            radius: self.target_radius,
        }
    }

    /// `B_r(x)` about the chosen sample.
    pub fn sample_box(&self) -> Cube {
        Cube {
            center: self.sample.x.clone(),
            radius: self.sample_radius,
        }
    }
}

/// A recorded relabeling of a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelTransition {
    pub sweep: usize,
    pub node: NodeId,
    pub from: Label,
    pub to: Label,
}

#[derive(Debug, Clone)]
pub struct PartitionTree {
    dim: usize,
    nodes: Vec<TreeNode>,
    roots: Vec<NodeId>,
    transitions: Vec<LabelTransition>,
    sweep: usize,
}

fn make_node(
    parent: Option<NodeId>,
    target: Cube,
    data: &Dataset,
) -> Result<TreeNode, DatasetError> {
    let nn = data.nearest(&target.center)?;
    Ok(TreeNode {
        parent,
        sample_radius: target.radius + nn.distance,
        target_radius: target.radius,
        target_center: target.center,
        sample_index: nn.index,
        sample: data.pair(nn.index),
        label: Label::Included,
        children: Vec::new(),
        active_leaves: 1,
    })
}

impl PartitionTree {
    /// One included root per domain cube, each paired with its nearest sample.
    pub fn new(domain: &Domain, data: &Dataset) -> Result<Self, TreeError> {
        if data.is_empty() {
            return Err(DatasetError::Empty.into());
        }
        if domain.dim() != data.dim() {
            return Err(TreeError::DimensionMismatch {
                domain: domain.dim(),
                data: data.dim(),
            });
        }
        let nodes = domain
            .roots()
            .iter()
            .map(|c| make_node(None, c.clone(), data))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            dim: domain.dim(),
            roots: (0..nodes.len()).collect(),
            nodes,
            transitions: Vec::new(),
            sweep: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn node(&self, id: NodeId) -> Result<&TreeNode, TreeError> {
        self.nodes.get(id).ok_or(TreeError::NoSuchNode(id))
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn transitions(&self) -> &[LabelTransition] {
        &self.transitions
    }

    /// Sweep index stamped on subsequent label transitions.
    pub fn set_sweep(&mut self, sweep: usize) {
        self.sweep = sweep;
    }

    fn bump_active(&mut self, mut id: NodeId, delta: isize) {
        loop {
            let n = &mut self.nodes[id];
            n.active_leaves = n
                .active_leaves
                .checked_add_signed(delta)
                .expect("active count underflow");
            match n.parent {
                Some(p) => id = p,
                None => break,
            }
        }
    }

    /// Splits leaf `id` into `2^n` half-radius children, each labeled included and
    /// paired with the sample nearest to its target center. Returns the child ids.
    pub fn divide_node(&mut self, id: NodeId, data: &Dataset) -> Result<Vec<NodeId>, TreeError> {
        let node = self.node(id)?;
        if !node.is_leaf() {
            return Err(TreeError::NotALeaf(id));
        }
        let was_active = node.label == Label::Included;
        let kids = node
            .target_box()
            .split()
            .into_iter()
            .map(|c| make_node(Some(id), c, data))
            .collect::<Result<Vec<_>, _>>()?;
        let first = self.nodes.len();
        let count = kids.len();
        self.nodes.extend(kids);
        let ids: Vec<NodeId> = (first..first + count).collect();
        self.nodes[id].children = ids.clone();
        // The parent stops being an active leaf and its children become active leaves.
        let delta = count as isize - isize::from(was_active);
        self.nodes[id].active_leaves = count;
        if let Some(p) = self.nodes[id].parent {
            self.bump_active(p, delta);
        }
        Ok(ids)
    }

    /// Relabels a leaf. Only `Included → Excluded | Unknown` changes are allowed;
    /// re-asserting the current label is a no-op.
    pub fn set_label(&mut self, id: NodeId, label: Label) -> Result<(), TreeError> {
        let node = self.node(id)?;
        if !node.is_leaf() {
            return Err(TreeError::NotALeaf(id));
        }
        let from = node.label;
        if from == label {
            return Ok(());
        }
        if from != Label::Included {
            return Err(TreeError::IllegalTransition {
                node: id,
                from,
                to: label,
            });
        }
        self.nodes[id].label = label;
        self.bump_active(id, -1);
        self.transitions.push(LabelTransition {
            sweep: self.sweep,
            node: id,
            from,
            to: label,
        });
        Ok(())
    }

    /// Leaves labeled included, in depth-first creation order.
    pub fn leaves_active(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.walk(|id, n| {
            if n.is_active() {
                out.push(id);
            }
        });
        out
    }

    /// All leaves in depth-first creation order.
    pub fn leaves(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.walk(|id, n| {
            if n.is_leaf() {
                out.push(id);
            }
        });
        out
    }

    fn walk(&self, mut f: impl FnMut(NodeId, &TreeNode)) {
        let mut stack: Vec<NodeId> = self.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            f(id, n);
            stack.extend(n.children.iter().rev());
        }
    }

    pub fn active_leaf_count(&self) -> usize {
        self.roots
            .iter()
            .map(|&r| self.nodes[r].active_leaves)
            .sum()
    }

    /// Target cubes of the active leaves: the candidate invariant set.
    pub fn candidate_set(&self) -> BoxList {
        self.leaves_active()
            .into_iter()
            .map(|id| self.nodes[id].target_box())
            .collect()
    }

    /// Volume of the candidate set.
    pub fn candidate_volume(&self) -> f64 {
        self.leaves_active()
            .into_iter()
            .fold(0.0, |acc, id| acc + self.nodes[id].target_box().volume())
    }

    /// Rebuilds a tree from a flat node table (parents must precede children).
    pub fn from_nodes(dim: usize, table: Vec<NodeRecord>) -> Result<Self, TreeError> {
        let mut nodes: Vec<TreeNode> = Vec::with_capacity(table.len());
        let mut roots = Vec::new();
        for (id, rec) in table.into_iter().enumerate() {
            if rec.target_center.len() != dim || rec.x.len() != dim || rec.x_plus.len() != dim {
                return Err(TreeError::Malformed(format!(
                    "node {id} has the wrong dimension"
                )));
            }
            match rec.parent {
                Some(p) if p >= id => {
                    return Err(TreeError::Malformed(format!(
                        "node {id} appears before its parent {p}"
                    )))
                }
                Some(p) => nodes[p].children.push(id),
                None => roots.push(id),
            }
            nodes.push(TreeNode {
                parent: rec.parent,
                target_radius: rec.target_radius,
                target_center: rec.target_center,
                sample_radius: rec.sample_radius,
                sample_index: rec.sample_index,
                sample: SamplePair::new(rec.x, rec.x_plus),
                label: rec.label,
                children: Vec::new(),
                active_leaves: 0,
            });
        }
        let fanout = 1usize << dim;
        if let Some(id) = nodes
            .iter()
            .position(|n| !n.children.is_empty() && n.children.len() != fanout)
        {
            return Err(TreeError::Malformed(format!(
                "node {id} has a partial set of children"
            )));
        }
        for id in (0..nodes.len()).rev() {
            let count = if nodes[id].is_leaf() {
                usize::from(nodes[id].label == Label::Included)
            } else {
                nodes[id]
                    .children
                    .iter()
                    .map(|&c| nodes[c].active_leaves)
                    .sum()
            };
            nodes[id].active_leaves = count;
        }
        Ok(Self {
            dim,
            nodes,
            roots,
            transitions: Vec::new(),
            sweep: 0,
        })
    }

    /// Flat node table with parent indices.
    pub fn to_records(&self) -> Vec<NodeRecord> {
        self.nodes
            .iter()
            .map(|n| NodeRecord {
                parent: n.parent,
                target_radius: n.target_radius,
                target_center: n.target_center.clone(),
                sample_radius: n.sample_radius,
                sample_index: n.sample_index,
                x: n.sample.x.clone(),
                x_plus: n.sample.x_plus.clone(),
                label: n.label,
            })
            .collect()
    }
}

/// One row of the serialized node table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub parent: Option<NodeId>,
    pub target_radius: f64,
    pub target_center: Vec<f64>,
    pub sample_radius: f64,
    pub sample_index: usize,
    pub x: Vec<f64>,
    pub x_plus: Vec<f64>,
    pub label: Label,
}

/// The tree answers coverage probes with its active leaves, skipping subtrees that
/// hold none or whose target cube misses the probe.
impl CoverageSource for PartitionTree {
    fn dim(&self) -> usize {
        self.dim
    }

    fn visit_overlapping(&self, probe: &Rect, visit: &mut dyn FnMut(&Rect) -> ControlFlow<()>) {
        let mut stack: Vec<NodeId> = self.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            if n.active_leaves == 0 {
                continue;
            }
            let r = n.target_box().to_rect();
            if !r.intersects(probe) {
                continue;
            }
            if n.is_leaf() {
                if visit(&r).is_break() {
                    return;
                }
            } else {
                stack.extend(n.children.iter().rev());
            }
        }
    }
}
