//! Self-describing JSON record of one synthesis run.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::BoxList;
use crate::synthesis::{LeafCounts, SynthConfig, SynthResult, Termination};
use crate::tree::{NodeRecord, PartitionTree, TreeError};
use crate::verify::Certificate;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed result file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Provenance of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: String,
    pub dataset_fingerprint: String,
    pub rows: usize,
    pub system: Option<String>,
    pub seed: Option<u64>,
    pub domain: String,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeTable {
    pub dim: usize,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub manifest: RunManifest,
    pub config: SynthConfig,
    pub tree: TreeTable,
    pub pi_set: BoxList,
    pub volume: f64,
    pub sweeps: usize,
    pub terminated_by: Termination,
    pub leaf_counts: LeafCounts,
    pub certificate: Option<Certificate>,
}

impl ResultDocument {
    pub fn new(result: &SynthResult, config: &SynthConfig, manifest: RunManifest) -> Self {
        Self {
            manifest,
            config: config.clone(),
            tree: TreeTable {
                dim: result.tree.dim(),
                nodes: result.tree.to_records(),
            },
            pi_set: result.pi_set.clone(),
            volume: result.volume,
            sweeps: result.sweeps,
            terminated_by: result.terminated_by,
            leaf_counts: result.leaf_counts,
            certificate: None,
        }
    }

    /// Rebuilds the partition tree from the node table.
    pub fn tree(&self) -> Result<PartitionTree, DocumentError> {
        Ok(PartitionTree::from_nodes(
            self.tree.dim,
            self.tree.nodes.clone(),
        )?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DocumentError> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DocumentError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_uniform, SystemOracle};
    use crate::synthesis::synthesize;

    #[test]
    fn json_round_trip_is_identity() {
        let sys = SystemOracle::linear2d();
        let d = gen_uniform(&sys, &sys.domain, 3000, 9).unwrap();
        let cfg = SynthConfig::new(sys.lipschitz, 0.01);
        let r = synthesize(PartitionTree::new(&sys.domain, &d).unwrap(), &d, &cfg).unwrap();
        let doc = ResultDocument::new(
            &r,
            &cfg,
            RunManifest {
                rows: d.len(),
                ..Default::default()
            },
        );
        let back = ResultDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.tree().unwrap().to_records(), r.tree.to_records());
        assert_eq!(back.tree().unwrap().candidate_set(), r.pi_set);
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(
            ResultDocument::from_json("{\"manifest\": 3"),
            Err(DocumentError::Parse(_))
        ));
    }
}
