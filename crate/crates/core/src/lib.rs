//! Data-driven synthesis of positive invariant sets.
//!
//! Given state/successor pairs of an unknown discrete-time map and a Lipschitz bound
//! on it, a partition tree over a box domain is refined until the union of its
//! included cubes provably maps into itself.
//!
//! ```
//! use pisynth::dataset::{gen_dyadic_grid, SystemOracle};
//! use pisynth::synthesis::{synthesize, SynthConfig};
//! use pisynth::tree::PartitionTree;
//!
//! let sys = SystemOracle::linear2d();
//! let data = gen_dyadic_grid(&sys, &sys.domain, 0.01).unwrap();
//! let tree = PartitionTree::new(&sys.domain, &data).unwrap();
//! let result = synthesize(tree, &data, &SynthConfig::new(sys.lipschitz, 0.01)).unwrap();
//! assert!(result.volume > 0.0);
//! ```

pub mod bounds;
pub mod cli;
pub mod dataset;
pub mod document;
pub mod domain;
pub mod geometry;
pub mod report;
pub mod svg;
pub mod synthesis;
pub mod tree;
pub mod verify;
