//! Per-tree primitives: LCA, path oracle, distance labels, interval
//! routing and the 2-hop emulator. All answers are exact tree distances.

mod labels;
mod lca;
mod path_oracle;
mod routing;
mod tree;
mod two_hop;

use thiserror::Error;

use crate::graph::VertexId;

pub use labels::{label_distance, TreeLabel, TreeLabeling};
pub use lca::LcaOracle;
pub use path_oracle::TreePathOracle;
pub use routing::{LightEdge, RoutingLabel, RoutingTable, Step, TreeHeader, TreeRouting};
pub use tree::{RootedTree, Tree, MAX_TREE_DISTANCE, NONE};
pub use two_hop::{TwoHopAnswer, TwoHopEmulator};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("vertex {0} is not in the tree")]
    UnknownVertex(VertexId),
    #[error("labels come from different trees ({left} vs {right})")]
    Mismatch { left: u64, right: u64 },
    #[error("tree distances overflow")]
    Overflow,
}
