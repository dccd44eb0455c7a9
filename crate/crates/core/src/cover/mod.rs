//! Tree covers: pairwise collections for a demand set, the separator
//! recursion, gluing into full covers, and exhaustive verification.

mod build;
mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, VertexId, Weight};
use crate::ramsey::{Hst, RamseyCall, RamseyError};
use crate::ratio::Ratio;
use crate::separator::{SeparatorError, SeparatorMethod};
use crate::treekit::{Tree, TreeError};

pub use build::{
    extend_forest_to_spanning_tree, pairwise_metric_collection, pairwise_spanning_collection,
    ramsey_cover_general, separator_recursion_cover, CoverConfig,
};
pub use report::{
    verify_cover, verify_cover_sampled, ContractionWitness, CoverReport, DEFAULT_SAMPLES,
    DEFAULT_VERIFY_CAP,
};

#[derive(Debug, Error)]
pub enum CoverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("this construction needs a connected graph")]
    Disconnected,
    #[error(
        "zero-weight edge ({u}, {v}): stretch is undefined between distinct vertices at distance 0"
    )]
    ZeroWeight { u: VertexId, v: VertexId },
    #[error("the demand set is empty")]
    EmptyDemand,
    #[error("exhaustive verification is capped at n = {cap}, got {n}")]
    CapExceeded { n: usize, cap: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverKind {
    /// Trees are subgraphs of the input.
    Spanning,
    /// Arbitrary weighted trees on graph vertices.
    Metric,
    /// HSTs with graph vertices as leaves.
    Hst,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CoverTree {
    Tree(Tree),
    Hst(Hst),
}

impl CoverTree {
    /// Participants in ascending order.
    pub fn vertices(&self) -> Vec<VertexId> {
        match self {
            CoverTree::Tree(t) => t.nodes().to_vec(),
            CoverTree::Hst(h) => h.points(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CoverTree::Tree(t) => t.len(),
            CoverTree::Hst(h) => h.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_tree(&self) -> Option<&Tree> {
        match self {
            CoverTree::Tree(t) => Some(t),
            CoverTree::Hst(_) => None,
        }
    }

    pub fn as_hst(&self) -> Option<&Hst> {
        match self {
            CoverTree::Hst(h) => Some(h),
            CoverTree::Tree(_) => None,
        }
    }
}

/// One node of the separator recursion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub depth: usize,
    pub size: usize,
    pub min_vertex: VertexId,
    pub separator: usize,
    pub method: SeparatorMethod,
}

/// One pairwise collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseRecord {
    pub depth: usize,
    /// Vertices of the graph the collection was built on.
    pub n: usize,
    /// Size of the demand set.
    pub t: usize,
    /// Number of Ramsey levels until the demand set was exhausted.
    pub levels: usize,
    pub trees: usize,
    pub total_size: usize,
    /// Whether the trees were extended to span the whole graph.
    pub extended: bool,
    /// Largest forest stretch measured over the levels (spanning only).
    pub stretch: Ratio,
    /// Largest certified distortion over the levels (metric and HST only).
    pub alpha: Ratio,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildTrace {
    pub nodes: Vec<NodeRecord>,
    pub pairwise: Vec<PairwiseRecord>,
    pub ramsey_calls: Vec<RamseyCall>,
    pub max_depth: usize,
    /// HST-to-tree conversions; each one is checked on all pairs.
    pub conversions: usize,
    /// Ultrametric extensions; each one is checked on all pairs.
    pub extensions: usize,
}

impl BuildTrace {
    fn absorb(&mut self, other: BuildTrace) {
        self.nodes.extend(other.nodes);
        self.pairwise.extend(other.pairwise);
        self.ramsey_calls.extend(other.ramsey_calls);
        self.max_depth = self.max_depth.max(other.max_depth);
        self.conversions += other.conversions;
        self.extensions += other.extensions;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub n: usize,
    pub kind: CoverKind,
    pub full: bool,
    pub k: u32,
    pub trees: Vec<CoverTree>,
    /// Largest certified Ramsey distortion α_R over the build.
    pub alpha: Ratio,
    /// Largest measured spanning-forest stretch over the build.
    pub spanning_stretch: Ratio,
    pub glue_sentinel: Weight,
    pub trace: BuildTrace,
}

impl Cover {
    /// Per-pair stretch the construction guarantees on its domain:
    /// `16α_R + 1` for metric covers, `6α_R` for HST covers, and the
    /// measured forest stretch for spanning covers.
    pub fn guarantee(&self) -> Ratio {
        match self.kind {
            CoverKind::Spanning => self.spanning_stretch,
            CoverKind::Metric => Ratio::new(16 * self.alpha.num + self.alpha.den, self.alpha.den),
            CoverKind::Hst => Ratio::new(6 * self.alpha.num, self.alpha.den),
        }
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    /// `Σ |V(T)|`.
    pub fn total_size(&self) -> usize {
        self.trees.iter().map(CoverTree::len).sum()
    }

    /// For every vertex, the indices of the trees containing it.
    pub fn membership(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (i, t) in self.trees.iter().enumerate() {
            for v in t.vertices() {
                out[v].push(i);
            }
        }
        out
    }

    pub fn max_overlap(&self) -> usize {
        self.membership().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn average_overlap(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.total_size() as f64 / self.n as f64
        }
    }
}
