//! Query structures on top of tree covers: path reporting, distance
//! oracles, distance labels, and routing simulators.
//!
//! Every structure selects a tree by scanning the trees shared by both
//! endpoints and taking the one with the smallest distance.

mod labeling;
mod oracle;
mod paths;
mod routing;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{Cover, CoverError, CoverKind, CoverTree};
use crate::graph::{GraphError, VertexId};
use crate::ramsey::{um_to_tree, RamseyError};
use crate::ratio::Ratio;
use crate::separator::SeparatorError;
use crate::treekit::{Tree, TreeError};

pub use labeling::{
    build_distance_labeling, DistanceLabeling, HstLabel, LabelAnswer, LabelMode, LabelPayload,
    VertexLabel,
};
pub use oracle::{build_pairwise_do, build_separator_do, PairwiseOracle, SeparatorOracle};
pub use paths::{
    build_low_hop_path_reporting, build_path_reporting, LowHopReporting, PathAnswer, PathKind,
    PathReporting,
};
pub use routing::{
    build_graph_routing, build_metric_routing, GraphRoute, GraphRouting, MetricHeader, MetricRoute,
    MetricRouting, RouteHeader, RouteHop,
};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
    #[error("hst covers must be converted to trees first")]
    HstCover,
    #[error("this structure needs a spanning cover")]
    NotSpanning,
    #[error("this structure needs a full metric cover")]
    NotFullMetric,
    #[error("tree edge ({u}, {v}) is not an edge of the graph")]
    NotSubgraph { u: VertexId, v: VertexId },
    #[error("only hop bound 2 is supported, got {0}")]
    UnsupportedHopBound(usize),
    #[error("vertex {0} is not in the structure")]
    UnknownVertex(VertexId),
    #[error("labels come from different builds ({left:#x} and {right:#x})")]
    BuildMismatch { left: u64, right: u64 },
    #[error("the demand set is empty")]
    EmptyDemand,
    #[error("zero-weight edge ({u}, {v})")]
    ZeroWeight { u: VertexId, v: VertexId },
}

/// The trees of a metric or spanning cover, ready for query structures,
/// with the stretch bound they carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTrees {
    pub n: usize,
    pub kind: CoverKind,
    pub full: bool,
    pub trees: Vec<Tree>,
    pub bound: Ratio,
    /// Whether the trees came from HSTs through the 8-approximate conversion.
    pub converted: bool,
}

impl CoverTrees {
    /// Rejects HST covers.
    pub fn new(cover: &Cover) -> Result<Self, QueryError> {
        if cover.kind == CoverKind::Hst {
            return Err(QueryError::HstCover);
        }
        let trees = cover
            .trees
            .iter()
            .map(|t| t.as_tree().cloned().ok_or(QueryError::HstCover))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            n: cover.n,
            kind: cover.kind,
            full: cover.full,
            trees,
            bound: cover.guarantee(),
            converted: false,
        })
    }

    /// Converts every HST of an HST cover into a tree with
    /// `ρ <= d_T <= 8ρ`; the bound grows by the same factor.
    pub fn from_hst_cover(cover: &Cover) -> Result<Self, QueryError> {
        if cover.kind != CoverKind::Hst {
            return Self::new(cover);
        }
        let trees = cover
            .trees
            .iter()
            .map(|t| match t {
                CoverTree::Hst(h) => Ok(um_to_tree(h)?),
                CoverTree::Tree(_) => Err(QueryError::HstCover),
            })
            .collect::<Result<_, QueryError>>()?;
        let g = cover.guarantee();
        Ok(Self {
            n: cover.n,
            kind: CoverKind::Metric,
            full: cover.full,
            trees,
            bound: Ratio::new(8 * g.num, g.den),
            converted: true,
        })
    }

    pub fn membership(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (i, t) in self.trees.iter().enumerate() {
            for &v in t.nodes() {
                out[v].push(i);
            }
        }
        out
    }
}

/// Walks two ascending tree-id lists and calls `f` on each shared id.
pub(crate) fn for_shared(a: &[usize], b: &[usize], mut f: impl FnMut(usize)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}
