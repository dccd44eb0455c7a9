//! Metric Ramsey subroutines and ultrametric realizations.
//!
//! Distortion is never assumed: every Ramsey subset comes with the exact
//! maximum of `ρ/d` over its pairs, and downstream bounds are stated in
//! terms of that measured value.

mod extend;
mod hst;
mod metric;
mod pair;
mod partition;
mod spanning;

use thiserror::Error;

use crate::graph::{GraphError, VertexId};
use crate::treekit::TreeError;

pub use extend::extend_ultrametric;
pub use hst::{hst_from_ultrametric, um_to_tree, Hst, HstNode, Ultrametric};
pub use metric::FiniteMetric;
pub use pair::{ramsey_tree_pair, TreePair};
pub use partition::{
    cardinality_ok, metric_ramsey, required_size, RamseyOutcome, CENTERS_PER_SPLIT, MAX_ATTEMPTS,
};
pub use spanning::{
    spanning_ramsey_forest, ComponentTree, RamseyCall, RamseyForest, SpanningStrategy,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RamseyError {
    #[error("empty point set")]
    Empty,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("strong triangle inequality fails around ({x}, {y})")]
    StrongTriangle { x: VertexId, y: VertexId },
    #[error("distinct points {x} and {y} are at distance zero")]
    ZeroDistance { x: VertexId, y: VertexId },
    #[error("point {0} is not in the metric")]
    UnknownPoint(VertexId),
    #[error("labels overflow")]
    Overflow,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
