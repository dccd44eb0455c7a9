use serde::{Deserialize, Serialize};

use super::{
    extend_ultrametric, hst_from_ultrametric, metric_ramsey, um_to_tree, FiniteMetric, Hst,
    RamseyError, RamseyOutcome,
};
use crate::graph::{Edge, VertexId, Weight};
use crate::treekit::Tree;

/// The Ramsey subset of a demand set together with an HST over all points
/// and a tree over all points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreePair {
    pub outcome: RamseyOutcome,
    /// Extended ultrametric over every point of the metric.
    pub t1: Hst,
    /// The tree of the subset's ultrametric, with every other point hung
    /// off its nearest subset member.
    pub t2: Tree,
    /// `(s_v, d(v, s_v))` per metric point, in metric order.
    pub attach: Vec<(VertexId, Weight)>,
}

/// Runs the Ramsey step on `demand` (points of `metric`) and builds both
/// trees. Unreachable pairs are expected to be capped in `metric` already,
/// so every point can be attached.
pub fn ramsey_tree_pair(
    metric: &FiniteMetric,
    demand: &[VertexId],
    k: u32,
    seed: u64,
) -> Result<TreePair, RamseyError> {
    if demand.is_empty() {
        return Err(RamseyError::Empty);
    }
    let index = metric.index();
    let local: Vec<usize> = demand
        .iter()
        .map(|p| index.get(p).copied().ok_or(RamseyError::UnknownPoint(*p)))
        .collect::<Result<_, _>>()?;
    let outcome = metric_ramsey(&metric.subset(&local), k, seed)?;
    let extended = extend_ultrametric(metric, &outcome.hst, outcome.alpha)?;
    let t1 = hst_from_ultrametric(&extended)?;

    let subset: Vec<usize> = outcome.subset.iter().map(|p| index[p]).collect();
    let points = metric.points();
    let attach: Vec<(VertexId, Weight)> = (0..metric.len())
        .map(|x| {
            subset
                .iter()
                .map(|&s| (metric.get(x, s), points[s]))
                .min()
                .map(|(d, s)| (s, d))
                .expect("subset is non-empty")
        })
        .collect();
    let core = um_to_tree(&outcome.hst)?;
    let mut edges = core.edges().to_vec();
    for (x, &(s, d)) in attach.iter().enumerate() {
        if s != points[x] {
            edges.push(Edge::new(points[x], s, d));
        }
    }
    let t2 = Tree::new(points.iter().copied(), edges)?;
    Ok(TreePair {
        outcome,
        t1,
        t2,
        attach,
    })
}
