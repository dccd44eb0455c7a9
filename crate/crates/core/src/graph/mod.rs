//! Weighted undirected graphs with exact integer weights.
//!
//! Everything else in the crate verifies itself against the distances
//! computed here, so this layer stays small and exact: weights are `u64`,
//! unreachable pairs carry the dedicated [`UNREACHABLE`] sentinel, and no
//! floating point is involved after ingest.

mod distance;
mod io;
mod vertex_set;

pub use distance::{
    dijkstra, distances_from, exact_distances, nearest_member, nearest_member_paths,
    DistanceMatrix, ShortestPaths,
};
pub use io::{GraphFormat, LoadOptions};
pub use vertex_set::VertexSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type Weight = u64;

/// Distance between vertices in different components.
pub const UNREACHABLE: Weight = Weight::MAX;

/// Largest accepted edge weight. Any simple path then fits in 64 bits.
pub const MAX_EDGE_WEIGHT: Weight = 1 << 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: VertexId },
    #[error("line {line}: negative weight")]
    NegativeWeight { line: usize },
    #[error("weight {weight} exceeds the maximum of 2^40")]
    WeightOverflow { weight: String },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("parallel edge between {u} and {v}")]
    ParallelEdge { u: VertexId, v: VertexId },
    #[error("header declares {declared} edges but {found} were read")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("arithmetic overflow while summing weights")]
    Overflow,
}

/// How ingest treats repeated vertex pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DedupPolicy {
    #[default]
    Reject,
    /// Keep the lightest copy (`--dedupe=min`).
    KeepMin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Weight,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, w: Weight) -> Self {
        Self { u, v, w }
    }

    /// Endpoints ordered so that the first is the smaller id.
    pub fn key(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// `adj[x]` lists `(neighbor, edge index)`, in edge-list order.
    adj: Vec<Vec<(VertexId, usize)>>,
    weight_scale: u64,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>, policy: DedupPolicy) -> Result<Self, GraphError> {
        Self::with_scale(n, edges, policy, 1)
    }

    pub(crate) fn with_scale(
        n: usize,
        edges: Vec<Edge>,
        policy: DedupPolicy,
        weight_scale: u64,
    ) -> Result<Self, GraphError> {
        let mut kept: Vec<Edge> = Vec::with_capacity(edges.len());
        let mut index: std::collections::HashMap<(VertexId, VertexId), usize> =
            std::collections::HashMap::with_capacity(edges.len());
        for e in edges {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { vertex: e.u });
            }
            if e.w > MAX_EDGE_WEIGHT {
                return Err(GraphError::WeightOverflow {
                    weight: e.w.to_string(),
                });
            }
            match index.get(&e.key()) {
                Some(&i) => match policy {
                    DedupPolicy::Reject => {
                        let (u, v) = e.key();
                        return Err(GraphError::ParallelEdge { u, v });
                    }
                    DedupPolicy::KeepMin => kept[i].w = kept[i].w.min(e.w),
                },
                None => {
                    index.insert(e.key(), kept.len());
                    kept.push(e);
                }
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (i, e) in kept.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        Ok(Self {
            n,
            edges: kept,
            adj,
            weight_scale,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn neighbors(&self, x: VertexId) -> &[(VertexId, usize)] {
        &self.adj[x]
    }

    /// Factor every ingested weight was multiplied by (1 for integer input).
    pub fn weight_scale(&self) -> u64 {
        self.weight_scale
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Weight of the edge `{u, v}`, if present.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a]
            .iter()
            .find(|&&(x, _)| x == b)
            .map(|&(_, i)| self.edges[i].w)
    }

    pub fn has_zero_weight_edge(&self) -> bool {
        self.edges.iter().any(|e| e.w == 0)
    }

    /// The subgraph induced by `set`, with a table mapping local ids back.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<Subgraph, GraphError> {
        if set.universe() != self.n {
            if let Some(&bad) = set.iter().find(|&&x| x >= self.n) {
                return Err(GraphError::VertexOutOfRange {
                    vertex: bad,
                    n: self.n,
                });
            }
        }
        let to_parent: Vec<VertexId> = set.iter().copied().collect();
        let mut from_parent = vec![usize::MAX; self.n];
        for (local, &x) in to_parent.iter().enumerate() {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
            from_parent[x] = local;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| from_parent[e.u] != usize::MAX && from_parent[e.v] != usize::MAX)
            .map(|e| Edge::new(from_parent[e.u], from_parent[e.v], e.w))
            .collect();
        let graph = Graph::with_scale(
            to_parent.len(),
            edges,
            DedupPolicy::Reject,
            self.weight_scale,
        )
        .expect("induced subgraph of a valid graph is valid");
        Ok(Subgraph {
            graph,
            to_parent,
            from_parent,
        })
    }

    /// Components ordered by their minimum vertex id.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let labels = self.component_labels();
        let count = labels.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut members = vec![Vec::new(); count];
        for (x, &c) in labels.iter().enumerate() {
            members[c].push(x);
        }
        members
            .into_iter()
            .map(|ids| VertexSet::from_sorted(self.n, ids))
            .collect()
    }

    /// Component index per vertex; indices follow minimum-vertex order.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_labels().iter().all(|&c| c == 0)
    }

    /// `1 + Σ w(e)`: strictly above every finite distance in the graph.
    pub fn diameter_bound(&self) -> Result<Weight, GraphError> {
        self.edges
            .iter()
            .try_fold(1 as Weight, |acc, e| acc.checked_add(e.w))
            .filter(|&b| b < UNREACHABLE)
            .ok_or(GraphError::Overflow)
    }
}

/// An induced subgraph together with its id translation tables.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    /// Local id to parent id.
    pub to_parent: Vec<VertexId>,
    /// Parent id to local id, `usize::MAX` when absent.
    pub from_parent: Vec<usize>,
}

impl Subgraph {
    pub fn local(&self, parent_id: VertexId) -> Option<VertexId> {
        self.from_parent
            .get(parent_id)
            .copied()
            .filter(|&x| x != usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(weights: &[Weight]) -> Graph {
        let edges = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Edge::new(i, i + 1, w))
            .collect();
        Graph::new(weights.len() + 1, edges, DedupPolicy::Reject).unwrap()
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::new(2, vec![Edge::new(0, 0, 3)], DedupPolicy::Reject).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { vertex: 0 });
    }

    #[test]
    fn parallel_edges_follow_policy() {
        let edges = vec![Edge::new(0, 1, 5), Edge::new(1, 0, 2)];
        assert!(matches!(
            Graph::new(2, edges.clone(), DedupPolicy::Reject),
            Err(GraphError::ParallelEdge { u: 0, v: 1 })
        ));
        let g = Graph::new(2, edges, DedupPolicy::KeepMin).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(2));
    }

    #[test]
    fn diameter_bound_is_sum_plus_one() {
        assert_eq!(path(&[5]).diameter_bound().unwrap(), 6);
        let empty = Graph::new(3, vec![], DedupPolicy::Reject).unwrap();
        assert_eq!(empty.diameter_bound().unwrap(), 1);
    }

    #[test]
    fn induced_subgraph_maps_back() {
        let g = path(&[1, 2, 3, 4]);
        let sub = g.induced_subgraph(&VertexSet::new(5, [1, 2, 4])).unwrap();
        assert_eq!(sub.graph.n(), 3);
        assert_eq!(sub.graph.edges(), &[Edge::new(0, 1, 2)]);
        assert_eq!(sub.to_parent, vec![1, 2, 4]);
        assert_eq!(sub.local(4), Some(2));
        assert_eq!(sub.local(3), None);

        let empty = g.induced_subgraph(&VertexSet::new(5, [])).unwrap();
        assert_eq!(empty.graph.n(), 0);
        let all = g.induced_subgraph(&g.all_vertices()).unwrap();
        assert_eq!(all.graph, g);
        assert_eq!(all.to_parent, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn components_in_min_id_order() {
        let edges = vec![
            Edge::new(3, 4, 1),
            Edge::new(4, 5, 1),
            Edge::new(3, 5, 1),
            Edge::new(0, 1, 1),
            Edge::new(1, 2, 1),
            Edge::new(0, 2, 1),
        ];
        let g = Graph::new(6, edges, DedupPolicy::Reject).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].as_slice(), &[0, 1, 2]);
        assert_eq!(comps[1].as_slice(), &[3, 4, 5]);
        assert!(!g.is_connected());
        assert!(path(&[1, 1]).is_connected());
    }
}
