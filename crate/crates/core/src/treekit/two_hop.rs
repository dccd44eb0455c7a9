use serde::{Deserialize, Serialize};

use super::labels::centroid_chains;
use super::tree::{RootedTree, Tree};
use super::TreeError;
use crate::graph::{Edge, VertexId, Weight};

/// Tree 1-emulator with hop diameter 2: every vertex is joined to each of
/// its centroid ancestors by an edge of the exact tree distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoHopEmulator {
    nodes: Vec<VertexId>,
    /// Centroid ancestors per node, topmost first; the last is the node itself.
    ancestors: Vec<Vec<(VertexId, Weight)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoHopAnswer {
    pub weight: Weight,
    pub hub: VertexId,
    /// At most two emulator edges, oriented from `u` to `v`.
    pub path: Vec<Edge>,
}

impl TwoHopEmulator {
    pub fn new(t: &Tree) -> Result<Self, TreeError> {
        Ok(Self::from_rooted(&t.rooted(None)?))
    }

    pub fn from_rooted(r: &RootedTree) -> Self {
        let ancestors = centroid_chains(r)
            .into_iter()
            .map(|chain| chain.into_iter().map(|(c, d)| (r.nodes[c], d)).collect())
            .collect();
        Self {
            nodes: r.nodes.clone(),
            ancestors,
        }
    }

    fn index(&self, v: VertexId) -> Result<usize, TreeError> {
        self.nodes
            .binary_search(&v)
            .map_err(|_| TreeError::UnknownVertex(v))
    }

    pub fn ancestors(&self, v: VertexId) -> Result<&[(VertexId, Weight)], TreeError> {
        Ok(&self.ancestors[self.index(v)?])
    }

    /// All emulator edges `(v, c)` with `c` a proper centroid ancestor of `v`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (i, chain) in self.ancestors.iter().enumerate() {
            let v = self.nodes[i];
            for &(c, d) in chain {
                if c != v {
                    out.push(Edge::new(v, c, d));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.ancestors.iter().map(|c| c.len() - 1).sum()
    }

    pub fn query(&self, u: VertexId, v: VertexId) -> Result<TwoHopAnswer, TreeError> {
        let (a, b) = (self.ancestors(u)?, self.ancestors(v)?);
        let (hub, weight, du, dv) = a
            .iter()
            .zip(b)
            .take_while(|(x, y)| x.0 == y.0)
            .map(|(x, y)| (x.0, x.1 + y.1, x.1, y.1))
            .min_by_key(|&(c, w, _, _)| (w, c))
            .ok_or(TreeError::UnknownVertex(u))?;
        let mut path = Vec::with_capacity(2);
        if hub != u {
            path.push(Edge::new(u, hub, du));
        }
        if hub != v {
            path.push(Edge::new(hub, v, dv));
        }
        Ok(TwoHopAnswer { weight, hub, path })
    }
}
