use serde::{Deserialize, Serialize};

use super::{for_shared, CoverTrees, QueryError};
use crate::cover::{Cover, CoverKind};
use crate::graph::{Edge, Graph, VertexId, Weight, UNREACHABLE};
use crate::ratio::Ratio;
use crate::treekit::{TreePathOracle, TwoHopEmulator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    /// Underlying edges are graph edges.
    Spanning,
    Emulator,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathAnswer {
    pub weight: Weight,
    /// Selected tree, or `None` when no tree holds both endpoints.
    pub tree: Option<usize>,
    /// Edges from `u` to `v`, each oriented along the path.
    pub path: Vec<Edge>,
}

/// Sorted, deduplicated edge set keyed by ordered endpoints.
fn edge_set(edges: impl IntoIterator<Item = Edge>) -> Vec<Edge> {
    let mut out: Vec<Edge> = edges
        .into_iter()
        .map(|e| {
            let (u, v) = e.key();
            Edge::new(u, v, e.w)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn set_contains(set: &[Edge], e: &Edge) -> bool {
    let (u, v) = e.key();
    set.binary_search(&Edge::new(u, v, e.w)).is_ok()
}

fn check_vertex(n: usize, v: VertexId) -> Result<(), QueryError> {
    if v < n {
        Ok(())
    } else {
        Err(QueryError::UnknownVertex(v))
    }
}

/// Distance structure that can also emit a path of underlying edges whose
/// weight is the estimate.
#[derive(Clone, Debug)]
pub struct PathReporting {
    pub kind: PathKind,
    /// Stretch the cover certifies on its domain.
    pub bound: Ratio,
    n: usize,
    underlying: Vec<Edge>,
    oracles: Vec<TreePathOracle>,
    membership: Vec<Vec<usize>>,
}

/// Path reporting over a metric or spanning cover. HST covers are rejected;
/// convert them with [`CoverTrees::from_hst_cover`] and use
/// [`PathReporting::from_trees`].
pub fn build_path_reporting(g: &Graph, cover: &Cover) -> Result<PathReporting, QueryError> {
    PathReporting::from_trees(g, &CoverTrees::new(cover)?)
}

impl PathReporting {
    pub fn from_trees(g: &Graph, trees: &CoverTrees) -> Result<Self, QueryError> {
        if trees.n != g.n() {
            return Err(QueryError::UnknownVertex(trees.n.max(g.n()) - 1));
        }
        let kind = if trees.kind == CoverKind::Spanning {
            PathKind::Spanning
        } else {
            PathKind::Emulator
        };
        let underlying = edge_set(trees.trees.iter().flat_map(|t| t.edges().iter().copied()));
        if kind == PathKind::Spanning {
            if let Some(e) = underlying
                .iter()
                .find(|e| g.edge_weight(e.u, e.v) != Some(e.w))
            {
                return Err(QueryError::NotSubgraph { u: e.u, v: e.v });
            }
        }
        let oracles = trees
            .trees
            .iter()
            .map(TreePathOracle::new)
            .collect::<Result<_, _>>()?;
        Ok(Self {
            kind,
            bound: trees.bound,
            n: trees.n,
            underlying,
            oracles,
            membership: trees.membership(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn underlying(&self) -> &[Edge] {
        &self.underlying
    }

    pub fn in_underlying(&self, e: &Edge) -> bool {
        set_contains(&self.underlying, e)
    }

    fn select(&self, u: VertexId, v: VertexId) -> Result<(Weight, Option<usize>), QueryError> {
        check_vertex(self.n, u)?;
        check_vertex(self.n, v)?;
        let mut best = (UNREACHABLE, None);
        for_shared(&self.membership[u], &self.membership[v], |t| {
            let d = self.oracles[t].distance(u, v).expect("member of the tree");
            if d < best.0 {
                best = (d, Some(t));
            }
        });
        Ok(best)
    }

    /// `min` over shared trees of `d_T(u, v)`, or `UNREACHABLE`.
    pub fn query_distance(&self, u: VertexId, v: VertexId) -> Result<Weight, QueryError> {
        Ok(self.select(u, v)?.0)
    }

    pub fn query_path(&self, u: VertexId, v: VertexId) -> Result<PathAnswer, QueryError> {
        let (weight, tree) = self.select(u, v)?;
        let path = match tree {
            Some(t) => self.oracles[t].path(u, v)?,
            None => Vec::new(),
        };
        Ok(PathAnswer { weight, tree, path })
    }
}

/// Path reporting whose paths have at most two overlay edges, built from
/// the two-hop emulators of the cover trees.
#[derive(Clone, Debug)]
pub struct LowHopReporting {
    pub bound: Ratio,
    pub hop_bound: usize,
    n: usize,
    overlay: Vec<Edge>,
    emulators: Vec<TwoHopEmulator>,
    membership: Vec<Vec<usize>>,
}

pub fn build_low_hop_path_reporting(
    cover: &Cover,
    hop_bound: usize,
) -> Result<LowHopReporting, QueryError> {
    LowHopReporting::from_trees(&CoverTrees::new(cover)?, hop_bound)
}

impl LowHopReporting {
    pub fn from_trees(trees: &CoverTrees, hop_bound: usize) -> Result<Self, QueryError> {
        if hop_bound != 2 {
            return Err(QueryError::UnsupportedHopBound(hop_bound));
        }
        let emulators: Vec<TwoHopEmulator> = trees
            .trees
            .iter()
            .map(TwoHopEmulator::new)
            .collect::<Result<_, _>>()?;
        let overlay = edge_set(emulators.iter().flat_map(TwoHopEmulator::edges));
        Ok(LowHopReporting {
            bound: trees.bound,
            hop_bound,
            n: trees.n,
            overlay,
            emulators,
            membership: trees.membership(),
        })
    }

    pub fn overlay(&self) -> &[Edge] {
        &self.overlay
    }

    pub fn in_overlay(&self, e: &Edge) -> bool {
        set_contains(&self.overlay, e)
    }

    pub fn query_path(&self, u: VertexId, v: VertexId) -> Result<PathAnswer, QueryError> {
        check_vertex(self.n, u)?;
        check_vertex(self.n, v)?;
        let mut best: Option<(usize, crate::treekit::TwoHopAnswer)> = None;
        let mut err = None;
        for_shared(&self.membership[u], &self.membership[v], |t| {
            match self.emulators[t].query(u, v) {
                Ok(a) => {
                    if best.as_ref().is_none_or(|b| a.weight < b.1.weight) {
                        best = Some((t, a));
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        Ok(match best {
            Some((t, a)) => PathAnswer {
                weight: a.weight,
                tree: Some(t),
                path: a.path,
            },
            None => PathAnswer {
                weight: UNREACHABLE,
                tree: None,
                path: Vec::new(),
            },
        })
    }

    pub fn query_distance(&self, u: VertexId, v: VertexId) -> Result<Weight, QueryError> {
        Ok(self.query_path(u, v)?.weight)
    }
}
