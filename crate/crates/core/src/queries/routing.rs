use serde::{Deserialize, Serialize};

use super::labeling::label_query_counted;
use super::{CoverTrees, DistanceLabeling, QueryError};
use crate::cover::{Cover, CoverKind};
use crate::graph::{Edge, VertexId, Weight, UNREACHABLE};
use crate::ratio::Ratio;
use crate::treekit::{RoutingTable, Step, TreeRouting, TwoHopEmulator};

/// Header of a graph route: selected tree and the tree header's cursor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteHeader {
    pub tree: u32,
    pub cursor: u32,
}

impl RouteHeader {
    pub const WORDS: usize = 2;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteHop {
    pub vertex: VertexId,
    pub header: RouteHeader,
    /// Weight walked so far, including the edge into `vertex`.
    pub cumulative: Weight,
    /// Work done at the previous vertex to choose this hop; for the origin,
    /// the label scan plus the tree header setup.
    pub work: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRoute {
    pub source: VertexId,
    pub dest: VertexId,
    pub tree: Option<usize>,
    pub hops: Vec<RouteHop>,
    pub weight: Weight,
    pub delivered: bool,
}

/// Routing over a spanning cover: distance labels pick the tree at the
/// origin, then messages follow the tree routing of that tree.
#[derive(Clone, Debug)]
pub struct GraphRouting {
    pub labeling: DistanceLabeling,
    pub bound: Ratio,
    routings: Vec<TreeRouting>,
    /// Sorted `(u, v, w)` with `u < v`, per tree.
    weights: Vec<Vec<(VertexId, VertexId, Weight)>>,
    membership: Vec<Vec<usize>>,
}

pub fn build_graph_routing(cover: &Cover) -> Result<GraphRouting, QueryError> {
    if cover.kind != CoverKind::Spanning {
        return Err(QueryError::NotSpanning);
    }
    let trees = CoverTrees::new(cover)?;
    let routings = trees
        .trees
        .iter()
        .map(TreeRouting::new)
        .collect::<Result<_, _>>()?;
    let weights = trees
        .trees
        .iter()
        .map(|t| {
            let mut w: Vec<_> = t
                .edges()
                .iter()
                .map(|e| (e.key().0, e.key().1, e.w))
                .collect();
            w.sort_unstable();
            w
        })
        .collect();
    Ok(GraphRouting {
        labeling: DistanceLabeling::from_trees(&trees)?,
        bound: trees.bound,
        routings,
        weights,
        membership: trees.membership(),
    })
}

impl GraphRouting {
    /// Drops the header cursor; light edges are then looked up by scanning
    /// the destination label at every hop.
    pub fn set_strict(&mut self, strict: bool) {
        for r in &mut self.routings {
            r.strict = strict;
        }
    }

    fn weight(&self, t: usize, a: VertexId, b: VertexId) -> Weight {
        let key = (a.min(b), a.max(b));
        let w = &self.weights[t];
        let i = w.partition_point(|e| (e.0, e.1) < key);
        assert!(
            i < w.len() && (w[i].0, w[i].1) == key,
            "walk uses a tree edge"
        );
        w[i].2
    }

    /// Label of `v`: its distance label plus its routing label in every
    /// member tree.
    pub fn label_words(&self, v: VertexId) -> Result<usize, QueryError> {
        let mut words = self.labeling.label(v)?.words();
        for &t in &self.membership[v] {
            words += self.routings[t].label(v)?.words();
        }
        Ok(words)
    }

    pub fn table_words(&self, v: VertexId) -> Result<usize, QueryError> {
        let n = self
            .membership
            .get(v)
            .ok_or(QueryError::UnknownVertex(v))?
            .len();
        Ok(n * RoutingTable::WORDS)
    }

    pub fn simulate_route(&self, u: VertexId, v: VertexId) -> Result<GraphRoute, QueryError> {
        let (lu, lv) = (self.labeling.label(u)?, self.labeling.label(v)?);
        let (answer, scan) = label_query_counted(lu, lv)?;
        let Some(t) = answer.tree else {
            return Ok(GraphRoute {
                source: u,
                dest: v,
                tree: None,
                hops: Vec::new(),
                weight: UNREACHABLE,
                delivered: false,
            });
        };
        let r = &self.routings[t];
        let dest = r.label(v)?;
        let mut at = r.table(u)?;
        let (mut th, setup) = r.initial_header(at, dest);
        let mut header = RouteHeader {
            tree: t as u32,
            cursor: th.cursor,
        };
        let mut hops = vec![RouteHop {
            vertex: u,
            header,
            cumulative: 0,
            work: scan + setup,
        }];
        let mut weight = 0;
        for _ in 0..=self.membership.len() {
            match r.step(at, dest, th) {
                Step::Arrived => {
                    return Ok(GraphRoute {
                        source: u,
                        dest: v,
                        tree: Some(t),
                        hops,
                        weight,
                        delivered: true,
                    });
                }
                Step::Forward {
                    next,
                    header: h,
                    work,
                } => {
                    weight += self.weight(t, at.vertex, next);
                    th = h;
                    header.cursor = h.cursor;
                    hops.push(RouteHop {
                        vertex: next,
                        header,
                        cumulative: weight,
                        work,
                    });
                    at = r.table(next)?;
                }
            }
        }
        Ok(GraphRoute {
            source: u,
            dest: v,
            tree: Some(t),
            hops,
            weight,
            delivered: false,
        })
    }
}

/// Header of a metric route: selected tree, hub and destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricHeader {
    pub tree: u32,
    pub hub: VertexId,
    pub dest: VertexId,
}

impl MetricHeader {
    pub const WORDS: usize = 3;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricRoute {
    pub source: VertexId,
    pub dest: VertexId,
    pub header: Option<MetricHeader>,
    /// At most two overlay edges from `source` to `dest`.
    pub path: Vec<Edge>,
    pub weight: Weight,
}

/// Routing on the union of the two-hop emulators of a full metric cover.
#[derive(Clone, Debug)]
pub struct MetricRouting {
    pub labeling: DistanceLabeling,
    pub bound: Ratio,
    emulators: Vec<TwoHopEmulator>,
    overlay: Vec<Edge>,
}

pub fn build_metric_routing(cover: &Cover) -> Result<MetricRouting, QueryError> {
    if cover.kind != CoverKind::Metric || !cover.full {
        return Err(QueryError::NotFullMetric);
    }
    let trees = CoverTrees::new(cover)?;
    let emulators: Vec<TwoHopEmulator> = trees
        .trees
        .iter()
        .map(TwoHopEmulator::new)
        .collect::<Result<_, _>>()?;
    let mut overlay: Vec<Edge> = emulators
        .iter()
        .flat_map(TwoHopEmulator::edges)
        .map(|e| Edge::new(e.key().0, e.key().1, e.w))
        .collect();
    overlay.sort_unstable();
    overlay.dedup();
    Ok(MetricRouting {
        labeling: DistanceLabeling::from_trees(&trees)?,
        bound: trees.bound,
        emulators,
        overlay,
    })
}

impl MetricRouting {
    pub fn overlay(&self) -> &[Edge] {
        &self.overlay
    }

    pub fn in_overlay(&self, e: &Edge) -> bool {
        let (u, v) = e.key();
        self.overlay.binary_search(&Edge::new(u, v, e.w)).is_ok()
    }

    /// Table of `v`: its centroid ancestors in every tree, two words each.
    pub fn table_words(&self, v: VertexId) -> Result<usize, QueryError> {
        let mut words = 0;
        for e in &self.emulators {
            words += 2 * e.ancestors(v)?.len();
        }
        Ok(words)
    }

    pub fn simulate_route(&self, u: VertexId, v: VertexId) -> Result<MetricRoute, QueryError> {
        let answer = DistanceLabeling::query(self.labeling.label(u)?, self.labeling.label(v)?)?;
        let Some(t) = answer.tree else {
            return Ok(MetricRoute {
                source: u,
                dest: v,
                header: None,
                path: Vec::new(),
                weight: UNREACHABLE,
            });
        };
        let a = self.emulators[t].query(u, v)?;
        Ok(MetricRoute {
            source: u,
            dest: v,
            header: Some(MetricHeader {
                tree: t as u32,
                hub: a.hub,
                dest: v,
            }),
            path: a.path,
            weight: a.weight,
        })
    }
}
