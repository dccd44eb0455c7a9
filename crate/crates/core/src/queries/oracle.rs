use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::QueryError;
use crate::graph::{
    dijkstra, nearest_member_paths, Graph, VertexId, VertexSet, Weight, UNREACHABLE,
};
use crate::ramsey::{metric_ramsey, FiniteMetric, Hst, RamseyCall};
use crate::ratio::Ratio;
use crate::rng::derive_seed;
use crate::separator::SeparatorProvider;

/// One Ramsey level: the HST on the kept subset `S` and, for every vertex
/// of the level's graph that reaches `S`, its nearest member of `S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct Level {
    hst: Hst,
    /// `(v, s_v, d(v, s_v), component of v)`, sorted by `v`.
    nearest: Vec<(VertexId, VertexId, Weight, u32)>,
}

impl Level {
    fn entry(&self, v: VertexId) -> Option<&(VertexId, VertexId, Weight, u32)> {
        self.nearest
            .binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| &self.nearest[i])
    }

    fn estimate(&self, u: VertexId, v: VertexId) -> Weight {
        match (self.entry(u), self.entry(v)) {
            (Some(a), Some(b)) if a.3 == b.3 => {
                a.2 + self.hst.distance(a.1, b.1).expect("nearest is in S") + b.2
            }
            _ => UNREACHABLE,
        }
    }

    fn words(&self) -> usize {
        3 * self.hst.len() + 4 * self.nearest.len()
    }
}

/// Distance oracle for pairs with a shortest path through a demand set;
/// every answer dominates the graph distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairwiseOracle {
    levels: Vec<Level>,
    /// Largest certified Ramsey distortion over the levels.
    pub alpha: Ratio,
    pub calls: Vec<RamseyCall>,
}

fn reject_zero_weights(g: &Graph) -> Result<(), QueryError> {
    match g.edges().iter().find(|e| e.w == 0) {
        Some(e) => Err(QueryError::ZeroWeight { u: e.u, v: e.v }),
        None => Ok(()),
    }
}

impl PairwiseOracle {
    /// `g` has global ids `to_global`; `cap` is at least every finite
    /// distance of `g`.
    fn build(
        g: &Graph,
        to_global: &[VertexId],
        demand: &VertexSet,
        k: u32,
        seed: u64,
        cap: Weight,
    ) -> Result<Self, QueryError> {
        if demand.is_empty() {
            return Err(QueryError::EmptyDemand);
        }
        let mut out = PairwiseOracle {
            levels: Vec::new(),
            alpha: Ratio::ONE,
            calls: Vec::new(),
        };
        let mut cur = g.clone();
        let mut cur_map: Vec<usize> = (0..g.n()).collect();
        let mut a_cur = demand.clone();
        while !a_cur.is_empty() {
            let level_seed = derive_seed(seed, &[out.levels.len() as u64]);
            let rows: HashMap<VertexId, Vec<Weight>> =
                a_cur.iter().map(|&a| (a, dijkstra(&cur, a).dist)).collect();
            let metric = FiniteMetric::from_fn(a_cur.as_slice().to_vec(), |a, b| rows[&a][b], cap);
            let o = metric_ramsey(&metric, k, level_seed)?;
            out.alpha = out.alpha.max(o.alpha);
            out.calls.push(RamseyCall {
                demand: o.points.len(),
                kept: o.subset.len(),
                k,
                alpha: o.alpha,
                attempts: o.attempts,
                fallback: o.fallback,
            });
            let global = |x: VertexId| to_global[cur_map[x]];
            let s = VertexSet::new(cur.n(), o.subset.iter().copied());
            let (near, _) = nearest_member_paths(&cur, &s);
            let comp = cur.component_labels();
            let mut nearest: Vec<_> = (0..cur.n())
                .filter(|&x| near[x].1 != UNREACHABLE)
                .map(|x| (global(x), global(near[x].0), near[x].1, comp[x] as u32))
                .collect();
            nearest.sort_unstable();
            out.levels.push(Level {
                hst: o.hst.relabel(global),
                nearest,
            });
            let sub = cur.induced_subgraph(&s.complement())?;
            a_cur = VertexSet::new(
                sub.graph.n(),
                a_cur.difference(&s).iter().map(|&x| sub.from_parent[x]),
            );
            cur_map = sub.to_parent.iter().map(|&x| cur_map[x]).collect();
            cur = sub.graph;
        }
        Ok(out)
    }

    /// `min` over levels of `d(u, s_u) + ρ(s_u, s_v) + d(s_v, v)`, taken
    /// over levels where `u` and `v` share a component; `UNREACHABLE` if
    /// there is none.
    pub fn query(&self, u: VertexId, v: VertexId) -> Weight {
        if u == v {
            return 0;
        }
        self.levels
            .iter()
            .map(|l| l.estimate(u, v))
            .min()
            .unwrap_or(UNREACHABLE)
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// Stored words: three per HST node and four per nearest-map entry.
    pub fn words(&self) -> usize {
        self.levels.iter().map(Level::words).sum()
    }
}

/// The oracle for pairs of `g` with a shortest path through `a`.
pub fn build_pairwise_do(
    g: &Graph,
    a: &VertexSet,
    k: u32,
    seed: u64,
) -> Result<PairwiseOracle, QueryError> {
    reject_zero_weights(g)?;
    let ids: Vec<VertexId> = (0..g.n()).collect();
    PairwiseOracle::build(g, &ids, a, k, seed, g.diameter_bound()?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Node {
    /// `None` at the root of a disconnected graph and at single vertices.
    oracle: Option<PairwiseOracle>,
    /// `(vertex, child index)` for vertices outside the separator, sorted.
    child_of: Vec<(VertexId, u32)>,
    children: Vec<usize>,
}

impl Node {
    fn child(&self, v: VertexId) -> Option<usize> {
        self.child_of
            .binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| self.children[self.child_of[i].1 as usize])
    }
}

/// Distance oracle from recursive balanced separators: a pairwise oracle
/// for each separator, and the oracles of the components left after
/// removing it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparatorOracle {
    pub n: usize,
    nodes: Vec<Node>,
    /// Largest certified Ramsey distortion over the whole recursion.
    pub alpha: Ratio,
    pub depth: usize,
}

struct Ctx<'a> {
    provider: &'a SeparatorProvider,
    k: u32,
    seed: u64,
    cap: Weight,
}

fn split(nodes: &mut Vec<Node>, at: usize, parts: &[Vec<VertexId>]) {
    let mut child_of: Vec<(VertexId, u32)> = parts
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |&v| (v, i as u32)))
        .collect();
    child_of.sort_unstable();
    nodes[at].child_of = child_of;
}

/// Adds the node for `g` (global ids `to_global`) and its descendants;
/// returns its index and the depth reached.
fn grow(
    ctx: &Ctx,
    nodes: &mut Vec<Node>,
    alpha: &mut Ratio,
    g: &Graph,
    to_global: &[VertexId],
    depth: usize,
) -> Result<(usize, usize), QueryError> {
    let at = nodes.len();
    nodes.push(Node {
        oracle: None,
        child_of: Vec::new(),
        children: Vec::new(),
    });
    if g.n() <= 1 {
        return Ok((at, depth));
    }
    let sep = ctx.provider.separate(g, to_global)?;
    let seed = derive_seed(ctx.seed, &[to_global[0] as u64, depth as u64]);
    let oracle = PairwiseOracle::build(g, to_global, &sep.set, ctx.k, seed, ctx.cap)?;
    *alpha = (*alpha).max(oracle.alpha);
    nodes[at].oracle = Some(oracle);
    let rest = g.induced_subgraph(&sep.set.complement())?;
    let mut parts = Vec::new();
    let mut reached = depth;
    for c in rest.graph.connected_components() {
        let sub = rest.graph.induced_subgraph(&c)?;
        let ids: Vec<VertexId> = sub
            .to_parent
            .iter()
            .map(|&x| to_global[rest.to_parent[x]])
            .collect();
        let (child, d) = grow(ctx, nodes, alpha, &sub.graph, &ids, depth + 1)?;
        nodes[at].children.push(child);
        reached = reached.max(d);
        parts.push(ids);
    }
    split(nodes, at, &parts);
    Ok((at, reached))
}

pub fn build_separator_do(
    g: &Graph,
    provider: &SeparatorProvider,
    k: u32,
    seed: u64,
) -> Result<SeparatorOracle, QueryError> {
    reject_zero_weights(g)?;
    let ctx = Ctx {
        provider,
        k,
        seed,
        cap: g.diameter_bound()?,
    };
    let mut nodes = Vec::new();
    let mut alpha = Ratio::ONE;
    let mut depth = 0;
    if g.is_connected() {
        let ids: Vec<VertexId> = (0..g.n()).collect();
        depth = grow(&ctx, &mut nodes, &mut alpha, g, &ids, 0)?.1;
    } else {
        nodes.push(Node {
            oracle: None,
            child_of: Vec::new(),
            children: Vec::new(),
        });
        let mut parts = Vec::new();
        for c in g.connected_components() {
            let sub = g.induced_subgraph(&c)?;
            let (child, d) = grow(&ctx, &mut nodes, &mut alpha, &sub.graph, &sub.to_parent, 0)?;
            nodes[0].children.push(child);
            depth = depth.max(d);
            parts.push(sub.to_parent);
        }
        split(&mut nodes, 0, &parts);
    }
    Ok(SeparatorOracle {
        n: g.n(),
        nodes,
        alpha,
        depth,
    })
}

impl SeparatorOracle {
    /// Minimum of the separator estimates along the recursion path shared
    /// by `u` and `v`.
    pub fn query(&self, u: VertexId, v: VertexId) -> Result<Weight, QueryError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(QueryError::UnknownVertex(x));
            }
        }
        if u == v {
            return Ok(0);
        }
        let mut best = UNREACHABLE;
        let mut at = 0;
        loop {
            let node = &self.nodes[at];
            if let Some(o) = &node.oracle {
                best = best.min(o.query(u, v));
            }
            match (node.child(u), node.child(v)) {
                (Some(a), Some(b)) if a == b => at = a,
                _ => return Ok(best),
            }
        }
    }

    /// Stored words over all pairwise oracles and component maps.
    pub fn words(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| {
                n.oracle.as_ref().map_or(0, PairwiseOracle::words)
                    + 2 * n.child_of.len()
                    + n.children.len()
            })
            .sum()
    }

    /// `2α + 1` with the largest certified distortion of the recursion.
    pub fn bound(&self) -> Ratio {
        Ratio::new(2 * self.alpha.num + self.alpha.den, self.alpha.den)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

impl PairwiseOracle {
    pub fn bound(&self) -> Ratio {
        Ratio::new(2 * self.alpha.num + self.alpha.den, self.alpha.den)
    }
}
