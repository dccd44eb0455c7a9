use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{cardinality_ok, metric_ramsey, required_size, FiniteMetric, RamseyError};
use crate::graph::{
    dijkstra, nearest_member_paths, DedupPolicy, DistanceMatrix, Graph, ShortestPaths, VertexId,
    VertexSet,
};
use crate::ratio::Ratio;
use crate::rng::derive_seed;
use crate::treekit::{Tree, TreePathOracle};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanningStrategy {
    /// Realize the Ramsey HST with shortest paths between representatives.
    #[default]
    HstRealization,
    /// One shortest-path tree from the most central vertex; keep the demand
    /// vertices it serves best.
    SptStar,
}

/// One Ramsey step, as recorded in build traces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyCall {
    pub demand: usize,
    pub kept: usize,
    pub k: u32,
    pub alpha: Ratio,
    pub attempts: u32,
    pub fallback: bool,
}

impl RamseyCall {
    pub fn cardinality_ok(&self) -> bool {
        cardinality_ok(self.kept, self.demand, self.k)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentTree {
    pub tree: Tree,
    /// Whether the component met the demand set.
    pub demand: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamseyForest {
    pub subset: VertexSet,
    /// One tree per component, by minimum vertex id.
    pub trees: Vec<ComponentTree>,
    /// Exact `max d_F(u,v)/d_G(u,v)` over `u` in the subset and `v ≠ u` in
    /// its component.
    pub stretch: Ratio,
    /// One entry per component that met the demand set.
    pub calls: Vec<RamseyCall>,
}

/// Tree on `comp` made of the parent edges of a shortest-path search.
fn spt_tree(g: &Graph, comp: &VertexSet, sp: &ShortestPaths) -> Result<Tree, RamseyError> {
    let edges = comp
        .iter()
        .filter_map(|&v| sp.parent_edge[v])
        .map(|e| g.edge(e))
        .collect();
    Ok(Tree::new(comp.iter().copied(), edges)?)
}

/// `(S, tree)` for one component under the HST-realization strategy.
fn realize(
    g: &Graph,
    dm: &DistanceMatrix,
    comp: &VertexSet,
    demand: &[VertexId],
    k: u32,
    seed: u64,
) -> Result<(Vec<VertexId>, Tree, RamseyCall), RamseyError> {
    let metric = FiniteMetric::restrict(dm, demand, crate::graph::UNREACHABLE);
    let out = metric_ramsey(&metric, k, seed)?;
    let call = RamseyCall {
        demand: demand.len(),
        kept: out.subset.len(),
        k,
        alpha: out.alpha,
        attempts: out.attempts,
        fallback: out.fallback,
    };
    let nodes = out.hst.nodes();
    let mut rep = vec![usize::MAX; nodes.len()];
    for x in (0..nodes.len()).rev() {
        rep[x] = nodes[x].point.unwrap_or_else(|| rep[nodes[x].children[0]]);
    }
    let mut used = vec![false; g.m()];
    let mut covered = vec![false; g.n()];
    let mut searches: HashMap<VertexId, ShortestPaths> = HashMap::new();
    for (x, node) in nodes.iter().enumerate() {
        for &c in &node.children {
            let (a, b) = (rep[x], rep[c]);
            covered[a] = true;
            covered[b] = true;
            if a == b {
                continue;
            }
            let sp = searches.entry(a).or_insert_with(|| dijkstra(g, a));
            let mut v = b;
            for e in sp.path_edges(g, b) {
                used[e] = true;
                v = g.edge(e).other(v);
                covered[v] = true;
            }
        }
    }
    covered[rep[0]] = true;
    let s_set = VertexSet::new(g.n(), out.subset.iter().copied());
    let (_, parent) = nearest_member_paths(g, &s_set);
    for &v in comp {
        if covered[v] {
            continue;
        }
        let mut x = v;
        while let Some(e) = parent[x] {
            used[e] = true;
            x = g.edge(e).other(x);
        }
    }
    let union: Vec<_> = (0..g.m()).filter(|&e| used[e]).map(|e| g.edge(e)).collect();
    let h = Graph::new(g.n(), union, DedupPolicy::Reject)?;
    let sp = dijkstra(&h, rep[0]);
    let tree = spt_tree(&h, comp, &sp)?;
    Ok((out.subset, tree, call))
}

/// `(S, tree)` for one component under the shortest-path-star strategy.
fn spt_star(
    g: &Graph,
    dm: &DistanceMatrix,
    comp: &VertexSet,
    demand: &[VertexId],
    k: u32,
) -> Result<(Vec<VertexId>, Tree, RamseyCall), RamseyError> {
    let center = comp
        .iter()
        .copied()
        .min_by_key(|&c| {
            (
                demand.iter().map(|&a| dm.get(c, a) as u128).sum::<u128>(),
                c,
            )
        })
        .expect("component is non-empty");
    let tree = spt_tree(g, comp, &dijkstra(g, center))?;
    let oracle = TreePathOracle::new(&tree)?;
    let mut scored = Vec::with_capacity(demand.len());
    for &a in demand {
        let mut worst = Ratio::ONE;
        for &v in comp {
            if v != a {
                let d = dm.get(a, v);
                if d == 0 {
                    return Err(RamseyError::ZeroDistance { x: a, y: v });
                }
                worst = worst.max(Ratio::new(oracle.distance(a, v)? as u128, d as u128));
            }
        }
        scored.push((worst, a));
    }
    scored.sort();
    let m = demand.len();
    let s = required_size(m, k);
    let mut subset: Vec<VertexId> = scored[..s].iter().map(|&(_, a)| a).collect();
    subset.sort_unstable();
    let call = RamseyCall {
        demand: m,
        kept: s,
        k,
        alpha: scored[s - 1].0,
        attempts: 1,
        fallback: false,
    };
    Ok((subset, tree, call))
}

/// A spanning forest of `g` (one tree per component) together with a
/// subset `S` of the demand set whose distances the forest approximates.
/// `dm` must be the exact distance matrix of `g`.
pub fn spanning_ramsey_forest(
    g: &Graph,
    dm: &DistanceMatrix,
    demand: &VertexSet,
    k: u32,
    strategy: SpanningStrategy,
    seed: u64,
) -> Result<RamseyForest, RamseyError> {
    if k == 0 {
        return Err(RamseyError::BadParameter("k must be at least 1".into()));
    }
    let mut subset = Vec::new();
    let mut trees = Vec::new();
    let mut calls = Vec::new();
    let mut stretch = Ratio::ONE;
    for comp in g.connected_components() {
        let local: Vec<VertexId> = demand
            .iter()
            .copied()
            .filter(|&a| comp.contains(a))
            .collect();
        if local.is_empty() {
            let root = comp.min().expect("component is non-empty");
            trees.push(ComponentTree {
                tree: spt_tree(g, &comp, &dijkstra(g, root))?,
                demand: false,
            });
            continue;
        }
        let tag = comp.min().expect("component is non-empty") as u64;
        let (s, tree, call) = match strategy {
            SpanningStrategy::HstRealization => {
                realize(g, dm, &comp, &local, k, derive_seed(seed, &[tag]))?
            }
            SpanningStrategy::SptStar => spt_star(g, dm, &comp, &local, k)?,
        };
        let oracle = TreePathOracle::new(&tree)?;
        for &u in &s {
            for &v in &comp {
                if u == v {
                    continue;
                }
                let d = dm.get(u, v);
                if d == 0 {
                    return Err(RamseyError::ZeroDistance { x: u, y: v });
                }
                let dt = oracle.distance(u, v)?;
                if dt < d {
                    return Err(RamseyError::Verification(format!(
                        "forest contracts ({u}, {v})"
                    )));
                }
                stretch = stretch.max(Ratio::new(dt as u128, d as u128));
            }
        }
        subset.extend(s);
        trees.push(ComponentTree { tree, demand: true });
        calls.push(call);
    }
    subset.sort_unstable();
    debug_assert!(cardinality_ok(subset.len(), demand.len(), k));
    Ok(RamseyForest {
        subset: VertexSet::new(g.n(), subset),
        trees,
        stretch,
        calls,
    })
}
