use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BuildTrace, Cover, CoverError, CoverKind, CoverTree, NodeRecord, PairwiseRecord};
use crate::graph::{exact_distances, Edge, Graph, VertexId, VertexSet, Weight};
use crate::ramsey::{
    ramsey_tree_pair, spanning_ramsey_forest, FiniteMetric, Hst, RamseyCall, SpanningStrategy,
};
use crate::ratio::Ratio;
use crate::rng::derive_seed;
use crate::separator::{SeparatorMethod, SeparatorProvider};
use crate::treekit::Tree;
use crate::util::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverConfig {
    pub k: u32,
    pub kind: CoverKind,
    pub full: bool,
    pub seed: u64,
    #[serde(default)]
    pub strategy: SpanningStrategy,
}

impl CoverConfig {
    pub fn new(k: u32, kind: CoverKind) -> Self {
        Self {
            k,
            kind,
            full: false,
            seed: 0,
            strategy: SpanningStrategy::default(),
        }
    }

    pub fn full(mut self, full: bool) -> Self {
        self.full = full;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn strategy(mut self, strategy: SpanningStrategy) -> Self {
        self.strategy = strategy;
        self
    }
}

/// Trees of one build step, in global ids, with their trace.
struct Part {
    trees: Vec<CoverTree>,
    trace: BuildTrace,
    alpha: Ratio,
    stretch: Ratio,
}

impl Part {
    fn new() -> Self {
        Self {
            trees: Vec::new(),
            trace: BuildTrace::default(),
            alpha: Ratio::ONE,
            stretch: Ratio::ONE,
        }
    }

    fn absorb(&mut self, other: Part) {
        self.trees.extend(other.trees);
        self.absorb_stats(other.trace, other.alpha, other.stretch);
    }

    fn absorb_stats(&mut self, trace: BuildTrace, alpha: Ratio, stretch: Ratio) {
        self.trace.absorb(trace);
        self.alpha = self.alpha.max(alpha);
        self.stretch = self.stretch.max(stretch);
    }
}

fn check_input(g: &Graph) -> Result<Weight, CoverError> {
    if g.n() == 0 {
        return Err(CoverError::Invalid("the graph has no vertices".into()));
    }
    if let Some(e) = g.edges().iter().find(|e| e.w == 0) {
        return Err(CoverError::ZeroWeight { u: e.u, v: e.v });
    }
    Ok(g.diameter_bound()?)
}

/// Extends an acyclic edge set `forest ⊆ E(G)` to a spanning tree of every
/// component of `g`, scanning the remaining edges in edge-list order and
/// keeping those that join two trees. One tree per component, by minimum
/// vertex id.
pub fn extend_forest_to_spanning_tree(g: &Graph, forest: &[Edge]) -> Result<Vec<Tree>, CoverError> {
    let mut uf = UnionFind::new(g.n());
    let mut edges = Vec::with_capacity(g.n());
    for e in forest {
        if e.u >= g.n() || e.v >= g.n() || g.edge_weight(e.u, e.v) != Some(e.w) {
            return Err(CoverError::Invalid(format!(
                "({}, {}, {}) is not an edge of the graph",
                e.u, e.v, e.w
            )));
        }
        if !uf.union(e.u, e.v) {
            return Err(CoverError::Invalid(format!(
                "the forest has a cycle through ({}, {})",
                e.u, e.v
            )));
        }
        edges.push(*e);
    }
    for e in g.edges() {
        if uf.union(e.u, e.v) {
            edges.push(*e);
        }
    }
    let labels = g.component_labels();
    let comps = g.connected_components();
    let mut per: Vec<Vec<Edge>> = vec![Vec::new(); comps.len()];
    for e in edges {
        per[labels[e.u]].push(e);
    }
    comps
        .iter()
        .zip(per)
        .map(|(c, es)| Ok(Tree::new(c.iter().copied(), es)?))
        .collect()
}

struct PairwiseParams {
    k: u32,
    kind: CoverKind,
    seed: u64,
    extended: bool,
    cap: Weight,
    strategy: SpanningStrategy,
    depth: usize,
}

/// The Ramsey recursion for demand set `demand` (ids of `g`): repeatedly
/// take a Ramsey subset of what is left of the demand set, record its tree,
/// and delete the subset from the graph.
fn pairwise(
    g: &Graph,
    to_global: &[VertexId],
    demand: &VertexSet,
    p: &PairwiseParams,
) -> Result<Part, CoverError> {
    if demand.is_empty() {
        return Err(CoverError::EmptyDemand);
    }
    let extend = p.extended && p.kind == CoverKind::Spanning && g.is_connected();
    let mut out = Part::new();
    let mut cur = g.clone();
    let mut cur_map: Vec<usize> = (0..g.n()).collect();
    let mut a_cur = demand.clone();
    let mut levels = 0;
    while !a_cur.is_empty() {
        let seed = derive_seed(p.seed, &[levels as u64]);
        let dm = exact_distances(&cur);
        let global = |x: VertexId| to_global[cur_map[x]];
        let removed = match p.kind {
            CoverKind::Spanning => {
                let f = spanning_ramsey_forest(&cur, &dm, &a_cur, p.k, p.strategy, seed)?;
                out.stretch = out.stretch.max(f.stretch);
                out.trace.ramsey_calls.extend(f.calls);
                let demand_trees = f.trees.iter().filter(|t| t.demand).map(|t| &t.tree);
                if extend {
                    let edges: Vec<Edge> = demand_trees
                        .flat_map(|t| {
                            t.edges()
                                .iter()
                                .map(|e| Edge::new(cur_map[e.u], cur_map[e.v], e.w))
                        })
                        .collect();
                    for t in extend_forest_to_spanning_tree(g, &edges)? {
                        out.trees.push(CoverTree::Tree(t.relabel(|x| to_global[x])));
                    }
                } else {
                    for t in demand_trees {
                        out.trees.push(CoverTree::Tree(t.relabel(global)));
                    }
                }
                f.subset
            }
            CoverKind::Metric | CoverKind::Hst => {
                let points: Vec<VertexId> = (0..cur.n()).collect();
                let metric = FiniteMetric::restrict(&dm, &points, p.cap);
                let pair = ramsey_tree_pair(&metric, a_cur.as_slice(), p.k, seed)?;
                out.trace.conversions += 1;
                out.trace.extensions += 1;
                let o = &pair.outcome;
                out.alpha = out.alpha.max(o.alpha);
                out.trace.ramsey_calls.push(RamseyCall {
                    demand: o.points.len(),
                    kept: o.subset.len(),
                    k: p.k,
                    alpha: o.alpha,
                    attempts: o.attempts,
                    fallback: o.fallback,
                });
                out.trees.push(match p.kind {
                    CoverKind::Metric => CoverTree::Tree(pair.t2.relabel(global)),
                    _ => CoverTree::Hst(pair.t1.relabel(global)),
                });
                VertexSet::new(cur.n(), o.subset.iter().copied())
            }
        };
        levels += 1;
        let sub = cur.induced_subgraph(&removed.complement())?;
        a_cur = VertexSet::new(
            sub.graph.n(),
            a_cur
                .difference(&removed)
                .iter()
                .map(|&x| sub.from_parent[x]),
        );
        cur_map = sub.to_parent.iter().map(|&x| cur_map[x]).collect();
        cur = sub.graph;
    }
    out.trace.pairwise.push(PairwiseRecord {
        depth: p.depth,
        n: g.n(),
        t: demand.len(),
        levels,
        trees: out.trees.len(),
        total_size: out.trees.iter().map(CoverTree::len).sum(),
        extended: extend,
        stretch: out.stretch,
        alpha: out.alpha,
    });
    Ok(out)
}

fn finish(g: &Graph, kind: CoverKind, full: bool, k: u32, cap: Weight, part: Part) -> Cover {
    Cover {
        n: g.n(),
        kind,
        full,
        k,
        trees: part.trees,
        alpha: part.alpha,
        spanning_stretch: part.stretch,
        glue_sentinel: cap,
        trace: part.trace,
    }
}

/// Pairwise spanning collection for demand set `a`. With `extended` and a
/// connected graph, every level contributes one spanning tree of `g`
/// instead of the trees of its forest.
pub fn pairwise_spanning_collection(
    g: &Graph,
    a: &VertexSet,
    k: u32,
    seed: u64,
    extended: bool,
    strategy: SpanningStrategy,
) -> Result<Cover, CoverError> {
    let cap = check_input(g)?;
    let ids: Vec<VertexId> = (0..g.n()).collect();
    let p = PairwiseParams {
        k,
        kind: CoverKind::Spanning,
        seed,
        extended,
        cap,
        strategy,
        depth: 0,
    };
    let part = pairwise(g, &ids, a, &p)?;
    Ok(finish(g, CoverKind::Spanning, false, k, cap, part))
}

/// Pairwise collection of metric trees (`kind = Metric`) or HSTs
/// (`kind = Hst`) for demand set `a`.
pub fn pairwise_metric_collection(
    g: &Graph,
    a: &VertexSet,
    k: u32,
    seed: u64,
    kind: CoverKind,
) -> Result<Cover, CoverError> {
    if kind == CoverKind::Spanning {
        return Err(CoverError::Invalid(
            "use the spanning collection for spanning covers".into(),
        ));
    }
    let cap = check_input(g)?;
    // Trees over several components would be finite where the graph is not.
    if !g.is_connected() {
        return Err(CoverError::Disconnected);
    }
    let ids: Vec<VertexId> = (0..g.n()).collect();
    let p = PairwiseParams {
        k,
        kind,
        seed,
        extended: false,
        cap,
        strategy: SpanningStrategy::default(),
        depth: 0,
    };
    let part = pairwise(g, &ids, a, &p)?;
    Ok(finish(g, kind, false, k, cap, part))
}

struct Ctx<'a> {
    provider: &'a SeparatorProvider,
    cfg: &'a CoverConfig,
    cap: Weight,
}

fn singleton(kind: CoverKind, v: VertexId) -> CoverTree {
    match kind {
        CoverKind::Hst => CoverTree::Hst(Hst::singleton(v)),
        _ => CoverTree::Tree(Tree::singleton(v)),
    }
}

/// `tree` completed to all of `all` (sorted) with sentinel edges to its
/// smallest vertex, or for HSTs with a new sentinel-labelled root.
fn complete(tree: CoverTree, all: &[VertexId], cap: Weight) -> Result<CoverTree, CoverError> {
    let have = tree.vertices();
    let missing: Vec<VertexId> = all
        .iter()
        .copied()
        .filter(|v| have.binary_search(v).is_err())
        .collect();
    if missing.is_empty() {
        return Ok(tree);
    }
    Ok(match tree {
        CoverTree::Tree(t) => {
            let hub = t.nodes()[0];
            let mut edges = t.edges().to_vec();
            edges.extend(missing.iter().map(|&v| Edge::new(v, hub, cap)));
            CoverTree::Tree(Tree::new(all.iter().copied(), edges)?)
        }
        CoverTree::Hst(h) => CoverTree::Hst(Hst::join(cap.max(h.root_label()), &[h], &missing)),
    })
}

/// Glues the `j`-th trees of the components into one tree over `all`.
fn glue(
    g: &Graph,
    all: &[VertexId],
    kind: CoverKind,
    parts: Vec<&CoverTree>,
    cap: Weight,
) -> Result<CoverTree, CoverError> {
    let local = |v: VertexId| {
        all.binary_search(&v)
            .expect("glued vertex belongs to the node")
    };
    match kind {
        CoverKind::Spanning => {
            let edges: Vec<Edge> = parts
                .iter()
                .flat_map(|t| t.as_tree().expect("spanning parts are trees").edges())
                .map(|e| Edge::new(local(e.u), local(e.v), e.w))
                .collect();
            let mut trees = extend_forest_to_spanning_tree(g, &edges)?;
            if trees.len() != 1 {
                return Err(CoverError::Disconnected);
            }
            Ok(CoverTree::Tree(trees.remove(0).relabel(|x| all[x])))
        }
        CoverKind::Metric => {
            let root = all[0];
            let mut present = vec![false; all.len()];
            let mut edges = Vec::new();
            for t in &parts {
                let t = t.as_tree().expect("metric parts are trees");
                edges.extend_from_slice(t.edges());
                for &v in t.nodes() {
                    present[local(v)] = true;
                }
                if !t.contains(root) {
                    edges.push(Edge::new(t.nodes()[0], root, cap));
                }
            }
            for (i, &v) in all.iter().enumerate() {
                if !present[i] && v != root {
                    edges.push(Edge::new(v, root, cap));
                }
            }
            Ok(CoverTree::Tree(Tree::new(all.iter().copied(), edges)?))
        }
        CoverKind::Hst => {
            let hsts: Vec<Hst> = parts
                .iter()
                .map(|t| t.as_hst().expect("hst parts are hsts").clone())
                .collect();
            let mut present = vec![false; all.len()];
            for h in &hsts {
                for v in h.points() {
                    present[local(v)] = true;
                }
            }
            let missing: Vec<VertexId> = (0..all.len())
                .filter(|&i| !present[i])
                .map(|i| all[i])
                .collect();
            let label = hsts.iter().map(Hst::root_label).fold(cap, Weight::max);
            Ok(CoverTree::Hst(Hst::join(label, &hsts, &missing)))
        }
    }
}

/// One node of the separator recursion on `g`, whose vertex `i` is global
/// vertex `to_global[i]` (ascending).
fn node(ctx: &Ctx, g: &Graph, to_global: &[VertexId], depth: usize) -> Result<Part, CoverError> {
    let cfg = ctx.cfg;
    let mut out = Part::new();
    out.trace.max_depth = depth;
    if g.n() == 1 {
        out.trees.push(singleton(cfg.kind, to_global[0]));
        out.trace.nodes.push(NodeRecord {
            depth,
            size: 1,
            min_vertex: to_global[0],
            separator: 1,
            method: SeparatorMethod::Trivial,
        });
        return Ok(out);
    }
    let sep = ctx.provider.separate(g, to_global)?;
    out.trace.nodes.push(NodeRecord {
        depth,
        size: g.n(),
        min_vertex: to_global[0],
        separator: sep.set.len(),
        method: sep.method,
    });
    let params = PairwiseParams {
        k: cfg.k,
        kind: cfg.kind,
        seed: derive_seed(cfg.seed, &[to_global[0] as u64, depth as u64]),
        extended: cfg.full,
        cap: ctx.cap,
        strategy: cfg.strategy,
        depth,
    };
    let mut pair = pairwise(g, to_global, &sep.set, &params)?;
    let rest = g.induced_subgraph(&sep.set.complement())?;
    let children: Vec<Part> = rest
        .graph
        .connected_components()
        .par_iter()
        .map(|c| {
            let sub = rest.graph.induced_subgraph(c)?;
            let ids: Vec<VertexId> = sub
                .to_parent
                .iter()
                .map(|&x| to_global[rest.to_parent[x]])
                .collect();
            node(ctx, &sub.graph, &ids, depth + 1)
        })
        .collect::<Result<_, _>>()?;
    if !cfg.full {
        out.absorb(pair);
        for c in children {
            out.absorb(c);
        }
        return Ok(out);
    }
    for t in std::mem::take(&mut pair.trees) {
        out.trees.push(complete(t, to_global, ctx.cap)?);
    }
    out.absorb_stats(pair.trace, pair.alpha, pair.stretch);
    let rounds = children.iter().map(|c| c.trees.len()).max().unwrap_or(0);
    for j in 0..rounds {
        let parts: Vec<&CoverTree> = children.iter().filter_map(|c| c.trees.get(j)).collect();
        out.trees
            .push(glue(g, to_global, cfg.kind, parts, ctx.cap)?);
    }
    for c in children {
        out.absorb_stats(c.trace, c.alpha, c.stretch);
    }
    Ok(out)
}

/// Tree cover from recursive balanced separators: a pairwise collection
/// for each separator, recursing into the components left after removing
/// it. With `full`, the component covers are glued level by level so that
/// every tree spans all vertices.
pub fn separator_recursion_cover(
    g: &Graph,
    provider: &SeparatorProvider,
    cfg: &CoverConfig,
) -> Result<Cover, CoverError> {
    let cap = check_input(g)?;
    let connected = g.is_connected();
    if cfg.full && !connected {
        return Err(CoverError::Disconnected);
    }
    let ctx = Ctx { provider, cfg, cap };
    let part = if connected {
        let ids: Vec<VertexId> = (0..g.n()).collect();
        node(&ctx, g, &ids, 0)?
    } else {
        let parts: Vec<Part> = g
            .connected_components()
            .par_iter()
            .map(|c| {
                let sub = g.induced_subgraph(c)?;
                node(&ctx, &sub.graph, &sub.to_parent, 0)
            })
            .collect::<Result<_, CoverError>>()?;
        let mut all = Part::new();
        for p in parts {
            all.absorb(p);
        }
        all
    };
    Ok(finish(g, cfg.kind, cfg.full, cfg.k, cap, part))
}

fn general(
    g: &Graph,
    to_global: &[VertexId],
    k: u32,
    seed: u64,
    strategy: SpanningStrategy,
    depth: usize,
) -> Result<Part, CoverError> {
    let mut out = Part::new();
    out.trace.max_depth = depth;
    let dm = exact_distances(g);
    let f = spanning_ramsey_forest(
        g,
        &dm,
        &g.all_vertices(),
        k,
        strategy,
        derive_seed(seed, &[to_global[0] as u64]),
    )?;
    out.stretch = f.stretch;
    out.trace.ramsey_calls.extend(f.calls);
    for t in &f.trees {
        out.trees
            .push(CoverTree::Tree(t.tree.relabel(|x| to_global[x])));
    }
    let rest = g.induced_subgraph(&f.subset.complement())?;
    let children: Vec<Part> = rest
        .graph
        .connected_components()
        .par_iter()
        .map(|c| {
            let sub = rest.graph.induced_subgraph(c)?;
            let ids: Vec<VertexId> = sub
                .to_parent
                .iter()
                .map(|&x| to_global[rest.to_parent[x]])
                .collect();
            general(&sub.graph, &ids, k, seed, strategy, depth + 1)
        })
        .collect::<Result<_, _>>()?;
    for c in children {
        out.absorb(c);
    }
    Ok(out)
}

/// Cover with small average overlap: take a spanning Ramsey forest with
/// the whole vertex set as demand, delete its subset, and recurse into each
/// remaining component independently.
pub fn ramsey_cover_general(
    g: &Graph,
    k: u32,
    seed: u64,
    strategy: SpanningStrategy,
) -> Result<Cover, CoverError> {
    let cap = check_input(g)?;
    if !g.is_connected() {
        return Err(CoverError::Disconnected);
    }
    let ids: Vec<VertexId> = (0..g.n()).collect();
    let part = general(g, &ids, k, seed, strategy, 0)?;
    Ok(finish(g, CoverKind::Spanning, false, k, cap, part))
}
