use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Cover, CoverError, CoverKind, CoverTree};
use crate::graph::{DistanceMatrix, VertexId, VertexSet, Weight, UNREACHABLE};
use crate::ramsey::Hst;
use crate::ratio::Ratio;
use crate::rng::rng_for;
use crate::treekit::TreePathOracle;

/// Largest `n` verified on all pairs.
pub const DEFAULT_VERIFY_CAP: usize = 500;

/// A tree that is shorter than the graph on some pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionWitness {
    pub tree: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub tree_distance: Weight,
    /// `None` when the pair is in different components of the graph.
    pub graph_distance: Option<Weight>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub n: usize,
    pub kind: CoverKind,
    pub full: bool,
    pub tree_count: usize,
    pub total_size: usize,
    pub max_overlap: usize,
    pub average_overlap: f64,
    /// Reachable pairs `u < v` in the checked domain.
    pub pairs: usize,
    /// Pairs of the domain contained in no tree.
    pub uncovered: usize,
    /// Largest min-over-trees stretch over covered pairs of the domain.
    pub max_stretch: Ratio,
    pub mean_stretch: f64,
    pub worst_pair: Option<(VertexId, VertexId)>,
    pub contraction: Option<ContractionWitness>,
    /// Demand set when the domain was restricted to pairs with a shortest
    /// path through it.
    pub restricted_to: Option<usize>,
    pub bound: Option<Ratio>,
    pub bound_ok: bool,
    /// `(pairs drawn, seed)` when pairs were sampled instead of enumerated.
    pub sampled: Option<(usize, u64)>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.contraction.is_none() && self.bound_ok
    }

    pub const CSV_HEADER: &'static str = "n,kind,full,tree_count,total_size,max_overlap,average_overlap,pairs,uncovered,max_stretch,mean_stretch,bound,bound_ok,non_contracting";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{},{},{},{:.6},{},{},{}",
            self.n,
            match self.kind {
                CoverKind::Spanning => "spanning",
                CoverKind::Metric => "metric",
                CoverKind::Hst => "hst",
            },
            self.full,
            self.tree_count,
            self.total_size,
            self.max_overlap,
            self.average_overlap,
            self.pairs,
            self.uncovered,
            self.max_stretch,
            self.mean_stretch,
            self.bound.map(|b| b.to_string()).unwrap_or_default(),
            self.bound_ok,
            self.contraction.is_none(),
        )
    }
}

/// Distance evaluator for one cover tree.
pub(crate) enum Evaluator<'a> {
    Tree(TreePathOracle),
    Hst(&'a Hst),
}

impl Evaluator<'_> {
    pub(crate) fn build(t: &CoverTree) -> Result<Evaluator<'_>, CoverError> {
        Ok(match t {
            CoverTree::Tree(t) => Evaluator::Tree(TreePathOracle::new(t)?),
            CoverTree::Hst(h) => Evaluator::Hst(h),
        })
    }

    pub(crate) fn distance(&self, u: VertexId, v: VertexId) -> Weight {
        match self {
            Evaluator::Tree(o) => o.distance(u, v).expect("member of the tree"),
            Evaluator::Hst(h) => h.distance(u, v).expect("leaf of the hst"),
        }
    }
}

/// Statistics accumulated over a set of pairs.
#[derive(Clone, Debug, Default)]
pub(crate) struct PairStats {
    pub pairs: usize,
    pub uncovered: usize,
    pub max: Option<(Ratio, VertexId, VertexId)>,
    pub sum: f64,
    pub contraction: Option<ContractionWitness>,
}

impl PairStats {
    pub(crate) fn merge(&mut self, o: PairStats) {
        self.pairs += o.pairs;
        self.uncovered += o.uncovered;
        if let Some(m) = o.max {
            if self.max.as_ref().is_none_or(|x| m.0 > x.0) {
                self.max = Some(m);
            }
        }
        self.sum += o.sum;
        if self.contraction.is_none() {
            self.contraction = o.contraction;
        }
    }
}

/// Checks one pair against every tree containing both endpoints.
/// `in_domain` selects whether it counts toward stretch statistics.
pub(crate) fn check_pair(
    evals: &[Evaluator],
    membership: &[Vec<usize>],
    dm: &DistanceMatrix,
    u: VertexId,
    v: VertexId,
    in_domain: bool,
    stats: &mut PairStats,
) {
    let d = dm.get(u, v);
    let (a, b) = (&membership[u], &membership[v]);
    let (mut i, mut j) = (0, 0);
    let mut best = UNREACHABLE;
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            i += 1;
        } else if a[i] > b[j] {
            j += 1;
        } else {
            let t = a[i];
            let dt = evals[t].distance(u, v);
            if (d == UNREACHABLE || dt < d) && stats.contraction.is_none() {
                stats.contraction = Some(ContractionWitness {
                    tree: t,
                    u,
                    v,
                    tree_distance: dt,
                    graph_distance: (d != UNREACHABLE).then_some(d),
                });
            }
            best = best.min(dt);
            i += 1;
            j += 1;
        }
    }
    if !in_domain || d == UNREACHABLE {
        return;
    }
    stats.pairs += 1;
    if best == UNREACHABLE {
        stats.uncovered += 1;
        return;
    }
    let r = Ratio::new(best as u128, d as u128);
    stats.sum += r.to_f64();
    if stats.max.as_ref().is_none_or(|m| r > m.0) {
        stats.max = Some((r, u, v));
    }
}

pub(crate) fn assemble(
    cover: &Cover,
    membership: &[Vec<usize>],
    stats: PairStats,
    restricted_to: Option<usize>,
    bound: Option<Ratio>,
) -> CoverReport {
    let max_stretch = stats.max.as_ref().map(|m| m.0).unwrap_or(Ratio::ONE);
    let bound_ok = stats.uncovered == 0 && bound.is_none_or(|b| max_stretch <= b);
    CoverReport {
        n: cover.n,
        kind: cover.kind,
        full: cover.full,
        tree_count: cover.tree_count(),
        total_size: cover.total_size(),
        max_overlap: membership.iter().map(Vec::len).max().unwrap_or(0),
        average_overlap: cover.average_overlap(),
        pairs: stats.pairs,
        uncovered: stats.uncovered,
        max_stretch,
        mean_stretch: if stats.pairs > stats.uncovered {
            stats.sum / (stats.pairs - stats.uncovered) as f64
        } else {
            1.0
        },
        worst_pair: stats.max.map(|m| (m.1, m.2)),
        contraction: stats.contraction,
        restricted_to,
        bound,
        bound_ok,
        sampled: None,
    }
}

/// Exhaustive check of a cover against exact distances `dm` of `g`:
/// non-contraction of every tree on every pair it contains, and the
/// min-over-trees stretch on every reachable pair, or only on pairs with a
/// shortest path through `pred` when given. The cover passes when no tree
/// contracts, every pair of the domain is covered, and the stretch stays
/// within `bound`.
pub fn verify_cover(
    dm: &DistanceMatrix,
    cover: &Cover,
    pred: Option<&VertexSet>,
    bound: Option<Ratio>,
    cap: usize,
) -> Result<CoverReport, CoverError> {
    let n = cover.n;
    if dm.n() != n {
        return Err(CoverError::Invalid(format!(
            "distance matrix is for {} vertices, cover for {n}",
            dm.n()
        )));
    }
    if n > cap {
        return Err(CoverError::CapExceeded { n, cap });
    }
    let evals: Vec<Evaluator> = cover
        .trees
        .iter()
        .map(Evaluator::build)
        .collect::<Result<_, _>>()?;
    let membership = cover.membership();
    let rows: Vec<PairStats> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut s = PairStats::default();
            for v in u + 1..n {
                let in_domain = pred.is_none_or(|a| dm.on_shortest_path(u, v, a));
                check_pair(&evals, &membership, dm, u, v, in_domain, &mut s);
            }
            s
        })
        .collect();
    let mut stats = PairStats::default();
    for r in rows {
        stats.merge(r);
    }
    Ok(assemble(
        cover,
        &membership,
        stats,
        pred.map(VertexSet::len),
        bound,
    ))
}

/// Pairs drawn by [`verify_cover_sampled`] when `n` exceeds the
/// exhaustive cap.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Like [`verify_cover`] on all pairs, but over `samples` uniform pairs
/// `u != v` drawn from `seed`. Every drawn pair counts, duplicates
/// included.
pub fn verify_cover_sampled(
    dm: &DistanceMatrix,
    cover: &Cover,
    bound: Option<Ratio>,
    samples: usize,
    seed: u64,
) -> Result<CoverReport, CoverError> {
    use rand::Rng;
    let n = cover.n;
    if dm.n() != n {
        return Err(CoverError::Invalid(format!(
            "distance matrix is for {} vertices, cover for {n}",
            dm.n()
        )));
    }
    if n < 2 {
        return verify_cover(dm, cover, None, bound, n.max(1));
    }
    let mut rng = rng_for(seed, &[0x7361]);
    let pairs: Vec<(VertexId, VertexId)> = (0..samples)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            (u.min(v), u.max(v))
        })
        .collect();
    let evals: Vec<Evaluator> = cover
        .trees
        .iter()
        .map(Evaluator::build)
        .collect::<Result<_, _>>()?;
    let membership = cover.membership();
    let chunks: Vec<PairStats> = pairs
        .par_chunks(4096)
        .map(|chunk| {
            let mut s = PairStats::default();
            for &(u, v) in chunk {
                check_pair(&evals, &membership, dm, u, v, true, &mut s);
            }
            s
        })
        .collect();
    let mut stats = PairStats::default();
    for c in chunks {
        stats.merge(c);
    }
    let mut r = assemble(cover, &membership, stats, None, bound);
    r.sampled = Some((samples, seed));
    Ok(r)
}
