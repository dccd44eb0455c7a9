use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, VertexId, VertexSet, Weight, UNREACHABLE};

/// Single-source result: distances plus the parent edge of every reached vertex.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub source: VertexId,
    pub dist: Vec<Weight>,
    /// Index of the edge toward the source, `None` at the source and when unreached.
    pub parent_edge: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Edge indices of the tree path from `v` up to the source.
    pub fn path_edges(&self, g: &Graph, mut v: VertexId) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(e) = self.parent_edge[v] {
            out.push(e);
            v = g.edge(e).other(v);
        }
        out
    }
}

/// Dijkstra with deterministic tie handling: the first relaxation that
/// attains the final distance fixes the parent.
pub fn dijkstra(g: &Graph, source: VertexId) -> ShortestPaths {
    let n = g.n();
    let mut dist = vec![UNREACHABLE; n];
    let mut parent_edge = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0, source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, ei) in g.neighbors(x) {
            let nd = d + g.edge(ei).w;
            if nd < dist[y] {
                dist[y] = nd;
                parent_edge[y] = Some(ei);
                heap.push(Reverse((nd, y)));
            }
        }
    }
    ShortestPaths {
        source,
        dist,
        parent_edge,
    }
}

pub fn distances_from(g: &Graph, source: VertexId) -> Vec<Weight> {
    dijkstra(g, source).dist
}

/// For every vertex, the closest member of `set` (smallest id on ties) and
/// the distance to it. Unreached vertices get `(usize::MAX, UNREACHABLE)`.
pub fn nearest_member(g: &Graph, set: &VertexSet) -> Vec<(VertexId, Weight)> {
    nearest_member_paths(g, set).0
}

/// [`nearest_member`] together with the parent edge of every vertex on a
/// shortest path toward its chosen member.
pub fn nearest_member_paths(
    g: &Graph,
    set: &VertexSet,
) -> (Vec<(VertexId, Weight)>, Vec<Option<usize>>) {
    let n = g.n();
    let mut best = vec![(usize::MAX, UNREACHABLE); n];
    let mut parent_edge = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in set {
        best[s] = (s, 0);
        heap.push(Reverse((0, s, s)));
    }
    while let Some(Reverse((d, src, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, ei) in g.neighbors(x) {
            let cand = (d + g.edge(ei).w, src);
            if cand < (best[y].1, best[y].0) {
                best[y] = (src, cand.0);
                parent_edge[y] = Some(ei);
                heap.push(Reverse((cand.0, src, y)));
            }
        }
    }
    (best, parent_edge)
}

/// All-pairs exact distances, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<Weight>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<Weight>>) -> Self {
        let n = rows.len();
        let data = rows.into_iter().flatten().collect::<Vec<_>>();
        assert_eq!(data.len(), n * n, "distance rows must be square");
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: VertexId, v: VertexId) -> Weight {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: VertexId) -> &[Weight] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn reachable(&self, u: VertexId, v: VertexId) -> bool {
        self.get(u, v) != UNREACHABLE
    }

    /// Whether some member of `a` lies on a shortest `u`–`v` path.
    pub fn on_shortest_path(&self, u: VertexId, v: VertexId, a: &VertexSet) -> bool {
        let duv = self.get(u, v);
        if duv == UNREACHABLE {
            return false;
        }
        a.iter().any(|&x| {
            let (p, q) = (self.get(u, x), self.get(x, v));
            p != UNREACHABLE && q != UNREACHABLE && p + q == duv
        })
    }
}

/// One Dijkstra per source, in parallel; the result does not depend on scheduling.
pub fn exact_distances(g: &Graph) -> DistanceMatrix {
    let rows = (0..g.n())
        .into_par_iter()
        .map(|s| distances_from(g, s))
        .collect();
    DistanceMatrix::from_rows(rows)
}
