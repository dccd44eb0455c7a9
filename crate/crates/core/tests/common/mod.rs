#![allow(dead_code)]

use treecover::graph::{Edge, Graph, VertexId, Weight, UNREACHABLE};

/// Floyd–Warshall, independent of the library's Dijkstra.
pub fn floyd(g: &Graph) -> Vec<Vec<Weight>> {
    let n = g.n();
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.w);
        d[e.v][e.u] = d[e.v][e.u].min(e.w);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == UNREACHABLE {
                continue;
            }
            for j in 0..n {
                if d[k][j] != UNREACHABLE && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Distances from `s` in a tree given by its edge list, by plain DFS.
pub fn tree_dists(n: usize, edges: &[Edge], s: VertexId) -> Vec<Weight> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    let mut d = vec![UNREACHABLE; n];
    d[s] = 0;
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        for &(y, w) in &adj[x] {
            if d[y] == UNREACHABLE {
                d[y] = d[x] + w;
                stack.push(y);
            }
        }
    }
    d
}

/// All-pairs tree distances over `n` global ids.
pub fn tree_matrix(n: usize, edges: &[Edge], nodes: &[VertexId]) -> Vec<Vec<Weight>> {
    let mut out = vec![Vec::new(); n];
    for &s in nodes {
        out[s] = tree_dists(n, edges, s);
    }
    out
}

/// Whether some shortest `u`–`v` path passes through `a`.
pub fn through(d: &[Vec<Weight>], u: VertexId, v: VertexId, a: &[VertexId]) -> bool {
    d[u][v] != UNREACHABLE
        && a.iter().any(|&x| {
            d[u][x] != UNREACHABLE && d[x][v] != UNREACHABLE && d[u][x] + d[x][v] == d[u][v]
        })
}

/// Checks `lo * d <= x` and `x * den <= num * d` exactly.
pub fn within(x: Weight, d: Weight, num: u128, den: u128) -> bool {
    x >= d && (x as u128) * den <= num * d as u128
}

/// Sums a path, checking that consecutive edges chain from `u` to `v`.
pub fn chain_weight(path: &[Edge], u: VertexId, v: VertexId) -> Option<Weight> {
    let mut at = u;
    let mut w = 0;
    for e in path {
        if e.u == at {
            at = e.v;
        } else if e.v == at {
            at = e.u;
        } else {
            return None;
        }
        w += e.w;
    }
    (at == v).then_some(w)
}

/// `ℓ(LCA(x, y))` by climbing parent pointers.
pub fn hst_dist(h: &treecover::ramsey::Hst, x: VertexId, y: VertexId) -> Weight {
    let nodes = h.nodes();
    let leaf = |p: VertexId| nodes.iter().position(|n| n.point == Some(p)).expect("leaf");
    let mut up = Vec::new();
    let mut a = Some(leaf(x));
    while let Some(i) = a {
        up.push(i);
        a = nodes[i].parent;
    }
    let mut b = leaf(y);
    loop {
        if up.contains(&b) {
            return nodes[b].label;
        }
        b = nodes[b].parent.expect("common root");
    }
}

/// All-pairs distances of a cover tree over `n` global ids; rows and
/// columns of non-members are `UNREACHABLE`.
pub fn cover_tree_matrix(n: usize, t: &treecover::cover::CoverTree) -> Vec<Vec<Weight>> {
    use treecover::cover::CoverTree;
    match t {
        CoverTree::Tree(t) => {
            let mut m = tree_matrix(n, t.edges(), t.nodes());
            for row in m.iter_mut() {
                if row.is_empty() {
                    row.resize(n, UNREACHABLE);
                }
            }
            m
        }
        CoverTree::Hst(h) => hst_matrix(n, h),
    }
}

/// All-pairs `ℓ(LCA)` over `n` global ids: every internal node labels the
/// pairs split between two of its children.
pub fn hst_matrix(n: usize, h: &treecover::ramsey::Hst) -> Vec<Vec<Weight>> {
    let nodes = h.nodes();
    let mut m = vec![vec![UNREACHABLE; n]; n];
    let mut below: Vec<Vec<VertexId>> = vec![Vec::new(); nodes.len()];
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    let mut depth = vec![0usize; nodes.len()];
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for &c in &nodes[x].children {
            depth[c] = depth[x] + 1;
            stack.push(c);
        }
    }
    order.sort_by_key(|&x| std::cmp::Reverse(depth[x]));
    for x in order {
        if let Some(p) = nodes[x].point {
            m[p][p] = 0;
            below[x].push(p);
            continue;
        }
        let kids = &nodes[x].children;
        for i in 0..kids.len() {
            for j in i + 1..kids.len() {
                for &a in &below[kids[i]] {
                    for &b in &below[kids[j]] {
                        m[a][b] = nodes[x].label;
                        m[b][a] = nodes[x].label;
                    }
                }
            }
        }
        let mut all = Vec::new();
        for &c in kids {
            all.append(&mut below[c]);
        }
        below[x] = all;
    }
    m
}

/// Min-over-trees estimate for every pair, and whether every tree
/// dominates `d` on the pairs it contains.
pub fn cover_estimates(
    d: &[Vec<Weight>],
    cover: &treecover::cover::Cover,
) -> (Vec<Vec<Weight>>, Option<(usize, VertexId, VertexId)>) {
    let n = cover.n;
    let mut best = vec![vec![UNREACHABLE; n]; n];
    let mut bad = None;
    for (i, t) in cover.trees.iter().enumerate() {
        let m = cover_tree_matrix(n, t);
        for u in 0..n {
            for v in 0..n {
                let x = m[u][v];
                if x == UNREACHABLE {
                    continue;
                }
                if x < d[u][v] && bad.is_none() {
                    bad = Some((i, u, v));
                }
                best[u][v] = best[u][v].min(x);
            }
        }
    }
    (best, bad)
}
