use serde::{Deserialize, Serialize};

use super::TreeError;
use crate::graph::{Edge, VertexId, Weight};

/// Largest root distance a tree may carry, leaving headroom for sums of two.
pub const MAX_TREE_DISTANCE: Weight = Weight::MAX / 4;

/// A weighted tree whose nodes are graph vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct Tree {
    nodes: Vec<VertexId>,
    edges: Vec<Edge>,
}

/// Unchecked form; deserialized trees are validated through [`Tree::new`].
#[derive(Deserialize)]
struct RawTree {
    nodes: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl TryFrom<RawTree> for Tree {
    type Error = TreeError;

    fn try_from(raw: RawTree) -> Result<Self, TreeError> {
        Tree::new(raw.nodes, raw.edges)
    }
}

impl Tree {
    /// Validates that `edges` form a spanning tree of `nodes`.
    pub fn new(
        nodes: impl IntoIterator<Item = VertexId>,
        edges: Vec<Edge>,
    ) -> Result<Self, TreeError> {
        let mut nodes: Vec<VertexId> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(TreeError::NotATree("no nodes".into()));
        }
        if edges.len() + 1 != nodes.len() {
            return Err(TreeError::NotATree(format!(
                "{} nodes but {} edges",
                nodes.len(),
                edges.len()
            )));
        }
        let t = Self { nodes, edges };
        let mut uf = crate::util::UnionFind::new(t.nodes.len());
        for e in &t.edges {
            let (a, b) = (t.local(e.u)?, t.local(e.v)?);
            if !uf.union(a, b) {
                return Err(TreeError::NotATree(format!(
                    "cycle through edge ({}, {})",
                    e.u, e.v
                )));
            }
        }
        Ok(t)
    }

    pub fn singleton(v: VertexId) -> Self {
        Self {
            nodes: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[VertexId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// Position of `v` in the sorted node list.
    pub fn local(&self, v: VertexId) -> Result<usize, TreeError> {
        self.nodes
            .binary_search(&v)
            .map_err(|_| TreeError::UnknownVertex(v))
    }

    /// The same tree with every node id passed through `f`.
    pub fn relabel(&self, f: impl Fn(VertexId) -> VertexId) -> Self {
        let mut nodes: Vec<VertexId> = self.nodes.iter().map(|&v| f(v)).collect();
        nodes.sort_unstable();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(f(e.u), f(e.v), e.w))
            .collect();
        Self { nodes, edges }
    }

    /// Test hook: the same tree with one edge weight replaced.
    pub fn with_edge_weight(&self, index: usize, w: Weight) -> Self {
        let mut t = self.clone();
        t.edges[index].w = w;
        t
    }

    /// Root at `root`, or at the smallest node.
    pub fn rooted(&self, root: Option<VertexId>) -> Result<RootedTree, TreeError> {
        RootedTree::build(self, root.unwrap_or(self.nodes[0]))
    }
}

/// A tree rooted and indexed locally (`0..len`, in sorted global-id order).
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub nodes: Vec<VertexId>,
    pub root: usize,
    pub parent: Vec<usize>,
    pub parent_weight: Vec<Weight>,
    pub children: Vec<Vec<usize>>,
    /// Local ids in preorder; children visited in ascending id order.
    pub preorder: Vec<usize>,
    pub depth: Vec<u32>,
    pub root_dist: Vec<Weight>,
}

pub const NONE: usize = usize::MAX;

impl RootedTree {
    fn build(t: &Tree, root: VertexId) -> Result<Self, TreeError> {
        let n = t.len();
        let root = t.local(root)?;
        let mut adj: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); n];
        for e in &t.edges {
            let (a, b) = (t.local(e.u)?, t.local(e.v)?);
            adj[a].push((b, e.w));
            adj[b].push((a, e.w));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut parent = vec![NONE; n];
        let mut parent_weight: Vec<Weight> = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0u32; n];
        let mut root_dist: Vec<Weight> = vec![0; n];
        let mut preorder = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(x) = stack.pop() {
            preorder.push(x);
            for &(y, w) in adj[x].iter().rev() {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = x;
                parent_weight[y] = w;
                depth[y] = depth[x] + 1;
                root_dist[y] = root_dist[x]
                    .checked_add(w)
                    .filter(|&d| d <= MAX_TREE_DISTANCE)
                    .ok_or(TreeError::Overflow)?;
                stack.push(y);
            }
        }
        for &x in &preorder {
            if parent[x] != NONE {
                children[parent[x]].push(x);
            }
        }
        if preorder.len() != n {
            return Err(TreeError::NotATree("disconnected".into()));
        }
        Ok(Self {
            nodes: t.nodes.clone(),
            root,
            parent,
            parent_weight,
            children,
            preorder,
            depth,
            root_dist,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn local(&self, v: VertexId) -> Result<usize, TreeError> {
        self.nodes
            .binary_search(&v)
            .map_err(|_| TreeError::UnknownVertex(v))
    }

    /// Undirected adjacency with weights, neighbors in ascending local id.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Weight)>> {
        let mut adj = vec![Vec::new(); self.len()];
        for x in 0..self.len() {
            if self.parent[x] != NONE {
                adj[x].push((self.parent[x], self.parent_weight[x]));
                adj[self.parent[x]].push((x, self.parent_weight[x]));
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}
