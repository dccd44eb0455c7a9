use serde::{Deserialize, Serialize};

use super::{FiniteMetric, RamseyError};
use crate::graph::{Edge, VertexId, Weight};
use crate::treekit::{LcaOracle, Tree, TreePathOracle};
use crate::util::UnionFind;

/// Dense ultrametric over a list of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ultrametric {
    points: Vec<VertexId>,
    rho: Vec<Weight>,
}

impl Ultrametric {
    pub fn new(points: Vec<VertexId>, rho: Vec<Weight>) -> Self {
        assert_eq!(
            rho.len(),
            points.len() * points.len(),
            "ultrametric must be square"
        );
        Self { points, rho }
    }

    pub fn from_fn(points: Vec<VertexId>, f: impl Fn(usize, usize) -> Weight) -> Self {
        let m = points.len();
        let mut rho = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    rho[i * m + j] = f(i, j);
                }
            }
        }
        Self { points, rho }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[VertexId] {
        &self.points
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.rho[i * self.points.len() + j]
    }

    /// First triple breaking `ρ(x,z) <= max(ρ(x,y), ρ(y,z))`, or asymmetry.
    pub fn strong_triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let m = self.len();
        for i in 0..m {
            if self.get(i, i) != 0 {
                return Some((i, i, i));
            }
            for j in 0..m {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j, i));
                }
                for k in 0..m {
                    if self.get(i, k) > self.get(i, j).max(self.get(j, k)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// First pair with `ρ < d`, over the shared local indexing.
    pub fn domination_violation(&self, metric: &FiniteMetric) -> Option<(usize, usize)> {
        let m = self.len();
        (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) < metric.get(i, j))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HstNode {
    pub label: Weight,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The point at a leaf.
    pub point: Option<VertexId>,
}

/// A labelled rooted tree whose leaves are points; `ℓ(LCA(x, y))` is the
/// distance. Kept canonical: node 0 is the root, nodes are in preorder,
/// children are ordered by smallest leaf, no internal node has one child,
/// and labels strictly decrease from an internal node to an internal child.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawHst", into = "RawHst")]
pub struct Hst {
    nodes: Vec<HstNode>,
    /// `(point, leaf node)`, sorted by point.
    leaves: Vec<(VertexId, usize)>,
    lca: LcaOracle,
}

#[derive(Serialize, Deserialize)]
struct RawHst {
    nodes: Vec<HstNode>,
}

impl TryFrom<RawHst> for Hst {
    type Error = String;

    /// Checks the parent/child links before building query structures;
    /// label shape is left to [`Hst::shape_violation`].
    fn try_from(raw: RawHst) -> Result<Self, String> {
        let nodes = raw.nodes;
        if nodes.is_empty() || nodes[0].parent.is_some() {
            return Err("node 0 must be a root".into());
        }
        let mut seen = vec![false; nodes.len()];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut points = Vec::new();
        while let Some(x) = stack.pop() {
            if nodes[x].children.is_empty() != nodes[x].point.is_some() {
                return Err(format!("node {x}: exactly the leaves carry points"));
            }
            points.extend(nodes[x].point);
            for &c in &nodes[x].children {
                if c >= nodes.len() || seen[c] || nodes[c].parent != Some(x) {
                    return Err(format!("node {x}: bad child {c}"));
                }
                seen[c] = true;
                stack.push(c);
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err("unreachable nodes".into());
        }
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err("repeated point".into());
        }
        Ok(Hst::from_canonical_nodes(nodes))
    }
}

impl From<Hst> for RawHst {
    fn from(h: Hst) -> Self {
        RawHst { nodes: h.nodes }
    }
}

impl PartialEq for Hst {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl Eq for Hst {}

/// Scratch node used while assembling a dendrogram.
#[derive(Clone, Debug)]
pub(crate) struct DraftNode {
    pub label: Weight,
    pub children: Vec<usize>,
    pub point: Option<VertexId>,
}

impl Hst {
    pub fn singleton(v: VertexId) -> Self {
        Self::from_canonical_nodes(vec![HstNode {
            label: 0,
            parent: None,
            children: vec![],
            point: Some(v),
        }])
    }

    fn from_canonical_nodes(nodes: Vec<HstNode>) -> Self {
        let children: Vec<Vec<usize>> = nodes.iter().map(|x| x.children.clone()).collect();
        let lca = LcaOracle::new(&children, 0);
        let mut leaves: Vec<(VertexId, usize)> = nodes
            .iter()
            .enumerate()
            .filter_map(|(i, x)| x.point.map(|p| (p, i)))
            .collect();
        leaves.sort_unstable();
        Self { nodes, leaves, lca }
    }

    /// Canonicalizes an arbitrary draft rooted at `root`: merges internal
    /// children whose label equals the parent's, splices out unary nodes,
    /// orders children by smallest leaf and renumbers in preorder.
    pub(crate) fn from_draft(draft: &[DraftNode], root: usize) -> Self {
        let internal = |x: usize| draft[x].point.is_none();
        let skip_unary = |mut x: usize| {
            while internal(x) && draft[x].children.len() == 1 {
                x = draft[x].children[0];
            }
            x
        };
        let resolve = |x: usize| -> Vec<usize> {
            let mut out = Vec::new();
            let mut stack: Vec<usize> = draft[x].children.iter().rev().copied().collect();
            while let Some(c) = stack.pop() {
                let c = skip_unary(c);
                if internal(c) && draft[c].children.is_empty() {
                    continue;
                }
                if internal(c) && draft[c].label == draft[x].label {
                    stack.extend(draft[c].children.iter().rev().copied());
                } else {
                    out.push(c);
                }
            }
            out
        };
        let root = skip_unary(root);
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); draft.len()];
        let mut order = vec![root];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            if internal(x) {
                kids[x] = resolve(x);
                order.extend(kids[x].iter().copied());
            }
        }
        let mut min_leaf = vec![VertexId::MAX; draft.len()];
        for &x in order.iter().rev() {
            min_leaf[x] = match draft[x].point {
                Some(p) => p,
                None => kids[x]
                    .iter()
                    .map(|&c| min_leaf[c])
                    .min()
                    .unwrap_or(VertexId::MAX),
            };
        }
        for k in &mut kids {
            k.sort_by_key(|&c| min_leaf[c]);
        }
        let mut nodes: Vec<HstNode> = Vec::with_capacity(order.len());
        let mut stack = vec![(root, None::<usize>)];
        while let Some((x, parent)) = stack.pop() {
            let id = nodes.len();
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            let label = if internal(x) { draft[x].label } else { 0 };
            nodes.push(HstNode {
                label,
                parent,
                children: Vec::new(),
                point: draft[x].point,
            });
            for &c in kids[x].iter().rev() {
                stack.push((c, Some(id)));
            }
        }
        Self::from_canonical_nodes(nodes)
    }

    pub fn nodes(&self) -> &[HstNode] {
        &self.nodes
    }

    pub fn root_label(&self) -> Weight {
        self.nodes[0].label
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Leaf points in ascending order.
    pub fn points(&self) -> Vec<VertexId> {
        self.leaves.iter().map(|&(p, _)| p).collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.leaf(v).is_some()
    }

    pub fn leaf(&self, v: VertexId) -> Option<usize> {
        self.leaves
            .binary_search_by_key(&v, |&(p, _)| p)
            .ok()
            .map(|i| self.leaves[i].1)
    }

    pub fn lca_node(&self, a: usize, b: usize) -> usize {
        self.lca.query(a, b)
    }

    /// `ℓ(LCA(x, y))`, or `None` if either point is missing.
    pub fn distance(&self, x: VertexId, y: VertexId) -> Option<Weight> {
        let (a, b) = (self.leaf(x)?, self.leaf(y)?);
        Some(self.nodes[self.lca.query(a, b)].label)
    }

    pub fn to_ultrametric(&self) -> Ultrametric {
        let points = self.points();
        let leaf: Vec<usize> = self.leaves.iter().map(|&(_, n)| n).collect();
        Ultrametric::from_fn(points, |i, j| {
            self.nodes[self.lca.query(leaf[i], leaf[j])].label
        })
    }

    /// Structural problems: label monotonicity, leaf labels, unary nodes.
    pub fn shape_violation(&self) -> Option<String> {
        for (i, x) in self.nodes.iter().enumerate() {
            if x.point.is_some() && (x.label != 0 || !x.children.is_empty()) {
                return Some(format!("leaf node {i} has label {} or children", x.label));
            }
            if x.point.is_none() && x.children.len() < 2 {
                return Some(format!(
                    "internal node {i} has {} children",
                    x.children.len()
                ));
            }
            if let Some(p) = x.parent {
                if x.label > self.nodes[p].label {
                    return Some(format!("node {i} label exceeds its parent's"));
                }
            }
        }
        None
    }

    /// The same HST with every point id passed through `f` (injective).
    pub fn relabel(&self, f: impl Fn(VertexId) -> VertexId) -> Self {
        let draft: Vec<DraftNode> = self
            .nodes
            .iter()
            .map(|x| DraftNode {
                label: x.label,
                children: x.children.clone(),
                point: x.point.map(&f),
            })
            .collect();
        Hst::from_draft(&draft, 0)
    }

    /// A new root labelled `label` over the given HSTs and extra leaf points.
    /// `label` must be at least every part's root label.
    pub fn join(label: Weight, parts: &[Hst], extra: &[VertexId]) -> Self {
        let mut draft = vec![DraftNode {
            label,
            children: vec![],
            point: None,
        }];
        for h in parts {
            let base = draft.len();
            draft[0].children.push(base);
            draft.extend(h.nodes.iter().map(|x| DraftNode {
                label: x.label,
                children: x.children.iter().map(|c| c + base).collect(),
                point: x.point,
            }));
        }
        for &p in extra {
            let id = draft.len();
            draft[0].children.push(id);
            draft.push(DraftNode {
                label: 0,
                children: vec![],
                point: Some(p),
            });
        }
        Hst::from_draft(&draft, 0)
    }

    /// Draft copy of this HST with every label passed through `f`.
    pub(crate) fn draft_with_labels(&self, f: impl Fn(Weight) -> Weight) -> Vec<DraftNode> {
        self.nodes
            .iter()
            .map(|x| DraftNode {
                label: f(x.label),
                children: x.children.clone(),
                point: x.point,
            })
            .collect()
    }
}

/// Single-linkage dendrogram of `um`, canonicalized, then checked to
/// reproduce every value exactly.
pub fn hst_from_ultrametric(um: &Ultrametric) -> Result<Hst, RamseyError> {
    let m = um.len();
    if m == 0 {
        return Err(RamseyError::Empty);
    }
    let mut draft: Vec<DraftNode> = um
        .points()
        .iter()
        .map(|&p| DraftNode {
            label: 0,
            children: vec![],
            point: Some(p),
        })
        .collect();
    if m == 1 {
        return Ok(Hst::from_draft(&draft, 0));
    }
    // Prim's minimum spanning tree over the complete graph of ρ.
    let mut best = vec![(Weight::MAX, usize::MAX); m];
    let mut in_tree = vec![false; m];
    let mut mst = Vec::with_capacity(m - 1);
    best[0] = (0, usize::MAX);
    for _ in 0..m {
        let x = (0..m)
            .filter(|&x| !in_tree[x])
            .min_by_key(|&x| (best[x].0, x))
            .expect("vertices remain");
        in_tree[x] = true;
        if best[x].1 != usize::MAX {
            mst.push((best[x].0, best[x].1.min(x), best[x].1.max(x)));
        }
        for y in 0..m {
            if !in_tree[y] && um.get(x, y) < best[y].0 {
                best[y] = (um.get(x, y), x);
            }
        }
    }
    mst.sort_unstable();
    let mut uf = UnionFind::new(m);
    let mut top: Vec<usize> = (0..m).collect();
    for (w, a, b) in mst {
        let (ra, rb) = (uf.find(a), uf.find(b));
        let id = draft.len();
        draft.push(DraftNode {
            label: w,
            children: vec![top[ra], top[rb]],
            point: None,
        });
        uf.union(ra, rb);
        top[uf.find(a)] = id;
    }
    let root = draft.len() - 1;
    let hst = Hst::from_draft(&draft, root);
    let leaf: Vec<usize> = um
        .points()
        .iter()
        .map(|&p| hst.leaf(p).expect("every point is a leaf"))
        .collect();
    for i in 0..m {
        for j in i + 1..m {
            if hst.nodes[hst.lca_node(leaf[i], leaf[j])].label != um.get(i, j) {
                let (x, y) = (um.points()[i], um.points()[j]);
                return Err(RamseyError::StrongTriangle { x, y });
            }
        }
    }
    Ok(hst)
}

/// Embeds the HST's ultrametric into a tree on exactly its points with
/// `ρ <= d_T <= 8ρ`. Labels are rounded up to powers of two and
/// re-canonicalized; each internal node is represented by its smallest
/// leaf, and every non-first child's representative is joined to the
/// parent's representative by an edge of the parent's rounded label.
pub fn um_to_tree(hst: &Hst) -> Result<Tree, RamseyError> {
    if hst.nodes.iter().any(|x| x.label > 1 << 62) {
        return Err(RamseyError::Overflow);
    }
    let round = |x: Weight| if x == 0 { 0 } else { x.next_power_of_two() };
    let rounded = Hst::from_draft(&hst.draft_with_labels(round), 0);
    let n = rounded.nodes.len();
    let mut rep = vec![VertexId::MAX; n];
    for x in (0..n).rev() {
        rep[x] = match rounded.nodes[x].point {
            Some(p) => p,
            None => rep[rounded.nodes[x].children[0]],
        };
    }
    let mut edges = Vec::new();
    for (x, node) in rounded.nodes.iter().enumerate() {
        for &c in node.children.iter().skip(1) {
            edges.push(Edge::new(rep[x], rep[c], node.label));
        }
    }
    let tree = Tree::new(hst.points(), edges)?;
    let oracle = TreePathOracle::new(&tree)?;
    let points = hst.points();
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            let rho = hst.distance(x, y).expect("leaf");
            let dt = oracle.distance(x, y)?;
            if dt < rho || dt > 8 * rho {
                return Err(RamseyError::Verification(format!(
                    "tree distance {dt} outside [{rho}, {}] for ({x}, {y})",
                    8 * rho
                )));
            }
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn um(points: usize, f: impl Fn(usize, usize) -> Weight) -> Ultrametric {
        Ultrametric::from_fn((0..points).collect(), f)
    }

    #[test]
    fn two_points() {
        let h = hst_from_ultrametric(&um(2, |_, _| 6)).unwrap();
        assert_eq!(h.root_label(), 6);
        assert_eq!(h.nodes()[0].children.len(), 2);
        assert!(h.shape_violation().is_none());
    }

    #[test]
    fn three_points_nest() {
        // ρ(a,b) = 2, ρ(a,c) = ρ(b,c) = 5
        let h = hst_from_ultrametric(&um(3, |i, j| if i.max(j) == 2 { 5 } else { 2 })).unwrap();
        let root = &h.nodes()[0];
        assert_eq!(root.label, 5);
        assert_eq!(root.children.len(), 2);
        let inner = &h.nodes()[root.children[0]];
        assert_eq!(inner.label, 2);
        assert_eq!(inner.children.len(), 2);
        assert_eq!(h.nodes()[root.children[1]].point, Some(2));
    }

    #[test]
    fn uniform_is_a_star() {
        let h = hst_from_ultrametric(&um(4, |_, _| 7)).unwrap();
        assert_eq!(h.nodes().len(), 5);
        assert_eq!(h.nodes()[0].children.len(), 4);
    }

    #[test]
    fn rejects_non_ultrametric() {
        // 1, 1, 3 violates the strong triangle inequality.
        let bad = um(3, |i, j| if i.min(j) == 0 && i.max(j) == 2 { 3 } else { 1 });
        assert!(bad.strong_triangle_violation().is_some());
        assert!(matches!(
            hst_from_ultrametric(&bad),
            Err(RamseyError::StrongTriangle { .. })
        ));
    }

    #[test]
    fn round_trip_is_identity_on_canonical_forms() {
        let u = um(5, |i, j| {
            let block = |x: usize| x / 2;
            if block(i) == block(j) {
                3
            } else {
                9
            }
        });
        let h = hst_from_ultrametric(&u).unwrap();
        assert_eq!(h.to_ultrametric(), u);
        assert_eq!(hst_from_ultrametric(&h.to_ultrametric()).unwrap(), h);
        let json = serde_json::to_string(&h).unwrap();
        let back: Hst = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.distance(0, 4), Some(9));
    }

    #[test]
    fn um_to_tree_sandwich() {
        let single = um_to_tree(&Hst::singleton(3)).unwrap();
        assert_eq!(single.nodes(), &[3]);
        let two = um_to_tree(&hst_from_ultrametric(&um(2, |_, _| 10)).unwrap()).unwrap();
        let w = two.edges()[0].w;
        assert!((10..=80).contains(&w));
        let tri = um_to_tree(&hst_from_ultrametric(&um(3, |_, _| 6)).unwrap()).unwrap();
        let o = TreePathOracle::new(&tri).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    assert!((6..=48).contains(&o.distance(x, y).unwrap()));
                }
            }
        }
    }
}
