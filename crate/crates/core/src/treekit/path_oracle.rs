use super::lca::LcaOracle;
use super::tree::{RootedTree, Tree};
use super::TreeError;
use crate::graph::{Edge, VertexId, Weight};

/// Exact tree distances in O(1) and tree paths in O(1 + |path|), from root
/// distances, parent pointers and an LCA oracle.
#[derive(Clone, Debug)]
pub struct TreePathOracle {
    tree: RootedTree,
    lca: LcaOracle,
}

impl TreePathOracle {
    pub fn new(t: &Tree) -> Result<Self, TreeError> {
        let tree = t.rooted(None)?;
        let lca = LcaOracle::from_rooted(&tree);
        Ok(Self { tree, lca })
    }

    pub fn rooted(&self) -> &RootedTree {
        &self.tree
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.tree.local(v).is_ok()
    }

    pub fn local_distance(&self, a: usize, b: usize) -> Weight {
        let z = self.lca.query(a, b);
        let d = &self.tree.root_dist;
        d[a] + d[b] - 2 * d[z]
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<Weight, TreeError> {
        Ok(self.local_distance(self.tree.local(u)?, self.tree.local(v)?))
    }

    /// The unique tree path from `u` to `v`, edges oriented along the walk.
    pub fn path(&self, u: VertexId, v: VertexId) -> Result<Vec<Edge>, TreeError> {
        let (mut a, mut b) = (self.tree.local(u)?, self.tree.local(v)?);
        let z = self.lca.query(a, b);
        let t = &self.tree;
        let step = |x: usize| Edge::new(t.nodes[x], t.nodes[t.parent[x]], t.parent_weight[x]);
        let mut out = Vec::new();
        while a != z {
            out.push(step(a));
            a = t.parent[a];
        }
        let mut down = Vec::new();
        while b != z {
            let e = step(b);
            down.push(Edge::new(e.v, e.u, e.w));
            b = t.parent[b];
        }
        out.extend(down.into_iter().rev());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_tree;
    use crate::graph::exact_distances;

    #[test]
    fn path_with_two_edges() {
        let t = Tree::new([0, 1, 2], vec![Edge::new(0, 1, 5), Edge::new(1, 2, 7)]).unwrap();
        let o = TreePathOracle::new(&t).unwrap();
        assert_eq!(o.distance(0, 2).unwrap(), 12);
        assert_eq!(
            o.path(0, 2).unwrap(),
            vec![Edge::new(0, 1, 5), Edge::new(1, 2, 7)]
        );
        assert_eq!(o.distance(1, 1).unwrap(), 0);
        assert!(o.path(1, 1).unwrap().is_empty());
        assert_eq!(o.distance(0, 9).unwrap_err(), TreeError::UnknownVertex(9));
    }

    #[test]
    fn random_tree_distances_match_dijkstra() {
        let g = random_tree(100, 20, 5);
        let t = Tree::new(0..100, g.edges().to_vec()).unwrap();
        let o = TreePathOracle::new(&t).unwrap();
        let d = exact_distances(&g);
        for u in 0..100 {
            for v in 0..100 {
                assert_eq!(o.distance(u, v).unwrap(), d.get(u, v));
                let p = o.path(u, v).unwrap();
                assert_eq!(p.iter().map(|e| e.w).sum::<Weight>(), d.get(u, v));
                if let (Some(f), Some(l)) = (p.first(), p.last()) {
                    assert_eq!((f.u, l.v), (u, v));
                }
                assert!(p.windows(2).all(|w| w[0].v == w[1].u));
            }
        }
    }
}
