use super::tree::RootedTree;

/// Constant-time LCA over local ids: Euler tour plus a sparse table of
/// depth minima.
#[derive(Clone, Debug)]
pub struct LcaOracle {
    first: Vec<u32>,
    euler: Vec<u32>,
    depth: Vec<u32>,
    /// `table[j][i]` = position in `euler` of the shallowest entry in `i..i + 2^j`.
    table: Vec<Vec<u32>>,
    log: Vec<u8>,
}

impl LcaOracle {
    pub fn new(children: &[Vec<usize>], root: usize) -> Self {
        let n = children.len();
        let mut depth = vec![0u32; n];
        let mut first = vec![0u32; n];
        let mut euler = Vec::with_capacity(2 * n);
        // Iterative Euler tour: (node, next child index).
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        first[root] = 0;
        euler.push(root as u32);
        while let Some(top) = stack.last_mut() {
            let x = top.0;
            if top.1 < children[x].len() {
                let c = children[x][top.1];
                top.1 += 1;
                depth[c] = depth[x] + 1;
                first[c] = euler.len() as u32;
                euler.push(c as u32);
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p as u32);
                }
            }
        }
        let m = euler.len();
        let mut log = vec![0u8; m + 1];
        for i in 2..=m {
            log[i] = log[i / 2] + 1;
        }
        let mut table = vec![(0..m as u32).collect::<Vec<u32>>()];
        let mut j = 1;
        while (1 << j) <= m {
            let prev = &table[j - 1];
            let half = 1 << (j - 1);
            let row = (0..=m - (1 << j))
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + half]);
                    if depth[euler[a as usize] as usize] <= depth[euler[b as usize] as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            table.push(row);
            j += 1;
        }
        Self {
            first,
            euler,
            depth,
            table,
            log,
        }
    }

    pub fn from_rooted(t: &RootedTree) -> Self {
        Self::new(&t.children, t.root)
    }

    #[inline]
    pub fn query(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (self.first[u] as usize, self.first[v] as usize);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let j = self.log[b - a + 1] as usize;
        let (x, y) = (self.table[j][a], self.table[j][b + 1 - (1 << j)]);
        let (x, y) = (
            self.euler[x as usize] as usize,
            self.euler[y as usize] as usize,
        );
        if self.depth[x] <= self.depth[y] {
            x
        } else {
            y
        }
    }

    /// `query` that also counts table reads, for auditing that the cost
    /// does not grow with the tree.
    pub fn query_counted(&self, u: usize, v: usize, reads: &mut usize) -> usize {
        *reads += 2;
        let (mut a, mut b) = (self.first[u] as usize, self.first[v] as usize);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        *reads += 1;
        let j = self.log[b - a + 1] as usize;
        *reads += 2;
        let (x, y) = (self.table[j][a], self.table[j][b + 1 - (1 << j)]);
        *reads += 2;
        let (x, y) = (
            self.euler[x as usize] as usize,
            self.euler[y as usize] as usize,
        );
        *reads += 2;
        if self.depth[x] <= self.depth[y] {
            x
        } else {
            y
        }
    }

    pub fn depth(&self, x: usize) -> u32 {
        self.depth[x]
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_tree;
    use crate::graph::VertexSet;
    use crate::treekit::Tree;

    fn naive_lca(parent: &[usize], depth: &[u32], mut u: usize, mut v: usize) -> usize {
        while depth[u] > depth[v] {
            u = parent[u];
        }
        while depth[v] > depth[u] {
            v = parent[v];
        }
        while u != v {
            u = parent[u];
            v = parent[v];
        }
        u
    }

    #[test]
    fn path_lca() {
        let children = vec![vec![1], vec![2], vec![]];
        let lca = LcaOracle::new(&children, 0);
        assert_eq!(lca.query(1, 2), 1);
        for v in 0..3 {
            assert_eq!(lca.query(v, v), v);
        }
    }

    #[test]
    fn matches_parent_walk_on_random_trees() {
        for seed in 0..3 {
            let g = random_tree(100, 9, seed);
            let t = Tree::new(VertexSet::full(100).iter().copied(), g.edges().to_vec()).unwrap();
            let r = t.rooted(Some(17)).unwrap();
            let lca = LcaOracle::from_rooted(&r);
            for u in 0..100 {
                for v in 0..100 {
                    assert_eq!(lca.query(u, v), naive_lca(&r.parent, &r.depth, u, v));
                }
            }
        }
    }
}
