use serde::{Deserialize, Serialize};

use super::tree::{RootedTree, Tree};
use super::TreeError;
use crate::graph::{VertexId, Weight};

/// For every local vertex, its centroid ancestors (topmost first) with the
/// exact tree distance to each. The last entry is the vertex itself.
pub(crate) fn centroid_chains(t: &RootedTree) -> Vec<Vec<(usize, Weight)>> {
    centroid_decomposition(t).0
}

/// Centroid chains together with, per vertex and per level below the top,
/// the 1-based rank of the piece taken among the pieces left by the
/// centroid above (largest piece first, ties by smaller start vertex).
fn centroid_decomposition(t: &RootedTree) -> (Vec<Vec<(usize, Weight)>>, Vec<Vec<u64>>) {
    let n = t.len();
    let adj = t.adjacency();
    let mut removed = vec![false; n];
    let mut chains = vec![Vec::new(); n];
    let mut ranks = vec![Vec::new(); n];
    let mut size = vec![0usize; n];
    let mut pieces = vec![(t.root, 0u64)];
    let mut order = Vec::new();
    let mut par = vec![usize::MAX; n];
    while let Some((start, rank)) = pieces.pop() {
        // Subtree sizes of the piece, rooted at `start`.
        order.clear();
        order.push(start);
        par[start] = usize::MAX;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            for &(y, _) in &adj[x] {
                if !removed[y] && y != par[x] {
                    par[y] = x;
                    order.push(y);
                }
            }
        }
        if rank > 0 {
            for &x in &order {
                ranks[x].push(rank);
            }
        }
        for &x in order.iter().rev() {
            size[x] = 1 + adj[x]
                .iter()
                .filter(|&&(y, _)| !removed[y] && par[y] == x)
                .map(|&(y, _)| size[y])
                .sum::<usize>();
        }
        let total = order.len();
        let mut c = start;
        loop {
            let heavy = adj[c]
                .iter()
                .find(|&&(y, _)| !removed[y] && par[y] == c && 2 * size[y] > total);
            match heavy {
                Some(&(y, _)) => c = y,
                None => break,
            }
        }
        // Distances from the centroid within the piece.
        let mut stack = vec![(c, usize::MAX, 0 as Weight)];
        while let Some((x, from, d)) = stack.pop() {
            chains[x].push((c, d));
            for &(y, w) in &adj[x] {
                if !removed[y] && y != from {
                    stack.push((y, x, d + w));
                }
            }
        }
        removed[c] = true;
        let mut next: Vec<(usize, usize)> = adj[c]
            .iter()
            .filter(|&&(y, _)| !removed[y])
            .map(|&(y, _)| {
                (
                    if par[y] == c {
                        size[y]
                    } else {
                        total - size[c]
                    },
                    y,
                )
            })
            .collect();
        next.sort_unstable_by_key(|&(s, y)| (std::cmp::Reverse(s), y));
        for (r, &(_, y)) in next.iter().enumerate().rev() {
            pieces.push((y, r as u64 + 1));
        }
    }
    (chains, ranks)
}

/// Appends the Elias gamma code of `x >= 1`, least significant bit of the
/// stream first.
fn push_gamma(words: &mut Vec<u64>, len: &mut usize, x: u64) {
    let b = 64 - x.leading_zeros() as usize;
    let mut put = |bit: bool| {
        if *len % 64 == 0 {
            words.push(0);
        }
        if bit {
            words[*len / 64] |= 1 << (*len % 64);
        }
        *len += 1;
    };
    for _ in 1..b {
        put(false);
    }
    for i in (0..b).rev() {
        put(x >> i & 1 == 1);
    }
}

fn bit(words: &[u64], i: usize) -> Option<bool> {
    words.get(i / 64).map(|w| w >> (i % 64) & 1 == 1)
}

/// Decodes one gamma codeword at `*pos`.
fn read_gamma(words: &[u64], pos: &mut usize) -> Option<u64> {
    let mut zeros = 0;
    while !bit(words, *pos)? {
        zeros += 1;
        *pos += 1;
    }
    let mut x = 0u64;
    for _ in 0..=zeros {
        x = x << 1 | bit(words, *pos)? as u64;
        *pos += 1;
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLabel {
    pub tree_id: u64,
    pub vertex: VertexId,
    /// The vertex's path down the centroid tree: per level, the gamma code
    /// of the rank of the piece taken.
    pub code: Vec<u64>,
    /// Distances to the proper centroid ancestors, topmost first.
    pub dist: Vec<Weight>,
}

impl TreeLabel {
    /// Size in 64-bit words.
    pub fn words(&self) -> usize {
        self.code.len() + self.dist.len()
    }

    /// Levels of the centroid tree above the vertex.
    pub fn depth(&self) -> usize {
        self.dist.len()
    }

    /// Piece ranks down the centroid tree.
    fn ranks(&self) -> Option<Vec<u64>> {
        let mut pos = 0;
        (0..self.dist.len())
            .map(|_| read_gamma(&self.code, &mut pos))
            .collect()
    }
}

/// Exact distance between the owners of two labels of the same tree.
pub fn label_distance(a: &TreeLabel, b: &TreeLabel) -> Result<Weight, TreeError> {
    if a.tree_id != b.tree_id {
        return Err(TreeError::Mismatch {
            left: a.tree_id,
            right: b.tree_id,
        });
    }
    let bad = || TreeError::NotATree(format!("corrupt label of {}", a.vertex));
    let (ra, rb) = (a.ranks().ok_or_else(bad)?, b.ranks().ok_or_else(bad)?);
    // Levels 0..=p have the same centroid for both.
    let p = ra.iter().zip(&rb).take_while(|(x, y)| x == y).count();
    let at = |l: &TreeLabel, i: usize| l.dist.get(i).copied().unwrap_or(0);
    Ok((0..=p)
        .map(|i| at(a, i) + at(b, i))
        .min()
        .expect("level 0 is shared"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeLabeling {
    pub tree_id: u64,
    labels: Vec<TreeLabel>,
}

impl TreeLabeling {
    pub fn new(t: &Tree, tree_id: u64) -> Result<Self, TreeError> {
        Ok(Self::from_rooted(&t.rooted(None)?, tree_id))
    }

    pub fn from_rooted(r: &RootedTree, tree_id: u64) -> Self {
        let (chains, ranks) = centroid_decomposition(r);
        let labels = chains
            .into_iter()
            .zip(ranks)
            .enumerate()
            .map(|(x, (chain, rank))| {
                let (mut code, mut len) = (Vec::new(), 0);
                for q in rank {
                    push_gamma(&mut code, &mut len, q);
                }
                let dist = chain[..chain.len() - 1].iter().map(|&(_, d)| d).collect();
                TreeLabel {
                    tree_id,
                    vertex: r.nodes[x],
                    code,
                    dist,
                }
            })
            .collect();
        Self { tree_id, labels }
    }

    pub fn label(&self, v: VertexId) -> Result<&TreeLabel, TreeError> {
        let i = self
            .labels
            .binary_search_by_key(&v, |l| l.vertex)
            .map_err(|_| TreeError::UnknownVertex(v))?;
        Ok(&self.labels[i])
    }

    pub fn labels(&self) -> &[TreeLabel] {
        &self.labels
    }

    pub fn max_words(&self) -> usize {
        self.labels.iter().map(TreeLabel::words).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_tree;
    use crate::graph::{exact_distances, Edge};
    use crate::util::ceil_log2;

    #[test]
    fn single_vertex() {
        let l = TreeLabeling::new(&Tree::singleton(4), 0).unwrap();
        assert_eq!(l.label(4).unwrap().words(), 0);
        assert_eq!(
            label_distance(l.label(4).unwrap(), l.label(4).unwrap()).unwrap(),
            0
        );
    }

    #[test]
    fn star_goes_through_center() {
        let t = Tree::new(0..5, (1..5).map(|i| Edge::new(0, i, i as Weight)).collect()).unwrap();
        let l = TreeLabeling::new(&t, 1).unwrap();
        assert_eq!(l.label(3).unwrap().dist, vec![3]);
        assert_eq!(
            label_distance(l.label(2).unwrap(), l.label(3).unwrap()).unwrap(),
            5
        );
    }

    #[test]
    fn random_tree_labels_are_exact_and_short() {
        let g = random_tree(128, 30, 21);
        let t = Tree::new(0..128, g.edges().to_vec()).unwrap();
        let l = TreeLabeling::new(&t, 0).unwrap();
        let d = exact_distances(&g);
        for u in 0..128 {
            for v in 0..128 {
                assert_eq!(
                    label_distance(l.label(u).unwrap(), l.label(v).unwrap()).unwrap(),
                    d.get(u, v)
                );
            }
        }
        assert!(l.max_words() as u32 <= ceil_log2(128) + 1);
    }

    #[test]
    fn gamma_codes_round_trip() {
        let (mut w, mut len) = (Vec::new(), 0);
        let xs = [1u64, 2, 3, 7, 8, 1000, 1, 1 << 40];
        for &x in &xs {
            push_gamma(&mut w, &mut len, x);
        }
        let mut pos = 0;
        for &x in &xs {
            assert_eq!(read_gamma(&w, &mut pos), Some(x));
        }
        assert_eq!(pos, len);
    }

    #[test]
    fn labels_of_different_trees_are_rejected() {
        let a = TreeLabeling::new(&Tree::singleton(0), 1).unwrap();
        let b = TreeLabeling::new(&Tree::singleton(0), 2).unwrap();
        assert!(matches!(
            label_distance(a.label(0).unwrap(), b.label(0).unwrap()),
            Err(TreeError::Mismatch { left: 1, right: 2 })
        ));
    }
}
