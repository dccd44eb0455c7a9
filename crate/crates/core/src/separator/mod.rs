//! Balanced vertex separators.
//!
//! A set `B` is balanced for `G` when every component of `G - B` has at
//! most `n/2` vertices, checked as `2|C| <= n` so no rounding is involved.

mod decomposition;

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decomposition::{TdError, TdViolation, TreeDecomposition};

use crate::graph::{Graph, VertexId, VertexSet};

/// Largest graph the exact enumeration accepts.
pub const EXACT_MAX_N: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("exact separator search supports n <= {EXACT_MAX_N}, got {n}")]
    TooLarge { n: usize },
    #[error(transparent)]
    Decomposition(#[from] TdError),
    #[error("separator mode `td` needs a tree decomposition")]
    MissingDecomposition,
    #[error("no balanced separator found for a subgraph of {n} vertices")]
    Unbalanced { n: usize },
}

/// Size of the largest component of `g - sep`.
pub fn max_component_after_removal(g: &Graph, sep: &VertexSet) -> usize {
    let n = g.n();
    let mut seen: Vec<bool> = (0..n).map(|x| sep.contains(x)).collect();
    let mut best = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for &(y, _) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        best = best.max(size);
    }
    best
}

pub fn is_balanced(g: &Graph, sep: &VertexSet) -> bool {
    2 * max_component_after_removal(g, sep) <= g.n()
}

/// A bag of `td` whose removal balances `g`, searched by subtree counting
/// from the root bag. Ties go to the smaller bag, then the smaller bag id.
pub fn separator_from_decomposition(
    g: &Graph,
    td: &TreeDecomposition,
) -> Result<VertexSet, SeparatorError> {
    td.validate(g)?;
    best_bag(g, td)
}

fn best_bag(g: &Graph, td: &TreeDecomposition) -> Result<VertexSet, SeparatorError> {
    if g.n() == 0 {
        return Ok(VertexSet::empty(0));
    }
    td.balanced_bag_candidates()
        .into_iter()
        .map(|b| td.bags[b].clone())
        .find(|bag| is_balanced(g, bag))
        .ok_or(SeparatorError::Unbalanced { n: g.n() })
}

fn bfs_levels(g: &Graph, root: VertexId) -> Vec<usize> {
    let mut level = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::from([root]);
    level[root] = 0;
    while let Some(x) = queue.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if level[y] == usize::MAX {
                level[y] = level[x] + 1;
                queue.push_back(y);
            }
        }
    }
    level
}

fn level_cut(g: &Graph) -> Option<VertexSet> {
    let first = bfs_levels(g, 0);
    let far = (0..g.n())
        .filter(|&x| first[x] != usize::MAX)
        .max_by_key(|&x| (first[x], std::cmp::Reverse(x)))?;
    let level = bfs_levels(g, far);
    let depth = level
        .iter()
        .filter(|&&l| l != usize::MAX)
        .max()
        .copied()
        .unwrap_or(0);
    let mut layers = vec![Vec::new(); depth + 1];
    for (x, &l) in level.iter().enumerate() {
        if l != usize::MAX {
            layers[l].push(x);
        }
    }
    layers
        .into_iter()
        .map(|ids| VertexSet::from_sorted(g.n(), ids))
        .filter(|s| is_balanced(g, s))
        .min_by_key(|s| s.len())
}

fn greedy_deletion(g: &Graph) -> VertexSet {
    let n = g.n();
    let mut removed = vec![false; n];
    loop {
        let sep = VertexSet::new(n, (0..n).filter(|&x| removed[x]));
        // Largest component of what remains, lowest minimum id on ties.
        let mut label = vec![usize::MAX; n];
        let mut comps: Vec<Vec<VertexId>> = Vec::new();
        for s in 0..n {
            if removed[s] || label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![s];
            label[s] = id;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                i += 1;
                for &(y, _) in g.neighbors(x) {
                    if !removed[y] && label[y] == usize::MAX {
                        label[y] = id;
                        members.push(y);
                    }
                }
            }
            comps.push(members);
        }
        let Some(big) = comps
            .iter()
            .max_by_key(|c| (c.len(), std::cmp::Reverse(c.iter().min().copied())))
        else {
            return sep;
        };
        if 2 * big.len() <= n {
            return sep;
        }
        let pick = big
            .iter()
            .copied()
            .max_by_key(|&x| {
                let deg = g.neighbors(x).iter().filter(|&&(y, _)| !removed[y]).count();
                (deg, std::cmp::Reverse(x))
            })
            .expect("component is non-empty");
        removed[pick] = true;
    }
}

/// Drops members one at a time (ascending id) while balance survives.
pub fn minimize(g: &Graph, sep: &VertexSet) -> VertexSet {
    let mut keep: Vec<VertexId> = sep.as_slice().to_vec();
    let mut i = 0;
    while i < keep.len() {
        let trial: Vec<VertexId> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &x)| x)
            .collect();
        let trial = VertexSet::from_sorted(g.n(), trial);
        if is_balanced(g, &trial) {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    VertexSet::from_sorted(g.n(), keep)
}

/// Best of a BFS level cut and greedy max-degree deletion, then minimized.
pub fn heuristic_separator(g: &Graph) -> VertexSet {
    if g.n() == 0 {
        return VertexSet::empty(0);
    }
    let greedy = greedy_deletion(g);
    let best = match level_cut(g) {
        Some(cut) if cut.len() <= greedy.len() => cut,
        _ => greedy,
    };
    let out = minimize(g, &best);
    debug_assert!(is_balanced(g, &out));
    out
}

/// Minimum-cardinality balanced separator by enumeration, if one has at
/// most `max_size` vertices. Among equal sizes the lexicographically
/// smallest bitmask wins.
pub fn exact_small_separator(
    g: &Graph,
    max_size: usize,
) -> Result<Option<VertexSet>, SeparatorError> {
    let n = g.n();
    if n > EXACT_MAX_N {
        return Err(SeparatorError::TooLarge { n });
    }
    let adj: Vec<u32> = (0..n)
        .map(|x| g.neighbors(x).iter().fold(0u32, |m, &(y, _)| m | 1 << y))
        .collect();
    let all: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let balanced = |sep: u32| -> bool {
        let mut rest = all & !sep;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            loop {
                let mut grown = comp;
                let mut bits = comp;
                while bits != 0 {
                    let x = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    grown |= adj[x];
                }
                grown &= rest;
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            if 2 * comp.count_ones() as usize > n {
                return false;
            }
            rest &= !comp;
        }
        true
    };
    for size in 0..=max_size.min(n) {
        if size == 0 {
            if balanced(0) {
                return Ok(Some(VertexSet::empty(n)));
            }
            continue;
        }
        let mut s: u32 = (1u32 << size) - 1;
        while s <= all {
            if balanced(s) {
                let ids = (0..n).filter(|&x| s >> x & 1 == 1).collect();
                return Ok(Some(VertexSet::from_sorted(n, ids)));
            }
            // Next subset of the same popcount.
            let c = s & s.wrapping_neg();
            let r = s + c;
            if r == 0 {
                break;
            }
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatorMode {
    /// Bags of a supplied decomposition, restricted to each subgraph.
    Td,
    Heuristic,
    /// Enumeration when the subgraph is small enough, heuristic otherwise.
    Exact,
}

/// Symbolic separator-size bound `t(θ)` used in reported bound formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeBound {
    Constant(u64),
    /// `θ^(num/den)`.
    Power {
        num: u64,
        den: u64,
    },
    /// `t(n)` evaluated on the whole graph.
    Flat,
}

impl SizeBound {
    /// `t(θ)`, or `None` for a flat bound that callers take from measurements.
    pub fn eval(&self, theta: f64) -> Option<f64> {
        match *self {
            SizeBound::Constant(t) => Some(t as f64),
            SizeBound::Power { num, den } => Some(theta.powf(num as f64 / den as f64)),
            SizeBound::Flat => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatorMethod {
    Bag,
    Heuristic,
    Exact,
    Trivial,
}

#[derive(Clone, Debug)]
pub struct SeparatorChoice {
    pub set: VertexSet,
    pub method: SeparatorMethod,
}

#[derive(Clone, Debug)]
pub struct SeparatorProvider {
    pub mode: SeparatorMode,
    pub bound: SizeBound,
    /// Greedily drop redundant separator vertices after selection.
    pub minimize: bool,
    td: Option<Arc<TreeDecomposition>>,
}

impl SeparatorProvider {
    pub fn heuristic() -> Self {
        Self {
            mode: SeparatorMode::Heuristic,
            bound: SizeBound::Flat,
            minimize: true,
            td: None,
        }
    }

    pub fn exact() -> Self {
        Self {
            mode: SeparatorMode::Exact,
            bound: SizeBound::Flat,
            minimize: true,
            td: None,
        }
    }

    /// Validates `td` against `g` once; later queries restrict it.
    pub fn from_decomposition(g: &Graph, td: TreeDecomposition) -> Result<Self, SeparatorError> {
        td.validate(g)?;
        let bound = SizeBound::Constant(td.width as u64 + 1);
        Ok(Self {
            mode: SeparatorMode::Td,
            bound,
            minimize: true,
            td: Some(Arc::new(td)),
        })
    }

    pub fn with_bound(mut self, bound: SizeBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn decomposition(&self) -> Option<&TreeDecomposition> {
        self.td.as_deref()
    }

    /// A balanced separator of `g`, whose local vertex `i` is global vertex
    /// `to_global[i]` of the graph the provider was built for.
    pub fn separate(
        &self,
        g: &Graph,
        to_global: &[VertexId],
    ) -> Result<SeparatorChoice, SeparatorError> {
        let n = g.n();
        if n <= 1 {
            return Ok(SeparatorChoice {
                set: VertexSet::full(n),
                method: SeparatorMethod::Trivial,
            });
        }
        let (set, method) = match self.mode {
            SeparatorMode::Td => {
                let td = self
                    .td
                    .as_ref()
                    .ok_or(SeparatorError::MissingDecomposition)?;
                (best_bag(g, &td.restrict(to_global))?, SeparatorMethod::Bag)
            }
            SeparatorMode::Heuristic => (heuristic_separator(g), SeparatorMethod::Heuristic),
            SeparatorMode::Exact if n <= EXACT_MAX_N => {
                let s = exact_small_separator(g, n)?.ok_or(SeparatorError::Unbalanced { n })?;
                (s, SeparatorMethod::Exact)
            }
            SeparatorMode::Exact => (heuristic_separator(g), SeparatorMethod::Heuristic),
        };
        let set = if self.minimize {
            minimize(g, &set)
        } else {
            set
        };
        if !is_balanced(g, &set) {
            return Err(SeparatorError::Unbalanced { n });
        }
        Ok(SeparatorChoice { set, method })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DedupPolicy, Edge};

    fn graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
        Graph::new(
            n,
            edges.into_iter().map(|(u, v)| Edge::new(u, v, 1)).collect(),
            DedupPolicy::Reject,
        )
        .unwrap()
    }

    fn path(n: usize) -> Graph {
        graph(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    fn complete(n: usize) -> Graph {
        graph(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    fn cycle(n: usize) -> Graph {
        graph(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn star(n: usize) -> Graph {
        graph(n, (1..n).map(|i| (0, i)))
    }

    /// Brute force over all subsets, independent of the bitmask search.
    fn brute_min_size(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&m| is_balanced(g, &VertexSet::new(n, (0..n).filter(|&x| m >> x & 1 == 1))))
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn path_nine_splits_at_the_median() {
        let s = heuristic_separator(&path(9));
        assert_eq!(s.as_slice(), &[4]);
        assert_eq!(max_component_after_removal(&path(9), &s), 4);
    }

    #[test]
    fn star_center() {
        assert_eq!(heuristic_separator(&star(7)).as_slice(), &[0]);
    }

    #[test]
    fn complete_graph_matches_enumeration() {
        let k6 = complete(6);
        let h = heuristic_separator(&k6);
        assert!(is_balanced(&k6, &h));
        assert_eq!(h.len(), brute_min_size(&k6));
        assert_eq!(
            exact_small_separator(&k6, 6).unwrap().unwrap().len(),
            brute_min_size(&k6)
        );
    }

    #[test]
    fn exact_on_cycle_tree_and_clique() {
        let c8 = cycle(8);
        assert_eq!(exact_small_separator(&c8, 1).unwrap(), None);
        assert_eq!(exact_small_separator(&c8, 2).unwrap().unwrap().len(), 2);
        let t = graph(7, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)]);
        let s = exact_small_separator(&t, 3).unwrap().unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(exact_small_separator(&complete(5), 2).unwrap(), None);
        assert!(matches!(
            exact_small_separator(&path(25), 1),
            Err(SeparatorError::TooLarge { n: 25 })
        ));
    }

    #[test]
    fn path_decomposition_gives_middle_bag() {
        let g = path(5);
        let text = "s td 4 2 5\nb 1 1 2\nb 2 2 3\nb 3 3 4\nb 4 4 5\n1 2\n2 3\n3 4\n";
        let td = TreeDecomposition::parse(text).unwrap();
        let b = separator_from_decomposition(&g, &td).unwrap();
        assert!(b == VertexSet::new(5, [1, 2]) || b == VertexSet::new(5, [2, 3]));
        assert!(2 * max_component_after_removal(&g, &b) <= 5);
        // Exhaustive check of every bag: the chosen one is balanced and minimal in size.
        assert!(td.bags.iter().all(|bag| bag.len() >= b.len()));
    }

    #[test]
    fn single_bag_decomposition() {
        let g = complete(4);
        let td = TreeDecomposition::parse("s td 1 4 4\nb 1 1 2 3 4\n").unwrap();
        let b = separator_from_decomposition(&g, &td).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(max_component_after_removal(&g, &b), 0);
    }

    #[test]
    fn provider_restricts_decomposition() {
        let g = path(8);
        let mut text = String::from("s td 7 2 8\n");
        for i in 0..7 {
            text.push_str(&format!("b {} {} {}\n", i + 1, i + 1, i + 2));
        }
        for i in 1..7 {
            text.push_str(&format!("{} {}\n", i, i + 1));
        }
        let td = TreeDecomposition::parse(&text).unwrap();
        let p = SeparatorProvider::from_decomposition(&g, td).unwrap();
        let sub = g
            .induced_subgraph(&VertexSet::new(8, [4, 5, 6, 7]))
            .unwrap();
        let c = p.separate(&sub.graph, &sub.to_parent).unwrap();
        assert!(is_balanced(&sub.graph, &c.set));
        assert_eq!(c.set.len(), 1);
    }
}
