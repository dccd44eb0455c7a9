use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub n: usize,
    pub bags: Vec<VertexSet>,
    /// Adjacency over bag ids.
    pub tree: Vec<Vec<usize>>,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TdViolation {
    /// Property 1: every vertex lies in some bag.
    VertexUncovered {
        vertex: VertexId,
    },
    /// Property 2: the bags holding a vertex form a connected subtree.
    DisconnectedBags {
        vertex: VertexId,
    },
    /// Property 3: every edge lies inside some bag.
    EdgeUncovered {
        u: VertexId,
        v: VertexId,
    },
    WidthExceeded {
        bag: usize,
        size: usize,
        width: usize,
    },
    NotATree,
    VertexCountMismatch {
        td: usize,
        graph: usize,
    },
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VertexUncovered { vertex } => {
                write!(f, "property 1 (vertex coverage): vertex {vertex} in no bag")
            }
            Self::DisconnectedBags { vertex } => {
                write!(
                    f,
                    "property 2 (connectivity): bags containing vertex {vertex} are disconnected"
                )
            }
            Self::EdgeUncovered { u, v } => {
                write!(f, "property 3 (edge coverage): edge ({u},{v}) in no bag")
            }
            Self::WidthExceeded { bag, size, width } => {
                write!(
                    f,
                    "bag {bag} has {size} vertices, exceeding width {width} + 1"
                )
            }
            Self::NotATree => write!(f, "bag graph is not a tree"),
            Self::VertexCountMismatch { td, graph } => {
                write!(
                    f,
                    "decomposition covers {td} vertices but the graph has {graph}"
                )
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("invalid tree decomposition: {}", list(.0))]
    Invalid(Vec<TdViolation>),
}

fn list(v: &[TdViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl TreeDecomposition {
    /// Parses the PACE 2017 `.td` format. Ids are 1-based in the file.
    pub fn parse(text: &str) -> Result<Self, TdError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<VertexSet>> = Vec::new();
        let mut tree: Vec<Vec<usize>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let bad = |msg: &str| TdError::Malformed {
                line,
                msg: msg.to_string(),
            };
            let mut tok = raw.split_whitespace();
            let Some(first) = tok.next() else { continue };
            let num = |s: Option<&str>, what: &str| -> Result<usize, TdError> {
                s.and_then(|x| x.parse().ok())
                    .ok_or_else(|| bad(&format!("bad {what}")))
            };
            match first {
                "c" => {}
                "s" => {
                    if header.is_some() {
                        return Err(bad("duplicate header"));
                    }
                    if tok.next() != Some("td") {
                        return Err(bad("header must start with `s td`"));
                    }
                    let nb = num(tok.next(), "bag count")?;
                    let w1 = num(tok.next(), "width")?;
                    let n = num(tok.next(), "vertex count")?;
                    if w1 == 0 && nb > 0 {
                        return Err(bad("width field must be at least 1"));
                    }
                    header = Some((nb, w1, n));
                    bags = vec![None; nb];
                    tree = vec![Vec::new(); nb];
                }
                "b" => {
                    let (nb, _, n) = header.ok_or_else(|| bad("bag before header"))?;
                    let id = num(tok.next(), "bag id")?;
                    if id == 0 || id > nb {
                        return Err(bad("bag id out of range"));
                    }
                    if bags[id - 1].is_some() {
                        return Err(bad("duplicate bag id"));
                    }
                    let mut ids = Vec::new();
                    for t in tok {
                        let v: usize = t.parse().map_err(|_| bad("bad vertex id"))?;
                        if v == 0 || v > n {
                            return Err(bad("vertex id out of range"));
                        }
                        ids.push(v - 1);
                    }
                    bags[id - 1] = Some(VertexSet::new(n, ids));
                }
                _ => {
                    let (nb, _, _) = header.ok_or_else(|| bad("tree edge before header"))?;
                    let a = num(Some(first), "bag id")?;
                    let b = num(tok.next(), "bag id")?;
                    if tok.next().is_some() {
                        return Err(bad("trailing tokens"));
                    }
                    if a == 0 || b == 0 || a > nb || b > nb || a == b {
                        return Err(bad("tree edge endpoint out of range"));
                    }
                    tree[a - 1].push(b - 1);
                    tree[b - 1].push(a - 1);
                }
            }
        }
        let (_, w1, n) = header.ok_or(TdError::Malformed {
            line: 1,
            msg: "missing `s td` header".into(),
        })?;
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| TdError::Malformed {
                    line: 0,
                    msg: format!("bag {} never listed", i + 1),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let td = Self {
            n,
            bags,
            tree,
            width: w1.saturating_sub(1),
        };
        let shape = td.shape_violations();
        if !shape.is_empty() {
            return Err(TdError::Invalid(shape));
        }
        Ok(td)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("s td {} {} {}\n", self.bags.len(), self.width + 1, self.n);
        for (i, b) in self.bags.iter().enumerate() {
            out.push_str(&format!("b {}", i + 1));
            for &v in b {
                out.push_str(&format!(" {}", v + 1));
            }
            out.push('\n');
        }
        for (a, nbrs) in self.tree.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push_str(&format!("{} {}\n", a + 1, b + 1));
                }
            }
        }
        out
    }

    fn is_tree(&self) -> bool {
        let nb = self.bags.len();
        if nb == 0 {
            return self.n == 0;
        }
        let edges: usize = self.tree.iter().map(|x| x.len()).sum::<usize>() / 2;
        if edges != nb - 1 {
            return false;
        }
        let mut seen = vec![false; nb];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(b) = stack.pop() {
            for &c in &self.tree[b] {
                if !seen[c] {
                    seen[c] = true;
                    count += 1;
                    stack.push(c);
                }
            }
        }
        count == nb
    }

    /// Checks that need no graph: tree shape, width, properties 1 and 2.
    fn shape_violations(&self) -> Vec<TdViolation> {
        let mut out = Vec::new();
        if !self.is_tree() {
            out.push(TdViolation::NotATree);
            return out;
        }
        for (i, b) in self.bags.iter().enumerate() {
            if b.len() > self.width + 1 {
                out.push(TdViolation::WidthExceeded {
                    bag: i,
                    size: b.len(),
                    width: self.width,
                });
            }
        }
        let holders = self.holders();
        for (v, hs) in holders.iter().enumerate() {
            if hs.is_empty() {
                out.push(TdViolation::VertexUncovered { vertex: v });
            } else if !self.connected_within(hs) {
                out.push(TdViolation::DisconnectedBags { vertex: v });
            }
        }
        out
    }

    /// Bag ids containing each vertex.
    fn holders(&self) -> Vec<Vec<usize>> {
        let mut holders = vec![Vec::new(); self.n];
        for (i, b) in self.bags.iter().enumerate() {
            for &v in b {
                holders[v].push(i);
            }
        }
        holders
    }

    fn connected_within(&self, bag_ids: &[usize]) -> bool {
        let inside: std::collections::HashSet<usize> = bag_ids.iter().copied().collect();
        let mut seen = std::collections::HashSet::from([bag_ids[0]]);
        let mut stack = vec![bag_ids[0]];
        while let Some(b) = stack.pop() {
            for &c in &self.tree[b] {
                if inside.contains(&c) && seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen.len() == inside.len()
    }

    /// Full validation against `g`, listing every violated property.
    pub fn validate(&self, g: &Graph) -> Result<(), TdError> {
        if self.n != g.n() {
            return Err(TdError::Invalid(vec![TdViolation::VertexCountMismatch {
                td: self.n,
                graph: g.n(),
            }]));
        }
        let mut out = self.shape_violations();
        if !out.contains(&TdViolation::NotATree) {
            let holders = self.holders();
            for e in g.edges() {
                let (a, b) = e.key();
                if !holders[a].iter().any(|&i| self.bags[i].contains(b)) {
                    out.push(TdViolation::EdgeUncovered { u: a, v: b });
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(TdError::Invalid(out))
        }
    }

    /// The decomposition induced on the local vertex set `to_global`
    /// (local id `i` is global vertex `to_global[i]`). Bags keep their tree.
    pub fn restrict(&self, to_global: &[VertexId]) -> TreeDecomposition {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in to_global.iter().enumerate() {
            local[v] = i;
        }
        let n = to_global.len();
        let bags = self
            .bags
            .iter()
            .map(|b| {
                VertexSet::new(
                    n,
                    b.iter()
                        .filter(|&&v| local[v] != usize::MAX)
                        .map(|&v| local[v]),
                )
            })
            .collect();
        TreeDecomposition {
            n,
            bags,
            tree: self.tree.clone(),
            width: self.width,
        }
    }

    /// For each bag, the vertices whose highest holder (rooted at bag 0) is it,
    /// plus parent and preorder of the rooted bag tree.
    fn rooted(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let nb = self.bags.len();
        let mut parent = vec![usize::MAX; nb];
        let mut order = Vec::with_capacity(nb);
        let mut stack = vec![0];
        let mut seen = vec![false; nb];
        seen[0] = true;
        while let Some(b) = stack.pop() {
            order.push(b);
            for &c in self.tree[b].iter().rev() {
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = b;
                    stack.push(c);
                }
            }
        }
        let mut top = vec![usize::MAX; self.n];
        for &b in &order {
            for &v in &self.bags[b] {
                if top[v] == usize::MAX {
                    top[v] = b;
                }
            }
        }
        (parent, order, top)
    }

    /// Bags that certify balance by subtree counting, ordered by
    /// (bag size, bag id). Never empty for a valid decomposition.
    pub(crate) fn balanced_bag_candidates(&self) -> Vec<usize> {
        let nb = self.bags.len();
        if nb == 0 {
            return Vec::new();
        }
        let (parent, order, top) = self.rooted();
        let mut own = vec![0usize; nb];
        for &t in &top {
            if t != usize::MAX {
                own[t] += 1;
            }
        }
        let mut weight = own.clone();
        for &b in order.iter().rev() {
            if parent[b] != usize::MAX {
                weight[parent[b]] += weight[b];
            }
        }
        let n = self.n;
        let mut ok = Vec::new();
        for b in 0..nb {
            let mut worst = 0;
            for &c in &self.tree[b] {
                if c != parent[b] {
                    worst = worst.max(weight[c]);
                }
            }
            if parent[b] != usize::MAX {
                let above_in_bag = self.bags[b].iter().filter(|&&v| top[v] != b).count();
                worst = worst.max(n - weight[b] - above_in_bag);
            }
            if 2 * worst <= n {
                ok.push(b);
            }
        }
        ok.sort_by_key(|&b| (self.bags[b].len(), b));
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DedupPolicy, Edge};

    fn path_graph(n: usize) -> Graph {
        Graph::new(
            n,
            (0..n - 1).map(|i| Edge::new(i, i + 1, 1)).collect(),
            DedupPolicy::Reject,
        )
        .unwrap()
    }

    fn path_td(n: usize) -> String {
        let mut s = format!("s td {} 2 {}\n", n - 1, n);
        for i in 0..n - 1 {
            s.push_str(&format!("b {} {} {}\n", i + 1, i + 1, i + 2));
        }
        for i in 1..n - 1 {
            s.push_str(&format!("{} {}\n", i, i + 1));
        }
        s
    }

    #[test]
    fn path_decomposition_has_width_one() {
        let td = TreeDecomposition::parse(&path_td(5)).unwrap();
        assert_eq!(td.width, 1);
        td.validate(&path_graph(5)).unwrap();
        let again = TreeDecomposition::parse(&td.to_text()).unwrap();
        assert_eq!(again, td);
    }

    #[test]
    fn star_in_single_bag() {
        let n = 6;
        let star = Graph::new(
            n,
            (1..n).map(|i| Edge::new(0, i, 1)).collect(),
            DedupPolicy::Reject,
        )
        .unwrap();
        let td = TreeDecomposition::parse("s td 1 6 6\nb 1 1 2 3 4 5 6\n").unwrap();
        assert_eq!(td.width, n - 1);
        td.validate(&star).unwrap();
    }

    #[test]
    fn missing_edge_coverage_names_property_three() {
        let tri = Graph::new(
            3,
            vec![Edge::new(0, 1, 1), Edge::new(1, 2, 1), Edge::new(0, 2, 1)],
            DedupPolicy::Reject,
        )
        .unwrap();
        let td = TreeDecomposition::parse(&path_td(3)).unwrap();
        let err = td.validate(&tri).unwrap_err();
        assert_eq!(
            err,
            TdError::Invalid(vec![TdViolation::EdgeUncovered { u: 0, v: 2 }])
        );
        assert!(err.to_string().contains("property 3"));
    }

    #[test]
    fn detects_disconnected_holders() {
        let text = "s td 3 2 3\nb 1 1 2\nb 2 2 3\nb 3 1 3\n1 2\n2 3\n";
        let err = TreeDecomposition::parse(text).unwrap_err();
        assert_eq!(
            err,
            TdError::Invalid(vec![TdViolation::DisconnectedBags { vertex: 0 }])
        );
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(
            TreeDecomposition::parse("s tw 1 2 3\n"),
            Err(TdError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            TreeDecomposition::parse("b 1 1\n"),
            Err(TdError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn restriction_stays_valid() {
        let g = path_graph(6);
        let td = TreeDecomposition::parse(&path_td(6)).unwrap();
        let keep = VertexSet::new(6, [1, 2, 3]);
        let sub = g.induced_subgraph(&keep).unwrap();
        let r = td.restrict(&sub.to_parent);
        r.validate(&sub.graph).unwrap();
    }
}
