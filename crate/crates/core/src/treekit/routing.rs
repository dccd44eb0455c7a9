use serde::{Deserialize, Serialize};

use super::tree::{RootedTree, Tree, NONE};
use super::TreeError;
use crate::graph::{VertexId, Weight};

/// Per-vertex routing table: four words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingTable {
    pub vertex: VertexId,
    pub enter: u64,
    pub exit: u64,
    /// Heavy child, `None` at leaves.
    pub heavy: Option<VertexId>,
    pub parent: Option<VertexId>,
}

impl RoutingTable {
    pub const WORDS: usize = 4;

    fn holds(&self, time: u64) -> bool {
        self.enter <= time && time <= self.exit
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightEdge {
    pub parent: VertexId,
    pub child: VertexId,
    pub enter: u64,
    pub exit: u64,
}

/// Destination label: DFS entry time plus the light edges on the root path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingLabel {
    pub vertex: VertexId,
    pub enter: u64,
    pub light: Vec<LightEdge>,
}

impl RoutingLabel {
    pub fn words(&self) -> usize {
        1 + 4 * self.light.len()
    }
}

/// The message header: an index into the destination label's light edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeHeader {
    pub cursor: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Arrived,
    Forward {
        next: VertexId,
        header: TreeHeader,
        work: usize,
    },
}

/// Heavy-light interval routing on one tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeRouting {
    tables: Vec<RoutingTable>,
    labels: Vec<RoutingLabel>,
    /// When set, headers carry no cursor and every hop scans the label.
    pub strict: bool,
}

impl TreeRouting {
    pub fn new(t: &Tree) -> Result<Self, TreeError> {
        Ok(Self::from_rooted(&t.rooted(None)?))
    }

    pub fn from_rooted(r: &RootedTree) -> Self {
        let n = r.len();
        let mut size = vec![1usize; n];
        for &x in r.preorder.iter().rev() {
            if r.parent[x] != NONE {
                size[r.parent[x]] += size[x];
            }
        }
        let heavy: Vec<usize> = (0..n)
            .map(|x| {
                r.children[x]
                    .iter()
                    .copied()
                    .max_by_key(|&c| (size[c], std::cmp::Reverse(c)))
                    .unwrap_or(NONE)
            })
            .collect();
        // DFS times, heavy child first.
        let mut enter = vec![0u64; n];
        let mut exit = vec![0u64; n];
        let mut clock = 0u64;
        let mut stack = vec![(r.root, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                exit[x] = clock - 1;
                continue;
            }
            enter[x] = clock;
            clock += 1;
            stack.push((x, true));
            for &c in r.children[x].iter().rev() {
                if c != heavy[x] {
                    stack.push((c, false));
                }
            }
            if heavy[x] != NONE {
                stack.push((heavy[x], false));
            }
        }
        let tables = (0..n)
            .map(|x| RoutingTable {
                vertex: r.nodes[x],
                enter: enter[x],
                exit: exit[x],
                heavy: (heavy[x] != NONE).then(|| r.nodes[heavy[x]]),
                parent: (r.parent[x] != NONE).then(|| r.nodes[r.parent[x]]),
            })
            .collect();
        let mut light: Vec<Vec<LightEdge>> = vec![Vec::new(); n];
        for &x in &r.preorder {
            let p = r.parent[x];
            if p == NONE {
                continue;
            }
            let mut list = light[p].clone();
            if heavy[p] != x {
                list.push(LightEdge {
                    parent: r.nodes[p],
                    child: r.nodes[x],
                    enter: enter[x],
                    exit: exit[x],
                });
            }
            light[x] = list;
        }
        let labels = (0..n)
            .map(|x| RoutingLabel {
                vertex: r.nodes[x],
                enter: enter[x],
                light: std::mem::take(&mut light[x]),
            })
            .collect();
        Self {
            tables,
            labels,
            strict: false,
        }
    }

    fn index(&self, v: VertexId) -> Result<usize, TreeError> {
        self.tables
            .binary_search_by_key(&v, |t| t.vertex)
            .map_err(|_| TreeError::UnknownVertex(v))
    }

    pub fn table(&self, v: VertexId) -> Result<&RoutingTable, TreeError> {
        Ok(&self.tables[self.index(v)?])
    }

    pub fn label(&self, v: VertexId) -> Result<&RoutingLabel, TreeError> {
        Ok(&self.labels[self.index(v)?])
    }

    pub fn max_label_words(&self) -> usize {
        self.labels.iter().map(|l| l.words()).max().unwrap_or(0)
    }

    /// Header written by the origin: the first light edge of the destination
    /// label whose subtree does not contain the origin.
    pub fn initial_header(
        &self,
        origin: &RoutingTable,
        dest: &RoutingLabel,
    ) -> (TreeHeader, usize) {
        if self.strict {
            return (TreeHeader { cursor: 0 }, 0);
        }
        let i = dest
            .light
            .partition_point(|e| e.enter <= origin.enter && origin.enter <= e.exit);
        (TreeHeader { cursor: i as u32 }, dest.light.len().max(1))
    }

    /// One forwarding decision at the vertex owning `table`.
    pub fn step(&self, table: &RoutingTable, dest: &RoutingLabel, header: TreeHeader) -> Step {
        if table.vertex == dest.vertex {
            return Step::Arrived;
        }
        if !table.holds(dest.enter) {
            let next = table
                .parent
                .expect("non-ancestor of the destination has a parent");
            return Step::Forward {
                next,
                header,
                work: 1,
            };
        }
        if self.strict {
            let mut work = 1;
            for e in &dest.light {
                work += 1;
                if e.parent == table.vertex {
                    return Step::Forward {
                        next: e.child,
                        header,
                        work,
                    };
                }
            }
            let next = table
                .heavy
                .expect("ancestor of the destination has children");
            return Step::Forward { next, header, work };
        }
        let c = header.cursor as usize;
        match dest.light.get(c) {
            Some(e) if e.parent == table.vertex => Step::Forward {
                next: e.child,
                header: TreeHeader {
                    cursor: header.cursor + 1,
                },
                work: 2,
            },
            _ => Step::Forward {
                next: table.heavy.expect("ancestor has a heavy child"),
                header,
                work: 2,
            },
        }
    }

    /// Full simulation; returns the vertex sequence and per-hop work.
    pub fn route(
        &self,
        u: VertexId,
        v: VertexId,
    ) -> Result<(Vec<VertexId>, Vec<usize>), TreeError> {
        let dest = self.label(v)?;
        let mut at = self.table(u)?;
        let (mut header, origin_work) = self.initial_header(at, dest);
        let mut walk = vec![u];
        let mut work = vec![origin_work];
        for _ in 0..=self.tables.len() {
            match self.step(at, dest, header) {
                Step::Arrived => return Ok((walk, work)),
                Step::Forward {
                    next,
                    header: h,
                    work: w,
                } => {
                    header = h;
                    walk.push(next);
                    work.push(w);
                    at = self.table(next)?;
                }
            }
        }
        Err(TreeError::NotATree("route did not terminate".into()))
    }

    /// Weight of a walk produced by `route`, given edge weights.
    pub fn walk_weight(walk: &[VertexId], weight: impl Fn(VertexId, VertexId) -> Weight) -> Weight {
        walk.windows(2).map(|w| weight(w[0], w[1])).sum()
    }
}
