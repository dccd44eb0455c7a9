use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::{CoverTrees, QueryError};
use crate::cover::{Cover, CoverKind, CoverTree};
use crate::graph::{VertexId, Weight, UNREACHABLE};
use crate::ramsey::Hst;
use crate::ratio::Ratio;
use crate::treekit::{label_distance, Tree, TreeLabel, TreeLabeling};

/// LCA label of an HST leaf along its heavy-path decomposition: one entry
/// per heavy path on the root-to-leaf walk, holding the path head, the
/// depth on that path where the walk leaves it, and the label there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HstLabel {
    pub point: VertexId,
    pub entries: Vec<(u32, u32, Weight)>,
}

impl HstLabel {
    /// Head and depth pack into one word, the label takes another.
    pub fn words(&self) -> usize {
        2 * self.entries.len()
    }

    pub fn all(h: &Hst) -> Vec<HstLabel> {
        let nodes = h.nodes();
        let mut leaves = vec![0usize; nodes.len()];
        let mut order = Vec::with_capacity(nodes.len());
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            order.push(x);
            stack.extend(nodes[x].children.iter().copied());
        }
        for &x in order.iter().rev() {
            leaves[x] = if nodes[x].children.is_empty() {
                1
            } else {
                nodes[x].children.iter().map(|&c| leaves[c]).sum()
            };
        }
        let heavy = |x: usize| {
            nodes[x]
                .children
                .iter()
                .copied()
                .max_by_key(|&c| (leaves[c], std::cmp::Reverse(c)))
        };
        let mut out = Vec::new();
        let mut stack = vec![(0usize, vec![(0u32, 0u32, nodes[0].label)])];
        while let Some((x, path)) = stack.pop() {
            if let Some(p) = nodes[x].point {
                out.push(HstLabel {
                    point: p,
                    entries: path.clone(),
                });
            }
            let hv = heavy(x);
            for &c in &nodes[x].children {
                let mut next = path.clone();
                if Some(c) == hv {
                    let last = next.last_mut().expect("path is never empty");
                    last.1 += 1;
                    last.2 = nodes[c].label;
                } else {
                    next.push((c as u32, 0, nodes[c].label));
                }
                stack.push((c, next));
            }
        }
        out.sort_by_key(|l| l.point);
        out
    }

    /// `ℓ(LCA)` of the two leaves.
    pub fn distance(a: &HstLabel, b: &HstLabel) -> Weight {
        if a.point == b.point {
            return 0;
        }
        for i in 0..a.entries.len().min(b.entries.len()) {
            let (x, y) = (a.entries[i], b.entries[i]);
            debug_assert_eq!(x.0, y.0);
            if x.1 != y.1 {
                return if x.1 < y.1 { x.2 } else { y.2 };
            }
            match (a.entries.get(i + 1), b.entries.get(i + 1)) {
                (Some(p), Some(q)) if p.0 == q.0 => continue,
                _ => return x.2,
            }
        }
        unreachable!("distinct leaves diverge")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LabelPayload {
    Tree(TreeLabel),
    Hst(HstLabel),
}

impl LabelPayload {
    pub fn words(&self) -> usize {
        match self {
            LabelPayload::Tree(l) => l.words(),
            LabelPayload::Hst(l) => l.words(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Centroid labels of trees.
    Tree,
    /// LCA labels of HSTs.
    HstDirect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub vertex: VertexId,
    pub build: u64,
    /// `(tree id, label in that tree)`, by ascending tree id.
    pub entries: Vec<(u32, LabelPayload)>,
}

impl VertexLabel {
    /// One word for the build id and one per tree id, plus the payloads.
    pub fn words(&self) -> usize {
        1 + self
            .entries
            .iter()
            .map(|(_, p)| 1 + p.words())
            .sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAnswer {
    /// `UNREACHABLE` when the labels share no tree.
    pub estimate: Weight,
    pub tree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceLabeling {
    pub build: u64,
    pub mode: LabelMode,
    pub bound: Ratio,
    labels: Vec<VertexLabel>,
}

fn tree_fingerprint(t: &Tree, h: &mut DefaultHasher) {
    t.nodes().hash(h);
    t.edges().hash(h);
}

/// Labels for a spanning or metric cover, or LCA labels for an HST cover.
pub fn build_distance_labeling(cover: &Cover) -> Result<DistanceLabeling, QueryError> {
    if cover.kind != CoverKind::Hst {
        return DistanceLabeling::from_trees(&CoverTrees::new(cover)?);
    }
    let mut h = DefaultHasher::new();
    (cover.n, cover.trees.len()).hash(&mut h);
    let mut per_vertex: Vec<Vec<(u32, LabelPayload)>> = vec![Vec::new(); cover.n];
    for (i, t) in cover.trees.iter().enumerate() {
        let CoverTree::Hst(hst) = t else {
            return Err(QueryError::HstCover);
        };
        for node in hst.nodes() {
            (node.label, node.point, &node.children).hash(&mut h);
        }
        for l in HstLabel::all(hst) {
            per_vertex[l.point].push((i as u32, LabelPayload::Hst(l)));
        }
    }
    Ok(DistanceLabeling::assemble(
        h.finish(),
        LabelMode::HstDirect,
        cover.guarantee(),
        per_vertex,
    ))
}

impl DistanceLabeling {
    pub fn from_trees(trees: &CoverTrees) -> Result<Self, QueryError> {
        let mut h = DefaultHasher::new();
        (trees.n, trees.trees.len(), trees.converted).hash(&mut h);
        let mut per_vertex: Vec<Vec<(u32, LabelPayload)>> = vec![Vec::new(); trees.n];
        for (i, t) in trees.trees.iter().enumerate() {
            tree_fingerprint(t, &mut h);
            for l in TreeLabeling::new(t, i as u64)?.labels() {
                per_vertex[l.vertex].push((i as u32, LabelPayload::Tree(l.clone())));
            }
        }
        Ok(Self::assemble(
            h.finish(),
            LabelMode::Tree,
            trees.bound,
            per_vertex,
        ))
    }

    fn assemble(
        build: u64,
        mode: LabelMode,
        bound: Ratio,
        per_vertex: Vec<Vec<(u32, LabelPayload)>>,
    ) -> Self {
        let labels = per_vertex
            .into_iter()
            .enumerate()
            .map(|(vertex, entries)| VertexLabel {
                vertex,
                build,
                entries,
            })
            .collect();
        Self {
            build,
            mode,
            bound,
            labels,
        }
    }

    pub fn label(&self, v: VertexId) -> Result<&VertexLabel, QueryError> {
        self.labels.get(v).ok_or(QueryError::UnknownVertex(v))
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn max_label_words(&self) -> usize {
        self.labels
            .iter()
            .map(VertexLabel::words)
            .max()
            .unwrap_or(0)
    }
}

/// Merges the two tree lists and returns the smallest distance over the
/// shared trees with the tree that attains it (lowest id on ties). The
/// second value is the number of list entries inspected.
pub(crate) fn label_query_counted(
    a: &VertexLabel,
    b: &VertexLabel,
) -> Result<(LabelAnswer, usize), QueryError> {
    if a.build != b.build {
        return Err(QueryError::BuildMismatch {
            left: a.build,
            right: b.build,
        });
    }
    let mut best = LabelAnswer {
        estimate: UNREACHABLE,
        tree: None,
    };
    let (mut i, mut j, mut work) = (0, 0, 0);
    while i < a.entries.len() && j < b.entries.len() {
        work += 1;
        let (ta, tb) = (a.entries[i].0, b.entries[j].0);
        if ta < tb {
            i += 1;
        } else if ta > tb {
            j += 1;
        } else {
            let d = match (&a.entries[i].1, &b.entries[j].1) {
                (LabelPayload::Tree(x), LabelPayload::Tree(y)) => {
                    work += x.depth() + 1;
                    label_distance(x, y)?
                }
                (LabelPayload::Hst(x), LabelPayload::Hst(y)) => {
                    work += x.entries.len();
                    HstLabel::distance(x, y)
                }
                _ => {
                    return Err(QueryError::BuildMismatch {
                        left: a.build,
                        right: b.build,
                    })
                }
            };
            if d < best.estimate {
                best = LabelAnswer {
                    estimate: d,
                    tree: Some(ta as usize),
                };
            }
            i += 1;
            j += 1;
        }
    }
    Ok((best, work))
}

impl DistanceLabeling {
    pub fn query(a: &VertexLabel, b: &VertexLabel) -> Result<LabelAnswer, QueryError> {
        Ok(label_query_counted(a, b)?.0)
    }
}
