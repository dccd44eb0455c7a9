//! Deterministic instance families.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::{DedupPolicy, Edge, Graph, VertexSet, Weight};
use crate::rng::rng_for;
use crate::separator::TreeDecomposition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    /// Random `k`-tree with each non-spanning edge kept with probability `keep`.
    PartialKTree {
        n: usize,
        k: usize,
        keep: f64,
        max_weight: Weight,
    },
    Grid {
        rows: usize,
        cols: usize,
        max_weight: Weight,
    },
    RandomTree {
        n: usize,
        max_weight: Weight,
    },
    /// `G(n, p)` with components chained together so the result is connected.
    Gnp {
        n: usize,
        p: f64,
        max_weight: Weight,
    },
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
}

pub struct Generated {
    pub graph: Graph,
    pub decomposition: Option<TreeDecomposition>,
}

fn weight(rng: &mut crate::rng::Rng, max: Weight) -> Weight {
    if max <= 1 {
        1
    } else {
        rng.gen_range(1..=max)
    }
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Generated, GenError> {
    let bad = |m: &str| Err(GenError::Invalid(m.to_string()));
    match *spec {
        GenSpec::PartialKTree {
            n,
            k,
            keep,
            max_weight,
        } => {
            if n == 0 || k == 0 || !(0.0..=1.0).contains(&keep) {
                return bad("partial-k-tree needs n >= 1, k >= 1, keep in [0, 1]");
            }
            let (graph, td) = partial_k_tree(n, k, keep, max_weight, seed);
            Ok(Generated {
                graph,
                decomposition: Some(td),
            })
        }
        GenSpec::Grid {
            rows,
            cols,
            max_weight,
        } => {
            if rows == 0 || cols == 0 {
                return bad("grid needs positive dimensions");
            }
            Ok(Generated {
                graph: grid(rows, cols, max_weight, seed),
                decomposition: None,
            })
        }
        GenSpec::RandomTree { n, max_weight } => {
            if n == 0 {
                return bad("random-tree needs n >= 1");
            }
            Ok(Generated {
                graph: random_tree(n, max_weight, seed),
                decomposition: None,
            })
        }
        GenSpec::Gnp { n, p, max_weight } => {
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return bad("gnp needs n >= 1, p in [0, 1]");
            }
            Ok(Generated {
                graph: gnp(n, p, max_weight, seed),
                decomposition: None,
            })
        }
    }
}

fn build(n: usize, edges: Vec<Edge>) -> Graph {
    Graph::new(n, edges, DedupPolicy::Reject).expect("generator emits simple graphs")
}

/// A random `k`-tree on `n` vertices, thinned, with its width-`k` decomposition.
/// Every vertex keeps at least one edge to its attachment clique, so the
/// graph stays connected.
pub fn partial_k_tree(
    n: usize,
    k: usize,
    keep: f64,
    max_w: Weight,
    seed: u64,
) -> (Graph, TreeDecomposition) {
    let mut rng = rng_for(seed, &[0x6b74]);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let base = n.min(k + 1);
    let mut edges = Vec::new();
    for i in 0..base {
        for j in i + 1..base {
            if j == i + 1 || rng.gen_bool(keep) {
                edges.push(Edge::new(perm[i], perm[j], weight(&mut rng, max_w)));
            }
        }
    }
    let mut bags: Vec<Vec<usize>> = vec![(0..base).collect()];
    let mut tree: Vec<Vec<usize>> = vec![Vec::new()];
    // k-cliques available for attachment, each with a bag that contains it.
    let mut cliques: Vec<(Vec<usize>, usize)> = Vec::new();
    if base == k + 1 {
        for drop in 0..base {
            let c = (0..base).filter(|&x| x != drop).collect();
            cliques.push((c, 0));
        }
    }
    for v in base..n {
        let (clique, home) = cliques[rng.gen_range(0..cliques.len())].clone();
        let forced = clique[rng.gen_range(0..clique.len())];
        for &x in &clique {
            if x == forced || rng.gen_bool(keep) {
                edges.push(Edge::new(perm[x], perm[v], weight(&mut rng, max_w)));
            }
        }
        let id = bags.len();
        let mut bag = clique.clone();
        bag.push(v);
        bags.push(bag);
        tree.push(vec![home]);
        tree[home].push(id);
        for drop in 0..clique.len() {
            let mut c: Vec<usize> = clique
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, &x)| x)
                .collect();
            c.push(v);
            cliques.push((c, id));
        }
    }
    let bags = bags
        .into_iter()
        .map(|b| VertexSet::new(n, b.into_iter().map(|x| perm[x])))
        .collect();
    let td = TreeDecomposition {
        n,
        bags,
        tree,
        width: base - 1,
    };
    (build(n, edges), td)
}

pub fn grid(rows: usize, cols: usize, max_w: Weight, seed: u64) -> Graph {
    let mut rng = rng_for(seed, &[0x6772]);
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push(Edge::new(id(r, c), id(r, c + 1), weight(&mut rng, max_w)));
            }
            if r + 1 < rows {
                edges.push(Edge::new(id(r, c), id(r + 1, c), weight(&mut rng, max_w)));
            }
        }
    }
    build(rows * cols, edges)
}

pub fn random_tree(n: usize, max_w: Weight, seed: u64) -> Graph {
    let mut rng = rng_for(seed, &[0x7274]);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let edges = (1..n)
        .map(|i| {
            let p = rng.gen_range(0..i);
            Edge::new(perm[p], perm[i], weight(&mut rng, max_w))
        })
        .collect();
    build(n, edges)
}

pub fn gnp(n: usize, p: f64, max_w: Weight, seed: u64) -> Graph {
    let mut rng = rng_for(seed, &[0x676e]);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push(Edge::new(u, v, weight(&mut rng, max_w)));
            }
        }
    }
    let g = build(n, edges.clone());
    let comps = g.connected_components();
    for pair in comps.windows(2) {
        let a = *pair[0].as_slice().choose(&mut rng).expect("non-empty");
        let b = *pair[1].as_slice().choose(&mut rng).expect("non-empty");
        edges.push(Edge::new(a, b, weight(&mut rng, max_w)));
    }
    build(n, edges)
}
