mod common;

use common::{floyd, hst_dist, tree_matrix};
use treecover::generators::{gnp, grid, random_tree};
use treecover::graph::{exact_distances, Weight};
use treecover::ramsey::{
    extend_ultrametric, hst_from_ultrametric, metric_ramsey, ramsey_tree_pair,
    spanning_ramsey_forest, um_to_tree, FiniteMetric, Hst, SpanningStrategy, Ultrametric,
};

fn graph_metric(g: &treecover::graph::Graph) -> FiniteMetric {
    let d = floyd(g);
    FiniteMetric::from_fn((0..g.n()).collect(), |a, b| d[a][b], Weight::MAX)
}

/// `s^k >= m^(k-1)` in plain integers.
fn cardinality(s: usize, m: usize, k: u32) -> bool {
    (s as u128).pow(k) >= (m as u128).pow(k - 1)
}

#[test]
fn ramsey_subsets_are_large_and_certified() {
    for (i, g) in [grid(6, 6, 5, 1), gnp(50, 0.1, 7, 2), random_tree(64, 9, 3)]
        .iter()
        .enumerate()
    {
        let m = graph_metric(g);
        for k in 1..=4 {
            let out = metric_ramsey(&m, k, i as u64).unwrap();
            assert!(
                cardinality(out.subset.len(), g.n(), k),
                "k={k} kept {}",
                out.subset.len()
            );
            if k == 1 {
                assert_eq!(out.subset.len(), g.n());
            }
            assert_eq!(out.hst.points(), out.subset);
            // α is the exact worst ratio over the subset
            let mut worst = (1u128, 1u128);
            for &x in &out.subset {
                for &y in &out.subset {
                    if x < y {
                        let rho = hst_dist(&out.hst, x, y) as u128;
                        let d = m.get(x, y) as u128;
                        assert!(rho >= d);
                        if rho * worst.1 > worst.0 * d {
                            worst = (rho, d);
                        }
                    }
                }
            }
            assert_eq!(out.alpha, treecover::ratio::Ratio::new(worst.0, worst.1));
        }
    }
}

#[test]
fn um_to_tree_sandwich() {
    let g = gnp(45, 0.12, 6, 8);
    let m = graph_metric(&g);
    for k in 1..=3 {
        let out = metric_ramsey(&m, k, 5).unwrap();
        let t = um_to_tree(&out.hst).unwrap();
        assert_eq!(t.nodes(), &out.subset[..]);
        let tm = tree_matrix(g.n(), t.edges(), t.nodes());
        for &x in &out.subset {
            for &y in &out.subset {
                if x != y {
                    let rho = hst_dist(&out.hst, x, y);
                    assert!(
                        rho <= tm[x][y] && tm[x][y] <= 8 * rho,
                        "({x},{y}) rho {rho} tree {}",
                        tm[x][y]
                    );
                }
            }
        }
    }
}

#[test]
fn extension_dominates_and_stays_close_to_subset() {
    let g = grid(6, 7, 4, 2);
    let m = graph_metric(&g);
    for k in 2..=3 {
        let out = metric_ramsey(&m, k, 1).unwrap();
        let ext = extend_ultrametric(&m, &out.hst, out.alpha).unwrap();
        let a = out.alpha;
        for x in 0..g.n() {
            for y in 0..g.n() {
                let (r, d) = (ext.get(x, y), m.get(x, y));
                assert!(r >= d);
                if out.subset.contains(&y) {
                    assert!(
                        r as u128 * a.den <= 6 * a.num * d as u128,
                        "({x},{y}) {r} vs 6*{a}*{d}"
                    );
                }
            }
        }
        // strong triangle inequality checked directly
        for x in 0..g.n() {
            for y in 0..g.n() {
                for z in 0..g.n() {
                    assert!(ext.get(x, z) <= ext.get(x, y).max(ext.get(y, z)));
                }
            }
        }
    }
}

#[test]
fn hst_round_trips_through_ultrametric() {
    let pts: Vec<usize> = (0..9).map(|i| i * 3).collect();
    let um = Ultrametric::from_fn(pts.clone(), |i, j| {
        1 << (usize::BITS - (i ^ j).leading_zeros())
    });
    let h = hst_from_ultrametric(&um).unwrap();
    assert_eq!(h.to_ultrametric(), um);
    assert!(h.shape_violation().is_none());
    for i in 0..9 {
        for j in 0..9 {
            if i != j {
                assert_eq!(hst_dist(&h, pts[i], pts[j]), um.get(i, j));
            }
        }
    }
}

#[test]
fn non_ultrametric_is_rejected() {
    let um = Ultrametric::from_fn(vec![0, 1, 2], |i, j| {
        if i + j == 1 {
            1
        } else if i + j == 2 {
            2
        } else {
            5
        }
    });
    assert!(hst_from_ultrametric(&um).is_err());
}

#[test]
fn hst_json_is_validated() {
    let h = hst_from_ultrametric(&Ultrametric::from_fn(vec![4, 6], |_, _| 3)).unwrap();
    let text = serde_json::to_string(&h).unwrap();
    let back: Hst = serde_json::from_str(&text).unwrap();
    assert_eq!(back, h);
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["nodes"][1]["parent"] = serde_json::json!(2);
    assert!(serde_json::from_value::<Hst>(v).is_err());
}

#[test]
fn tree_pair_dominates() {
    let g = grid(5, 6, 3, 4);
    let m = graph_metric(&g);
    let demand: Vec<usize> = (0..30).step_by(3).collect();
    let p = ramsey_tree_pair(&m, &demand, 2, 7).unwrap();
    let tm = tree_matrix(g.n(), p.t2.edges(), p.t2.nodes());
    for x in 0..30 {
        for y in 0..30 {
            if x != y {
                assert!(hst_dist(&p.t1, x, y) >= m.get(x, y));
                assert!(tm[x][y] >= m.get(x, y));
            }
        }
    }
}

#[test]
fn forest_stretch_is_measured_exactly() {
    let g = gnp(40, 0.1, 5, 6);
    let dm = exact_distances(&g);
    let d = floyd(&g);
    for strategy in [SpanningStrategy::HstRealization, SpanningStrategy::SptStar] {
        for k in 1..=3 {
            let f = spanning_ramsey_forest(&g, &dm, &g.all_vertices(), k, strategy, 2).unwrap();
            assert!(cardinality(f.subset.len(), g.n(), k));
            let mut worst = (1u128, 1u128);
            for ct in &f.trees {
                for e in ct.tree.edges() {
                    assert_eq!(g.edge_weight(e.u, e.v), Some(e.w));
                }
                let tm = tree_matrix(g.n(), ct.tree.edges(), ct.tree.nodes());
                for &u in ct.tree.nodes() {
                    if !f.subset.contains(u) {
                        continue;
                    }
                    for &v in ct.tree.nodes() {
                        if u != v {
                            let (x, y) = (tm[u][v] as u128, d[u][v] as u128);
                            if x * worst.1 > worst.0 * y {
                                worst = (x, y);
                            }
                        }
                    }
                }
            }
            assert_eq!(
                f.stretch,
                treecover::ratio::Ratio::new(worst.0, worst.1),
                "{strategy:?} k={k}"
            );
        }
    }
}
