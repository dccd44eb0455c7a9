mod common;

use common::{chain_weight, floyd, through, tree_dists, within};
use treecover::cover::{
    separator_recursion_cover, verify_cover, BuildTrace, Cover, CoverConfig, CoverKind, CoverTree,
    DEFAULT_VERIFY_CAP,
};
use treecover::generators::{grid, partial_k_tree, random_tree};
use treecover::graph::{
    dijkstra, exact_distances, DedupPolicy, Edge, Graph, VertexSet, UNREACHABLE,
};
use treecover::queries::*;
use treecover::ratio::Ratio;
use treecover::separator::SeparatorProvider;
use treecover::treekit::Tree;

fn cover(g: &Graph, k: u32, kind: CoverKind, full: bool) -> Cover {
    separator_recursion_cover(
        g,
        &SeparatorProvider::heuristic(),
        &CoverConfig::new(k, kind).full(full).seed(11),
    )
    .unwrap()
}

/// Cover made of one shortest-path tree of a connected graph.
fn spt_cover(g: &Graph, root: usize) -> Cover {
    let sp = dijkstra(g, root);
    let edges = (0..g.n())
        .filter_map(|v| sp.parent_edge[v])
        .map(|e| g.edge(e))
        .collect();
    Cover {
        n: g.n(),
        kind: CoverKind::Spanning,
        full: true,
        k: 1,
        trees: vec![CoverTree::Tree(Tree::new(0..g.n(), edges).unwrap())],
        alpha: Ratio::ONE,
        spanning_stretch: Ratio::ONE,
        glue_sentinel: 0,
        trace: BuildTrace::default(),
    }
}

#[test]
fn single_spt_on_a_tree_is_exact() {
    let g = random_tree(40, 9, 3);
    let d = floyd(&g);
    let c = spt_cover(&g, 0);
    let pr = build_path_reporting(&g, &c).unwrap();
    assert_eq!(pr.kind, PathKind::Spanning);
    for u in 0..40 {
        for v in 0..40 {
            let a = pr.query_path(u, v).unwrap();
            assert_eq!(a.weight, d[u][v]);
            assert_eq!(chain_weight(&a.path, u, v), Some(a.weight));
            if u == v {
                assert!(a.path.is_empty());
            }
        }
    }
}

#[test]
fn full_metric_cover_paths_on_grid() {
    let g = grid(5, 5, 1, 1);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Metric, true);
    let pr = build_path_reporting(&g, &c).unwrap();
    assert_eq!(pr.kind, PathKind::Emulator);
    let b = c.guarantee();
    for u in 0..25 {
        for v in 0..25 {
            let a = pr.query_path(u, v).unwrap();
            assert!(
                within(a.weight, d[u][v], b.num, b.den),
                "({u},{v}) {} vs {}",
                a.weight,
                d[u][v]
            );
            assert_eq!(chain_weight(&a.path, u, v), Some(a.weight));
            assert!(a.path.iter().all(|e| pr.in_underlying(e)));
        }
    }
}

#[test]
fn spanning_paths_stay_in_the_graph() {
    let g = grid(5, 5, 4, 2);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Spanning, true);
    let pr = build_path_reporting(&g, &c).unwrap();
    assert!(pr
        .underlying()
        .iter()
        .all(|e| g.edge_weight(e.u, e.v) == Some(e.w)));
    for e in g.edges() {
        let a = pr.query_path(e.u, e.v).unwrap();
        assert!(a.weight >= d[e.u][e.v]);
        assert!(a.path.iter().all(|x| pr.in_underlying(x)));
    }
}

#[test]
fn separate_components_are_unreachable() {
    let e = |u, v| Edge::new(u, v, 1);
    let g = Graph::new(5, vec![e(0, 1), e(1, 2), e(3, 4)], DedupPolicy::Reject).unwrap();
    let c = cover(&g, 1, CoverKind::Spanning, false);
    let pr = build_path_reporting(&g, &c).unwrap();
    assert_eq!(pr.query_distance(0, 4).unwrap(), UNREACHABLE);
    assert!(pr.query_path(2, 3).unwrap().path.is_empty());
    assert!(matches!(
        pr.query_distance(0, 9),
        Err(QueryError::UnknownVertex(9))
    ));
}

#[test]
fn random_queries_on_partial_two_tree() {
    let (g, _) = partial_k_tree(200, 2, 0.7, 10, 8);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Metric, true);
    let pr = build_path_reporting(&g, &c).unwrap();
    let b = c.guarantee();
    let mut x = 12345u64;
    for _ in 0..1000 {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let (u, v) = ((x >> 33) as usize % 200, (x >> 13) as usize % 200);
        let a = pr.query_path(u, v).unwrap();
        assert!(within(a.weight, d[u][v], b.num, b.den));
        assert_eq!(chain_weight(&a.path, u, v), Some(a.weight));
    }
}

#[test]
fn hst_covers_need_conversion() {
    let g = grid(4, 4, 1, 1);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Hst, true);
    assert!(matches!(
        build_path_reporting(&g, &c),
        Err(QueryError::HstCover)
    ));
    let trees = CoverTrees::from_hst_cover(&c).unwrap();
    assert!(trees.converted);
    let g6 = c.guarantee();
    assert_eq!(trees.bound, Ratio::new(8 * g6.num, g6.den));
    let pr = PathReporting::from_trees(&g, &trees).unwrap();
    for u in 0..16 {
        for v in 0..16 {
            let a = pr.query_path(u, v).unwrap();
            assert!(within(a.weight, d[u][v], trees.bound.num, trees.bound.den));
            assert_eq!(chain_weight(&a.path, u, v), Some(a.weight));
        }
    }
}

#[test]
fn pairwise_oracle_with_one_root_is_exact_through_it() {
    let g = grid(4, 4, 3, 5);
    let d = floyd(&g);
    let o = build_pairwise_do(&g, &VertexSet::new(16, [5]), 2, 0).unwrap();
    for u in 0..16 {
        for v in 0..16 {
            let q = o.query(u, v);
            assert!(q >= d[u][v]);
            if through(&d, u, v, &[5]) {
                assert_eq!(q, d[u][v]);
            }
        }
    }
}

#[test]
fn pairwise_oracle_on_grid() {
    let g = grid(4, 4, 1, 1);
    let d = floyd(&g);
    let a = [1, 5, 6, 9, 10, 14];
    for k in 1..=3 {
        let o = build_pairwise_do(&g, &VertexSet::new(16, a), k, 2).unwrap();
        let b = o.bound();
        let mut in_domain = 0;
        for u in 0..16 {
            for v in 0..16 {
                let q = o.query(u, v);
                assert!(q >= d[u][v]);
                if through(&d, u, v, &a) {
                    in_domain += 1;
                    assert!(
                        within(q, d[u][v], b.num, b.den),
                        "k={k} ({u},{v}) {q} vs {}",
                        d[u][v]
                    );
                }
            }
        }
        assert!(in_domain > 0);
    }
}

#[test]
fn separator_oracle_on_a_tree() {
    let g = random_tree(60, 7, 4);
    let d = floyd(&g);
    let o = build_separator_do(&g, &SeparatorProvider::heuristic(), 1, 9).unwrap();
    let b = o.bound();
    for u in 0..60 {
        for v in 0..60 {
            assert!(within(o.query(u, v).unwrap(), d[u][v], b.num, b.den));
        }
    }
}

#[test]
fn separator_oracle_on_partial_two_tree() {
    let (g, td) = partial_k_tree(150, 2, 0.7, 10, 6);
    let d = floyd(&g);
    let provider = SeparatorProvider::from_decomposition(&g, td).unwrap();
    let o = build_separator_do(&g, &provider, 2, 1).unwrap();
    let b = o.bound();
    for u in 0..150 {
        for v in 0..150 {
            assert!(within(o.query(u, v).unwrap(), d[u][v], b.num, b.den));
        }
    }
}

#[test]
fn separator_oracle_across_components() {
    let e = |u, v| Edge::new(u, v, 2);
    let g = Graph::new(
        6,
        vec![e(0, 1), e(1, 2), e(3, 4), e(4, 5)],
        DedupPolicy::Reject,
    )
    .unwrap();
    let o = build_separator_do(&g, &SeparatorProvider::heuristic(), 2, 0).unwrap();
    assert_eq!(o.query(0, 5).unwrap(), UNREACHABLE);
    assert_eq!(o.query(0, 2).unwrap(), 4);
    assert_eq!(o.query(4, 4).unwrap(), 0);
}

#[test]
fn labels_agree_with_tree_oracles() {
    let g = grid(5, 5, 1, 1);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Metric, true);
    let pr = build_path_reporting(&g, &c).unwrap();
    let lab = build_distance_labeling(&c).unwrap();
    let b = c.guarantee();
    for u in 0..25 {
        for v in 0..25 {
            let a = DistanceLabeling::query(lab.label(u).unwrap(), lab.label(v).unwrap()).unwrap();
            let direct = pr.query_path(u, v).unwrap();
            assert_eq!(a.estimate, direct.weight);
            assert_eq!(a.tree, direct.tree);
            assert!(within(a.estimate, d[u][v], b.num, b.den));
        }
    }
    let log = (25f64).log2().ceil() as usize;
    assert!(lab.max_label_words() <= 6 * c.max_overlap() * log);
}

#[test]
fn single_tree_labels_are_exact() {
    let g = random_tree(50, 5, 1);
    let d = floyd(&g);
    let lab = build_distance_labeling(&spt_cover(&g, 7)).unwrap();
    for u in 0..50 {
        for v in 0..50 {
            let a = DistanceLabeling::query(lab.label(u).unwrap(), lab.label(v).unwrap()).unwrap();
            assert_eq!(a.estimate, d[u][v]);
        }
    }
}

#[test]
fn hst_direct_labels_give_lca_labels() {
    let g = grid(4, 5, 2, 3);
    let c = cover(&g, 2, CoverKind::Hst, true);
    let lab = build_distance_labeling(&c).unwrap();
    assert_eq!(lab.mode, LabelMode::HstDirect);
    for u in 0..20 {
        for v in 0..20 {
            let want = c
                .trees
                .iter()
                .filter_map(|t| t.as_hst().unwrap().distance(u, v))
                .min()
                .unwrap();
            let a = DistanceLabeling::query(lab.label(u).unwrap(), lab.label(v).unwrap()).unwrap();
            assert_eq!(a.estimate, want);
        }
    }
}

#[test]
fn labels_from_different_builds_are_rejected() {
    let g = grid(4, 4, 1, 1);
    let a = build_distance_labeling(&cover(&g, 1, CoverKind::Metric, true)).unwrap();
    let b = build_distance_labeling(&cover(&g, 2, CoverKind::Metric, true)).unwrap();
    assert_ne!(a.build, b.build);
    let err = DistanceLabeling::query(a.label(0).unwrap(), b.label(1).unwrap());
    assert!(matches!(err, Err(QueryError::BuildMismatch { .. })));
}

#[test]
fn graph_routing_on_a_tree_follows_shortest_paths() {
    let g = random_tree(64, 9, 2);
    let d = floyd(&g);
    let r = build_graph_routing(&spt_cover(&g, 3)).unwrap();
    for u in 0..64 {
        for v in 0..64 {
            let route = r.simulate_route(u, v).unwrap();
            assert!(route.delivered);
            assert_eq!(route.weight, d[u][v]);
            if u == v {
                assert_eq!(route.hops.len(), 1);
            }
        }
    }
}

#[test]
fn graph_routing_on_partial_two_tree() {
    let (g, td) = partial_k_tree(150, 2, 0.7, 10, 4);
    let dm = exact_distances(&g);
    let provider = SeparatorProvider::from_decomposition(&g, td).unwrap();
    let c = separator_recursion_cover(
        &g,
        &provider,
        &CoverConfig::new(2, CoverKind::Spanning).full(true).seed(3),
    )
    .unwrap();
    let report = verify_cover(&dm, &c, None, None, DEFAULT_VERIFY_CAP).unwrap();
    let s = report.max_stretch;
    let r = build_graph_routing(&c).unwrap();
    for u in 0..150 {
        let du = tree_like_rows(&c, u);
        for v in 0..150 {
            let route = r.simulate_route(u, v).unwrap();
            assert!(route.delivered);
            assert_eq!(route.hops.last().unwrap().vertex, v);
            let t = route.tree.unwrap();
            assert_eq!(route.weight, du[t][v]);
            assert!(within(route.weight, dm.get(u, v), s.num, s.den));
            for w in route.hops.windows(2) {
                assert!(g.edge_weight(w[0].vertex, w[1].vertex).is_some());
            }
            assert!(route.hops.len() <= 150);
        }
    }
    assert_eq!(RouteHeader::WORDS, 2);
}

fn tree_like_rows(c: &Cover, u: usize) -> Vec<Vec<u64>> {
    c.trees
        .iter()
        .map(|t| tree_dists(c.n, t.as_tree().unwrap().edges(), u))
        .collect()
}

#[test]
fn graph_routing_rejects_metric_covers() {
    let g = grid(3, 3, 1, 1);
    assert!(matches!(
        build_graph_routing(&cover(&g, 1, CoverKind::Metric, true)),
        Err(QueryError::NotSpanning)
    ));
}

#[test]
fn metric_routing_on_grid() {
    let g = grid(5, 5, 1, 1);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Metric, true);
    let r = build_metric_routing(&c).unwrap();
    let b = c.guarantee();
    for u in 0..25 {
        let du = tree_like_rows(&c, u);
        for v in 0..25 {
            let route = r.simulate_route(u, v).unwrap();
            assert!(route.path.len() <= 2);
            assert!(route.path.iter().all(|e| r.in_overlay(e)));
            assert_eq!(chain_weight(&route.path, u, v), Some(route.weight));
            assert_eq!(route.weight, du[route.header.unwrap().tree as usize][v]);
            assert!(within(route.weight, d[u][v], b.num, b.den));
            if u == v {
                assert!(route.path.is_empty());
            }
        }
    }
    let log = (25f64).log2().ceil() as usize + 1;
    assert!(r.overlay().len() <= c.tree_count() * 25 * log);
    assert_eq!(MetricHeader::WORDS, 3);
}

#[test]
fn metric_routing_needs_a_full_metric_cover() {
    let g = grid(3, 3, 1, 1);
    assert!(matches!(
        build_metric_routing(&cover(&g, 1, CoverKind::Metric, false)),
        Err(QueryError::NotFullMetric)
    ));
    assert!(matches!(
        build_metric_routing(&cover(&g, 1, CoverKind::Spanning, true)),
        Err(QueryError::NotFullMetric)
    ));
}

#[test]
fn low_hop_paths_on_grid() {
    let g = grid(5, 5, 1, 1);
    let d = floyd(&g);
    let c = cover(&g, 2, CoverKind::Metric, true);
    let lh = build_low_hop_path_reporting(&c, 2).unwrap();
    let b = c.guarantee();
    for u in 0..25 {
        for v in 0..25 {
            let a = lh.query_path(u, v).unwrap();
            assert!(a.path.len() <= 2);
            assert!(a.path.iter().all(|e| lh.in_overlay(e)));
            assert_eq!(chain_weight(&a.path, u, v), Some(a.weight));
            assert!(within(a.weight, d[u][v], b.num, b.den));
        }
    }
    let total: usize = c.total_size();
    assert!(lh.overlay().len() <= total * ((25f64).log2().ceil() as usize + 1));
    assert!(matches!(
        build_low_hop_path_reporting(&c, 3),
        Err(QueryError::UnsupportedHopBound(3))
    ));
}

#[test]
fn low_hop_single_tree_is_exact() {
    let g = random_tree(30, 4, 8);
    let d = floyd(&g);
    let lh = build_low_hop_path_reporting(&spt_cover(&g, 0), 2).unwrap();
    for u in 0..30 {
        for v in 0..30 {
            let a = lh.query_path(u, v).unwrap();
            assert_eq!(a.weight, d[u][v]);
            assert!(a.path.len() <= 2);
        }
    }
}
