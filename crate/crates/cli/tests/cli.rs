use std::path::Path;
use std::process::{Command, Output};

use treecover::graph::{Graph, GraphFormat, LoadOptions};
use treecover::separator::TreeDecomposition;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treecover"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let o = run(dir, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn graph(dir: &Path, name: &str) -> Graph {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    Graph::parse(&text, GraphFormat::EdgeList, LoadOptions::default()).unwrap()
}

#[test]
fn grid_four_by_four() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen", "grid", "--rows", "4", "--cols", "4", "--out", "g.txt",
        ],
    );
    let g = graph(dir.path(), "g.txt");
    assert_eq!((g.n(), g.m()), (16, 24));
    let first = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert!(first.starts_with("c {\"tool\":\"treecover\""));
}

#[test]
fn partial_two_tree_decomposition_validates() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "--seed",
            "1",
            "gen",
            "partial-k-tree",
            "--n",
            "50",
            "--width",
            "2",
            "--out",
            "g.txt",
        ],
    );
    let g = graph(dir.path(), "g.txt");
    let td =
        TreeDecomposition::parse(&std::fs::read_to_string(dir.path().join("g.txt.td")).unwrap())
            .unwrap();
    td.validate(&g).unwrap();
    assert_eq!(td.width, 2);
}

#[test]
fn random_tree_has_n_minus_one_edges() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["gen", "random-tree", "--n", "10", "--out", "t.txt"],
    );
    let g = graph(dir.path(), "t.txt");
    assert_eq!(g.m(), 9);
    assert!(g.is_connected());
}

#[test]
fn json_graphs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen",
            "gnp",
            "--n",
            "20",
            "--p",
            "0.2",
            "--max-weight",
            "5",
            "--out",
            "g.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.json",
            "--kind",
            "metric",
            "--full",
            "--out",
            "c.json",
        ],
    );
}

#[test]
fn hst_cover_on_grid_writes_cover_and_report() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen", "grid", "--rows", "5", "--cols", "5", "--out", "g.txt",
        ],
    );
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.txt",
            "--kind",
            "hst",
            "--k",
            "2",
            "--full",
            "--out",
            "c.json",
            "--report",
            "r.csv",
        ],
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["kind"], "hst");
    assert_eq!(v["config"]["full"], true);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["cover"]["trees"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t["type"] == "hst"));
    let report = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let rows: Vec<&str> = report.lines().collect();
    assert!(rows[0].starts_with("# "));
    assert!(rows[2].starts_with("25,hst,true,"));
    assert!(rows[2].ends_with(",true,true"));
}

#[test]
fn tampered_cover_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen",
            "grid",
            "--rows",
            "5",
            "--cols",
            "5",
            "--max-weight",
            "4",
            "--out",
            "g.txt",
        ],
    );
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.txt",
            "--kind",
            "metric",
            "--full",
            "--out",
            "c.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "verify",
            "--cover",
            "c.json",
            "--suite",
            "metric-cover",
            "--out",
            "v.json",
        ],
    );
    let path = dir.path().join("c.json");
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["cover"]["trees"][0]["edges"][0]["w"] = serde_json::json!(0);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(
        dir.path(),
        &[
            "verify",
            "--cover",
            "c.json",
            "--suite",
            "metric-cover",
            "--out",
            "v.json",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("FAIL non-contraction") && err.contains("tree 0 pair"),
        "{err}"
    );
    let rec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    let check = rec["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "non-contraction")
        .unwrap()
        .clone();
    assert_eq!(check["passed"], false);
    assert!(check["witness"].as_str().unwrap().contains("graph"));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "p 3 1\ne 0 7 1\n").unwrap();
    let o = run(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "bad.txt",
            "--kind",
            "metric",
            "--out",
            "c.json",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        dir.path(),
        &[
            "verify",
            "--cover",
            "missing.json",
            "--suite",
            "metric-cover",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        dir.path(),
        &["verify", "--cover", "missing.json", "--suite", "nonsense"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_route_ends_at_its_destination() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "--seed",
            "3",
            "gen",
            "partial-k-tree",
            "--n",
            "100",
            "--max-weight",
            "6",
            "--out",
            "g.txt",
        ],
    );
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.txt",
            "--td",
            "g.txt.td",
            "--kind",
            "spanning",
            "--full",
            "--out",
            "s.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "route", "--cover", "s.json", "--pairs", "all", "--out", "r.csv",
        ],
    );
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut last: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    for r in rd.records() {
        let r = r.unwrap();
        let (s, d, v): (usize, usize, usize) = (
            r[0].parse().unwrap(),
            r[1].parse().unwrap(),
            r[3].parse().unwrap(),
        );
        assert_eq!(&r[7], "true");
        last.insert((s, d), v);
    }
    assert_eq!(last.len(), 100 * 99);
    assert!(last.iter().all(|(&(_, d), &v)| d == v));
}

#[test]
fn label_oracle_and_bench_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen",
            "grid",
            "--rows",
            "6",
            "--cols",
            "6",
            "--max-weight",
            "3",
            "--out",
            "g.txt",
        ],
    );
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.txt",
            "--kind",
            "hst",
            "--full",
            "--out",
            "h.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "label", "--cover", "h.json", "--pairs", "0-35,4-9", "--out", "l.json",
        ],
    );
    let l: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("l.json")).unwrap()).unwrap();
    assert!(l["max_label_words"].as_u64().unwrap() > 0);
    assert_eq!(l["answers"].as_array().unwrap().len(), 2);
    ok(
        dir.path(),
        &[
            "label",
            "--cover",
            "h.json",
            "--convert-hst",
            "--out",
            "l2.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "oracle", "--graph", "g.txt", "--k", "2", "--pairs", "all", "--out", "o.json",
        ],
    );
    let o: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o.json")).unwrap()).unwrap();
    assert_eq!(o["answers"].as_array().unwrap().len(), 36 * 35);
    assert!(o["record"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    ok(
        dir.path(),
        &[
            "verify",
            "--graph",
            "g.txt",
            "--suite",
            "oracle",
            "--results",
            "res.csv",
        ],
    );
    ok(
        dir.path(),
        &[
            "verify",
            "--cover",
            "h.json",
            "--suite",
            "path-reporting",
            "--results",
            "res.csv",
        ],
    );
    let res = std::fs::read_to_string(dir.path().join("res.csv")).unwrap();
    assert_eq!(res.lines().filter(|l| l.starts_with("version,")).count(), 1);
    ok(
        dir.path(),
        &[
            "bench",
            "--cover",
            "h.json",
            "--queries",
            "500",
            "--out",
            "b.json",
        ],
    );
}

#[test]
fn metric_routes_use_at_most_two_edges() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen", "grid", "--rows", "5", "--cols", "6", "--out", "g.txt",
        ],
    );
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.txt",
            "--kind",
            "metric",
            "--full",
            "--out",
            "m.json",
        ],
    );
    ok(
        dir.path(),
        &[
            "route", "--cover", "m.json", "--pairs", "all", "--out", "r.csv",
        ],
    );
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    for r in rd.records() {
        let r = r.unwrap();
        assert!(r[2].parse::<usize>().unwrap() <= 2);
        assert_eq!(r[4].split(':').count(), 3);
    }
    ok(
        dir.path(),
        &[
            "build-cover",
            "--graph",
            "g.txt",
            "--kind",
            "metric",
            "--out",
            "p.json",
        ],
    );
    let o = run(
        dir.path(),
        &[
            "route", "--cover", "p.json", "--pairs", "all", "--out", "r2.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}
