use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use treecover::cover::{
    separator_recursion_cover, verify_cover, verify_cover_sampled, Cover, CoverConfig, CoverKind,
    CoverReport, DEFAULT_SAMPLES, DEFAULT_VERIFY_CAP,
};
use treecover::generators::{generate, GenSpec};
use treecover::graph::{exact_distances, DistanceMatrix, VertexId, Weight, UNREACHABLE};
use treecover::queries::{
    build_distance_labeling, build_graph_routing, build_metric_routing, build_separator_do,
    CoverTrees, DistanceLabeling, PathReporting,
};
use treecover::ramsey::{Hst, SpanningStrategy};
use treecover::verify::{
    certify, cover_suite, suite, BoundKind, CertifyOptions, RecordConfig, RunRecord, Structure,
    SUITES,
};

use crate::artifact::{read_json, write_json, write_text, Header, RunConfig};
use crate::input::{format_for, load_instance, parse_pairs};
use crate::{
    BenchArgs, BuildArgs, Cli, Command, Family, GenArgs, KindArg, LabelArgs, OracleArgs, RouteArgs,
    StrategyArg, VerifyArgs,
};

pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a),
        Command::BuildCover(a) => build_cover(cli, a),
        Command::Verify(a) => verify(cli, a),
        Command::Oracle(a) => oracle(cli, a),
        Command::Label(a) => label(cli, a),
        Command::Route(a) => route(cli, a),
        Command::Bench(a) => bench(cli, a),
    }
}

fn kind_of(k: KindArg) -> CoverKind {
    match k {
        KindArg::Spanning => CoverKind::Spanning,
        KindArg::Metric => CoverKind::Metric,
        KindArg::Hst => CoverKind::Hst,
    }
}

fn kind_arg(k: CoverKind) -> KindArg {
    match k {
        CoverKind::Spanning => KindArg::Spanning,
        CoverKind::Metric => KindArg::Metric,
        CoverKind::Hst => KindArg::Hst,
    }
}

fn record_config(cfg: &RunConfig, n: usize, k: u32, mode: String) -> RecordConfig {
    RecordConfig {
        generator: cfg.graph.clone().unwrap_or_default(),
        n,
        k,
        seed: cfg.seed,
        mode,
    }
}

fn certify_options(seed: u64) -> CertifyOptions {
    CertifyOptions {
        cap: DEFAULT_VERIFY_CAP,
        samples: DEFAULT_SAMPLES,
        sample_seed: seed,
        domain: None,
    }
}

fn report_failures(record: &RunRecord) {
    for f in record.failures() {
        eprintln!(
            "FAIL {}: {} {}",
            f.name,
            f.detail,
            f.witness.as_deref().unwrap_or("")
        );
    }
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<bool> {
    let need = |x: Option<usize>, name: &str| {
        x.with_context(|| format!("--{name} is required for this family"))
    };
    let spec = match a.family {
        Family::PartialKTree => GenSpec::PartialKTree {
            n: need(a.n, "n")?,
            k: a.width,
            keep: a.keep,
            max_weight: a.max_weight,
        },
        Family::Grid => GenSpec::Grid {
            rows: need(a.rows, "rows")?,
            cols: need(a.cols, "cols")?,
            max_weight: a.max_weight,
        },
        Family::RandomTree => GenSpec::RandomTree {
            n: need(a.n, "n")?,
            max_weight: a.max_weight,
        },
        Family::Gnp => GenSpec::Gnp {
            n: need(a.n, "n")?,
            p: a.p,
            max_weight: a.max_weight,
        },
    };
    let out = generate(&spec, cli.seed)?;
    let mut cfg = RunConfig::new("gen", cli.seed);
    cfg.generator = Some(spec);
    cfg.outputs.push(a.out.display().to_string());
    let td_path = a.out.with_extension(match a.out.extension() {
        Some(e) => format!("{}.td", e.to_string_lossy()),
        None => "td".into(),
    });
    if out.decomposition.is_some() {
        cfg.outputs.push(td_path.display().to_string());
    }
    let header = Header::new(&cfg);
    let text = match format_for(&a.out) {
        treecover::graph::GraphFormat::Json => {
            let mut v: serde_json::Value =
                serde_json::from_str(&out.graph.to_text(treecover::graph::GraphFormat::Json))?;
            v["run"] = serde_json::to_value(&header)?;
            let mut s = serde_json::to_string(&v)?;
            s.push('\n');
            s
        }
        f => format!("c {}\n{}", header.line(), out.graph.to_text(f)),
    };
    write_text(&a.out, &text)?;
    if let Some(td) = &out.decomposition {
        write_text(&td_path, &format!("c {}\n{}", header.line(), td.to_text()))?;
    }
    if cli.human {
        eprintln!(
            "generated n = {} m = {} -> {}",
            out.graph.n(),
            out.graph.m(),
            a.out.display()
        );
    }
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct CoverPayload {
    cover: Cover,
    record: RunRecord,
}

#[derive(Deserialize)]
struct CoverFile {
    config: RunConfig,
    cover: Cover,
}

fn load_cover(path: &Path) -> Result<CoverFile> {
    read_json(path)
}

fn cover_report(dm: &DistanceMatrix, cover: &Cover, seed: u64) -> Result<CoverReport> {
    let bound = Some(cover.guarantee());
    Ok(if cover.n <= DEFAULT_VERIFY_CAP {
        verify_cover(dm, cover, None, bound, DEFAULT_VERIFY_CAP)?
    } else {
        verify_cover_sampled(dm, cover, bound, DEFAULT_SAMPLES, seed)?
    })
}

fn build_cover(cli: &Cli, a: &BuildArgs) -> Result<bool> {
    let mut cfg = RunConfig::new("build-cover", cli.seed);
    let (g, provider) = load_instance(&a.graph, None, &mut cfg)?;
    cfg.k = Some(a.k);
    cfg.kind = Some(a.kind);
    cfg.full = Some(a.full);
    cfg.strategy = Some(a.strategy);
    cfg.outputs.push(a.out.display().to_string());
    cfg.outputs
        .extend(a.report.iter().map(|p| p.display().to_string()));
    cfg.outputs
        .extend(a.dump_hst.iter().map(|p| p.display().to_string()));
    let strategy = match a.strategy {
        StrategyArg::HstRealization => SpanningStrategy::HstRealization,
        StrategyArg::SptStar => SpanningStrategy::SptStar,
    };
    let cc = CoverConfig::new(a.k, kind_of(a.kind))
        .full(a.full)
        .seed(cli.seed)
        .strategy(strategy);
    let cover = separator_recursion_cover(&g, &provider, &cc)?;
    let dm = exact_distances(&g);
    let rc = record_config(
        &cfg,
        g.n(),
        a.k,
        format!("{:?}/full={}", a.kind, a.full).to_lowercase(),
    );
    let record = certify(
        &g,
        &dm,
        Structure::Cover(&cover),
        &cover_suite(cover.kind),
        rc,
        &certify_options(cli.seed),
    )?;
    if let Some(path) = &a.report {
        let r = cover_report(&dm, &cover, cli.seed)?;
        let text = format!(
            "# {}\n{}\n{}\n",
            Header::new(&cfg).line(),
            CoverReport::CSV_HEADER,
            r.csv_row()
        );
        write_text(path, &text)?;
    }
    if let Some(path) = &a.dump_hst {
        #[derive(Serialize)]
        struct Dump<'a> {
            hsts: Vec<&'a Hst>,
        }
        let hsts = cover.trees.iter().filter_map(|t| t.as_hst()).collect();
        write_json(path, &cfg, &Dump { hsts })?;
    }
    let passed = record.passed();
    if cli.human {
        eprintln!(
            "{} cover, k = {}, full = {}: {} trees, total size {}, α = {}, guarantee {}, {} in {} ms",
            format!("{:?}", a.kind).to_lowercase(),
            a.k,
            a.full,
            cover.tree_count(),
            cover.total_size(),
            cover.alpha,
            cover.guarantee(),
            if passed { "passed" } else { "FAILED" },
            record.wall_ms
        );
    }
    report_failures(&record);
    write_json(&a.out, &cfg, &CoverPayload { cover, record })?;
    Ok(passed)
}

fn append_results(path: &Path, suite_name: &str, record: &RunRecord) -> Result<()> {
    let fresh = !path.exists();
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    if fresh {
        w.write_record([
            "version", "graph", "n", "k", "seed", "mode", "suite", "check", "passed", "detail",
            "witness",
        ])?;
    }
    let c = &record.config;
    for ch in &record.checks {
        w.write_record([
            crate::artifact::VERSION,
            &c.generator,
            &c.n.to_string(),
            &c.k.to_string(),
            &c.seed.to_string(),
            &c.mode,
            suite_name,
            &ch.name,
            &ch.passed.to_string(),
            &ch.detail,
            ch.witness.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<bool> {
    let mut specs = suite(&a.suite)
        .with_context(|| format!("unknown suite {:?}; known: {}", a.suite, SUITES.join(", ")))?;
    if let Some(kc) = a.forest_k {
        for s in &mut specs {
            if let BoundKind::ForestStretch { k_const } = &mut s.kind {
                *k_const = kc;
            }
        }
    }
    let mut cfg = RunConfig::new("verify", cli.seed);
    cfg.suite = Some(a.suite.clone());
    cfg.forest_k = a.forest_k;
    cfg.outputs
        .extend(a.out.iter().map(|p| p.display().to_string()));
    cfg.outputs
        .extend(a.results.iter().map(|p| p.display().to_string()));
    let opts = certify_options(cli.seed);
    let record = if a.suite == "oracle" {
        let (g, provider) = load_instance(&a.graph, None, &mut cfg)?;
        cfg.k = Some(a.k);
        let o = build_separator_do(&g, &provider, a.k, cli.seed)?;
        let dm = exact_distances(&g);
        let rc = record_config(&cfg, g.n(), a.k, "separator-oracle".into());
        certify(&g, &dm, Structure::SeparatorOracle(&o), &specs, rc, &opts)?
    } else {
        let path = a
            .cover
            .as_ref()
            .context("--cover is required for this suite")?;
        let file = load_cover(path)?;
        cfg.cover = Some(path.display().to_string());
        let (g, _) = load_instance(&a.graph, file.config.graph.as_deref(), &mut cfg)?;
        let cover = file.cover;
        cfg.k = Some(cover.k);
        cfg.kind = Some(kind_arg(cover.kind));
        cfg.full = Some(cover.full);
        if g.n() != cover.n {
            bail!("graph has {} vertices, cover {}", g.n(), cover.n);
        }
        let dm = exact_distances(&g);
        let rc = record_config(&cfg, g.n(), cover.k, a.suite.clone());
        if a.suite == "path-reporting" {
            let trees = CoverTrees::from_hst_cover(&cover)?;
            let pr = PathReporting::from_trees(&g, &trees)?;
            certify(&g, &dm, Structure::PathReporting(&pr), &specs, rc, &opts)?
        } else {
            certify(&g, &dm, Structure::Cover(&cover), &specs, rc, &opts)?
        }
    };
    if let Some(path) = &a.results {
        append_results(path, &a.suite, &record)?;
    }
    report_failures(&record);
    if cli.human {
        eprintln!(
            "suite {}: {} ({} checks, {} ms)",
            a.suite,
            if record.passed() { "passed" } else { "FAILED" },
            record.checks.len(),
            record.wall_ms
        );
    }
    let passed = record.passed();
    match &a.out {
        Some(p) => write_json(p, &cfg, &record)?,
        None => {
            let h = Header::new(&cfg);
            let v = serde_json::json!({ "tool": h.tool, "version": h.version, "config": h.config, "record": record });
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{}", serde_json::to_string_pretty(&v)?) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(passed)
}

#[derive(Serialize)]
struct Answer {
    u: VertexId,
    v: VertexId,
    estimate: Option<Weight>,
}

fn finite(w: Weight) -> Option<Weight> {
    (w != UNREACHABLE).then_some(w)
}

fn oracle(cli: &Cli, a: &OracleArgs) -> Result<bool> {
    let mut cfg = RunConfig::new("oracle", cli.seed);
    let (g, provider) = load_instance(&a.graph, None, &mut cfg)?;
    cfg.k = Some(a.k);
    cfg.pairs = Some(a.pairs.clone());
    cfg.outputs.push(a.out.display().to_string());
    let o = build_separator_do(&g, &provider, a.k, cli.seed)?;
    let pairs = parse_pairs(&a.pairs, g.n(), cli.seed)?;
    let answers: Vec<Answer> = pairs
        .par_iter()
        .map(|&(u, v)| {
            Ok(Answer {
                u,
                v,
                estimate: finite(o.query(u, v)?),
            })
        })
        .collect::<Result<_, treecover::queries::QueryError>>()?;
    let dm = exact_distances(&g);
    let rc = record_config(&cfg, g.n(), a.k, "separator-oracle".into());
    let record = certify(
        &g,
        &dm,
        Structure::SeparatorOracle(&o),
        &suite("oracle").expect("built-in"),
        rc,
        &certify_options(cli.seed),
    )?;
    #[derive(Serialize)]
    struct Payload {
        words: usize,
        nodes: usize,
        depth: usize,
        alpha: treecover::ratio::Ratio,
        bound: treecover::ratio::Ratio,
        answers: Vec<Answer>,
        record: RunRecord,
    }
    let passed = record.passed();
    report_failures(&record);
    if cli.human {
        eprintln!(
            "oracle: {} words, bound {}, {} answers, {}",
            o.words(),
            o.bound(),
            answers.len(),
            if passed { "passed" } else { "FAILED" }
        );
    }
    let p = Payload {
        words: o.words(),
        nodes: o.node_count(),
        depth: o.depth,
        alpha: o.alpha,
        bound: o.bound(),
        answers,
        record,
    };
    write_json(&a.out, &cfg, &p)?;
    Ok(passed)
}

fn labeling_for(cover: &Cover, convert: bool) -> Result<DistanceLabeling> {
    Ok(if convert && cover.kind == CoverKind::Hst {
        DistanceLabeling::from_trees(&CoverTrees::from_hst_cover(cover)?)?
    } else {
        build_distance_labeling(cover)?
    })
}

fn label(cli: &Cli, a: &LabelArgs) -> Result<bool> {
    let file = load_cover(&a.cover)?;
    let mut cfg = RunConfig::new("label", cli.seed);
    cfg.cover = Some(a.cover.display().to_string());
    cfg.pairs = a.pairs.clone();
    cfg.outputs.push(a.out.display().to_string());
    let lab = labeling_for(&file.cover, a.convert_hst)?;
    let answers: Vec<(VertexId, VertexId, Option<Weight>, Option<usize>)> = match &a.pairs {
        Some(spec) => parse_pairs(spec, file.cover.n, cli.seed)?
            .into_iter()
            .map(|(u, v)| {
                let r = DistanceLabeling::query(lab.label(u)?, lab.label(v)?)?;
                Ok((u, v, finite(r.estimate), r.tree))
            })
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    #[derive(Serialize)]
    struct Payload<'a> {
        max_label_words: usize,
        labeling: &'a DistanceLabeling,
        answers: Vec<(VertexId, VertexId, Option<Weight>, Option<usize>)>,
    }
    if cli.human {
        eprintln!(
            "labels: {} vertices, max {} words, build {:#x}",
            lab.labels().len(),
            lab.max_label_words(),
            lab.build
        );
    }
    write_json(
        &a.out,
        &cfg,
        &Payload {
            max_label_words: lab.max_label_words(),
            labeling: &lab,
            answers,
        },
    )?;
    Ok(true)
}

fn route(cli: &Cli, a: &RouteArgs) -> Result<bool> {
    let file = load_cover(&a.cover)?;
    let cover = &file.cover;
    let mut cfg = RunConfig::new("route", cli.seed);
    cfg.cover = Some(a.cover.display().to_string());
    cfg.pairs = Some(a.pairs.clone());
    cfg.strict_tz = Some(a.strict_tz);
    cfg.outputs.push(a.out.display().to_string());
    let pairs = parse_pairs(&a.pairs, cover.n, cli.seed)?;
    let mut text = format!("# {}\n", Header::new(&cfg).line());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "source",
        "dest",
        "hop",
        "vertex",
        "header",
        "cumulative_weight",
        "work",
        "delivered",
    ])?;
    let mut all_delivered = true;
    let mut routes = 0usize;
    match cover.kind {
        CoverKind::Spanning => {
            let mut r = build_graph_routing(cover)?;
            r.set_strict(a.strict_tz);
            let results: Vec<_> = pairs
                .par_iter()
                .map(|&(u, v)| r.simulate_route(u, v))
                .collect::<Result<_, _>>()?;
            for route in results {
                routes += 1;
                all_delivered &= route.delivered;
                for (i, h) in route.hops.iter().enumerate() {
                    w.write_record([
                        route.source.to_string(),
                        route.dest.to_string(),
                        i.to_string(),
                        h.vertex.to_string(),
                        format!("{}:{}", h.header.tree, h.header.cursor),
                        h.cumulative.to_string(),
                        h.work.to_string(),
                        route.delivered.to_string(),
                    ])?;
                }
            }
        }
        CoverKind::Metric if cover.full => {
            let r = build_metric_routing(cover)?;
            let results: Vec<_> = pairs
                .par_iter()
                .map(|&(u, v)| r.simulate_route(u, v))
                .collect::<Result<_, _>>()?;
            for route in results {
                routes += 1;
                let delivered = route.header.is_some() || route.source == route.dest;
                all_delivered &= delivered;
                let header = route
                    .header
                    .map(|h| format!("{}:{}:{}", h.tree, h.hub, h.dest))
                    .unwrap_or_default();
                let mut at = route.source;
                let mut cum = 0;
                w.write_record([
                    route.source.to_string(),
                    route.dest.to_string(),
                    "0".into(),
                    at.to_string(),
                    header.clone(),
                    "0".into(),
                    "1".into(),
                    delivered.to_string(),
                ])?;
                for (i, e) in route.path.iter().enumerate() {
                    at = e.other(at);
                    cum += e.w;
                    w.write_record([
                        route.source.to_string(),
                        route.dest.to_string(),
                        (i + 1).to_string(),
                        at.to_string(),
                        header.clone(),
                        cum.to_string(),
                        "1".into(),
                        delivered.to_string(),
                    ])?;
                }
            }
        }
        _ => bail!("routing needs a spanning cover or a full metric cover"),
    }
    text.push_str(&String::from_utf8(w.into_inner()?)?);
    write_text(&a.out, &text)?;
    if cli.human {
        eprintln!(
            "{routes} routes, {}",
            if all_delivered {
                "all delivered"
            } else {
                "SOME NOT DELIVERED"
            }
        );
    }
    Ok(all_delivered)
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<bool> {
    let file = load_cover(&a.cover)?;
    let cover = &file.cover;
    let mut cfg = RunConfig::new("bench", cli.seed);
    cfg.cover = Some(a.cover.display().to_string());
    cfg.pairs = Some(format!("random:{}", a.queries));
    cfg.outputs.push(a.out.display().to_string());
    let pairs = parse_pairs(&format!("random:{}", a.queries), cover.n, cli.seed)?;
    let lab = labeling_for(cover, true)?;
    let start = std::time::Instant::now();
    let estimates: Vec<Weight> = pairs
        .par_iter()
        .map(|&(u, v)| Ok(DistanceLabeling::query(lab.label(u)?, lab.label(v)?)?.estimate))
        .collect::<Result<_>>()?;
    let label_ms = start.elapsed().as_millis();
    let checksum = estimates
        .iter()
        .fold(0u64, |acc, &e| acc.wrapping_mul(31).wrapping_add(e));
    #[derive(Serialize, Default)]
    struct Work {
        routes: usize,
        max_origin_work: usize,
        max_hop_work: usize,
        mean_hop_work: f64,
        max_hops: usize,
    }
    let mut work = Work::default();
    if cover.kind == CoverKind::Spanning {
        let r = build_graph_routing(cover)?;
        let routes: Vec<_> = pairs
            .par_iter()
            .map(|&(u, v)| r.simulate_route(u, v))
            .collect::<Result<_, _>>()?;
        let (mut sum, mut count) = (0usize, 0usize);
        for route in &routes {
            work.routes += 1;
            work.max_hops = work.max_hops.max(route.hops.len().saturating_sub(1));
            if let Some(h) = route.hops.first() {
                work.max_origin_work = work.max_origin_work.max(h.work);
            }
            for h in route.hops.iter().skip(1) {
                work.max_hop_work = work.max_hop_work.max(h.work);
                sum += h.work;
                count += 1;
            }
        }
        work.mean_hop_work = if count > 0 {
            sum as f64 / count as f64
        } else {
            0.0
        };
    }
    #[derive(Serialize)]
    struct Payload {
        queries: usize,
        checksum: u64,
        max_label_words: usize,
        work: Work,
    }
    if cli.human {
        eprintln!(
            "{} label queries in {label_ms} ms on {} threads",
            pairs.len(),
            cli.threads
        );
    }
    write_json(
        &a.out,
        &cfg,
        &Payload {
            queries: pairs.len(),
            checksum,
            max_label_words: lab.max_label_words(),
            work,
        },
    )?;
    Ok(true)
}
