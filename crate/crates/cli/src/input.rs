use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use treecover::graph::{DedupPolicy, Graph, GraphFormat, LoadOptions, VertexId};
use treecover::rng::rng_for;
use treecover::separator::{SeparatorProvider, TreeDecomposition};

use crate::artifact::RunConfig;
use crate::{Dedupe, GraphArgs, SepMode};

pub fn format_for(path: &Path) -> GraphFormat {
    if path.extension().is_some_and(|e| e == "json") {
        GraphFormat::Json
    } else {
        GraphFormat::EdgeList
    }
}

pub fn load_graph(path: &Path, dedupe: Dedupe) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let opts = LoadOptions {
        dedupe: match dedupe {
            Dedupe::Reject => DedupPolicy::Reject,
            Dedupe::Min => DedupPolicy::KeepMin,
        },
        scale: None,
    };
    Graph::parse(&text, format_for(path), opts)
        .with_context(|| format!("parsing {}", path.display()))
}

/// The graph and separator provider named by `args`, also recorded in `cfg`.
/// `fallback` is the graph path recorded in an input artifact.
pub fn load_instance(
    args: &GraphArgs,
    fallback: Option<&str>,
    cfg: &mut RunConfig,
) -> Result<(Graph, SeparatorProvider)> {
    let path: PathBuf = match (&args.graph, fallback) {
        (Some(p), _) => p.clone(),
        (None, Some(f)) => f.into(),
        (None, None) => bail!("--graph is required"),
    };
    let g = load_graph(&path, args.dedupe)?;
    cfg.graph = Some(path.display().to_string());
    if args.dedupe != Dedupe::Reject {
        cfg.dedupe = Some(args.dedupe);
    }
    let mode = args.sep_mode.unwrap_or(if args.td.is_some() {
        SepMode::Td
    } else {
        SepMode::Heuristic
    });
    cfg.sep_mode = Some(mode);
    let provider = match mode {
        SepMode::Td => {
            let td_path = args
                .td
                .as_ref()
                .ok_or_else(|| anyhow!("--sep-mode td needs --td"))?;
            cfg.td = Some(td_path.display().to_string());
            let text = fs::read_to_string(td_path)
                .with_context(|| format!("reading {}", td_path.display()))?;
            let td = TreeDecomposition::parse(&text)
                .with_context(|| format!("parsing {}", td_path.display()))?;
            SeparatorProvider::from_decomposition(&g, td)?
        }
        SepMode::Heuristic => SeparatorProvider::heuristic(),
        SepMode::Exact => SeparatorProvider::exact(),
    };
    Ok((g, provider))
}

/// `all`, `random:<count>` (drawn from `seed`), or `u-v,u-v,...`.
pub fn parse_pairs(spec: &str, n: usize, seed: u64) -> Result<Vec<(VertexId, VertexId)>> {
    if spec == "all" {
        return Ok((0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect());
    }
    if let Some(count) = spec.strip_prefix("random:") {
        use rand::Rng;
        let count: usize = count
            .parse()
            .with_context(|| format!("bad pair count in {spec:?}"))?;
        if n == 0 {
            bail!("empty graph");
        }
        let mut rng = rng_for(seed, &[0x7061]);
        return Ok((0..count)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect());
    }
    spec.split(',')
        .map(|p| {
            let (a, b) = p.split_once('-').ok_or_else(|| anyhow!("bad pair {p:?}"))?;
            let (u, v): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
            if u >= n || v >= n {
                bail!("pair {p:?} is out of range for n = {n}");
            }
            Ok((u, v))
        })
        .collect()
}
